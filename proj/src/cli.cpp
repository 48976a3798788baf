// Copyright 2026 The ganlocal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ganlocal/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ganlocal/error.hpp"
#include "ganlocal/image_io.hpp"
#include "ganlocal/npy.hpp"
#include "ganlocal/pipeline.hpp"
#include "ganlocal/service.hpp"

namespace ganlocal::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::string data;
  std::optional<std::string> catalog;
  std::uint64_t gen_seed = 0;
  bool json_errors = false;

  fs::path data_root() const {
    if (!data.empty()) return data;
    if (const char* env = std::getenv("GANLOCAL_DATA"); env != nullptr && *env != '\0') return env;
    return fs::current_path();
  }
  fs::path catalog_dir() const { return catalog ? fs::path(*catalog) : data_root() / "catalog"; }
};

minigen::Generator make_generator(std::uint64_t seed, std::optional<int> base_layer = std::nullopt) {
  minigen::GeneratorConfig cfg;
  cfg.seed = seed;
  if (base_layer) cfg.base_layer = *base_layer;
  return minigen::Generator(cfg);
}

minigen::Generator generator_for(const SemanticCatalog& catalog) {
  return make_generator(catalog.provenance.generator_seed, catalog.base_layer_id);
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  f << text;
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json locality_json(const metrics::LocalityReport& r) {
  return {{"in_mse", optional_number(r.in_mse)}, {"out_mse", optional_number(r.out_mse)},
          {"roi_fraction", r.roi_fraction}};
}

std::string capture_key(int layer) { return "capture_l" + std::to_string(layer); }

// Parses "capture_l<L>" entries of an archive back into activation tensors.
std::map<int, ActivationTensor> captures_from_archive(const fs::path& path) {
  std::map<int, ActivationTensor> captures;
  for (const auto& [name, array] : npy::load_archive(path)) {
    if (name.rfind("capture_l", 0) != 0) continue;
    const int layer = std::stoi(name.substr(9));
    captures[layer] = ActivationTensor{to_tensor4(array), layer, false, {}};
  }
  if (captures.empty()) throw Error(ErrorCode::kBadArchive, path.string() + " holds no capture_l<L> arrays");
  return captures;
}

NdArray images_array(const std::vector<Image>& images) {
  NdArray a;
  if (images.empty()) {
    a.shape = {0, 3, 0, 0};
    return a;
  }
  a.shape = {images.size(), 3, images[0].h, images[0].w};
  for (const auto& im : images) a.data.insert(a.data.end(), im.rgb.begin(), im.rgb.end());
  return a;
}

std::vector<Image> images_from_array(const NdArray& a) {
  if (a.shape.size() != 4 || a.shape[1] != 3) {
    throw Error(ErrorCode::kShapeMismatch, "images must have shape (N, 3, H, W)");
  }
  std::vector<Image> out;
  const std::size_t plane = 3 * a.shape[2] * a.shape[3];
  for (std::size_t i = 0; i < a.shape[0]; ++i) {
    Image im;
    im.h = a.shape[2];
    im.w = a.shape[3];
    im.rgb.assign(a.data.begin() + static_cast<std::ptrdiff_t>(i * plane),
                  a.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * plane));
    out.push_back(std::move(im));
  }
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw CLI::ValidationError("grid", "not a number: '" + item + "'");
    values.push_back(v);
  }
  if (values.empty()) throw CLI::ValidationError("grid", "empty grid");
  return values;
}

json cluster_summary(const SemanticCatalog& c) {
  std::vector<std::size_t> sizes(c.k, 0);
  for (int label : c.base_labels) ++sizes[static_cast<std::size_t>(label)];
  std::vector<int> layers;
  for (const auto& [layer, m] : c.attributions) layers.push_back(layer);
  return {{"k", c.k}, {"base_layer_id", c.base_layer_id}, {"cluster_sizes", sizes}, {"attributed_layers", layers}};
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ganlocal: local semantic editing of a style-based toy generator"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--data", common.data, "project root (default: $GANLOCAL_DATA or the working directory)");
  app.add_option("--catalog", common.catalog, "catalog directory (default: <data>/catalog)");
  app.add_flag("--json", common.json_errors, "print errors as JSON on stderr");

  // gen
  auto* gen = app.add_subcommand("gen", "render samples and export captures, styles and images");
  std::size_t gen_count = 8;
  std::uint64_t gen_first = 0;
  std::string gen_out = "samples";
  bool gen_captures = false;
  gen->add_option("--gen-seed", common.gen_seed, "generator weight seed");
  gen->add_option("--count", gen_count, "number of samples")->check(CLI::PositiveNumber);
  gen->add_option("--first-seed", gen_first, "latent seed of the first sample");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_flag("--captures", gen_captures, "also export per-layer captures (captures.npz)");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "cluster base-layer captures into a draft catalog");
  pipeline::CatalogOptions copt;
  std::optional<std::string> cluster_captures;
  cluster->add_option("--gen-seed", common.gen_seed, "generator weight seed");
  cluster->add_option("--k", copt.k, "number of clusters")->check(CLI::PositiveNumber);
  cluster->add_option("--layer", copt.base_layer, "base layer id");
  cluster->add_option("--samples", copt.sample_count, "number of samples N")->check(CLI::PositiveNumber);
  cluster->add_option("--kmeans-seed", copt.kmeans_seed, "k-means seed");
  cluster->add_option("--first-seed", copt.first_sample_seed, "latent seed of the first sample");
  cluster->add_option("--max-iter", copt.max_iter, "k-means iteration cap")->check(CLI::PositiveNumber);
  cluster->add_option("--captures", cluster_captures, "captures archive written by `gen --captures`");

  // attribute
  auto* attribute = app.add_subcommand("attribute", "compute per-layer channel attribution for a catalog");
  std::optional<std::string> attribute_captures;
  attribute->add_option("--captures", attribute_captures, "captures archive (default: re-render the samples)");

  // edit
  auto* edit = app.add_subcommand("edit", "run one edit and write images, diff map and locality");
  std::uint64_t target_seed = 0;
  std::uint64_t ref_seed = 1;
  std::string part;
  std::string mode_text = "sequential";
  editor::EditParams params;
  std::string edit_out = "edit";
  edit->add_option("--target-seed", target_seed, "latent seed of the target")->required();
  edit->add_option("--ref-seed", ref_seed, "latent seed of the reference")->required();
  edit->add_option("--part", part, "part id, part label or cluster:<k>")->required();
  edit->add_option("--mode", mode_text, "global, simultaneous or sequential")
      ->check(CLI::IsMember({"global", "simultaneous", "sequential"}));
  edit->add_option("--lambda", params.lambda, "interpolation strength (global, simultaneous)");
  edit->add_option("--epsilon", params.epsilon, "budget (sequential)");
  edit->add_option("--rho-ratio", params.rho_ratio, "eligibility threshold (sequential)");
  edit->add_option("--out", edit_out, "output directory");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "sweep epsilon or lambda over many pairs and write In/Out-MSE CSV");
  std::string sweep_mode = "sequential";
  std::optional<std::string> epsilons;
  std::optional<std::string> lambdas;
  std::size_t pairs = 100;
  std::string parts_spec = "auto";
  std::uint64_t pair_first = 100000;
  double sweep_rho = editor::kDefaultRhoRatio;
  std::string sweep_out = "sweep";
  sweep->add_option("--mode", sweep_mode, "sequential, simultaneous or global")
      ->check(CLI::IsMember({"global", "simultaneous", "sequential"}));
  auto* eps_opt = sweep->add_option("--epsilons", epsilons, "comma-separated epsilon grid (sequential)");
  auto* lam_opt = sweep->add_option("--lambdas", lambdas, "comma-separated lambda grid");
  eps_opt->excludes(lam_opt);
  sweep->add_option("--pairs", pairs, "number of target/reference pairs")->check(CLI::PositiveNumber);
  sweep->add_option("--parts", parts_spec, "'auto' or one part selector");
  sweep->add_option("--first-seed", pair_first, "pair i uses seeds first+2i (target), first+2i+1 (reference)");
  sweep->add_option("--rho-ratio", sweep_rho, "eligibility threshold (sequential)");
  sweep->add_option("--out", sweep_out, "output directory");

  // frechet
  auto* frechet = app.add_subcommand("frechet", "Frechet distance between two image sets");
  std::string set_a;
  std::string set_b;
  std::size_t grid = 8;
  frechet->add_option("a", set_a, "archive with an 'images' array (N, 3, H, W)")->required();
  frechet->add_option("b", set_b, "archive with an 'images' array (N, 3, H, W)")->required();
  frechet->add_option("--grid", grid, "pooling grid of the feature extractor")->check(CLI::PositiveNumber);

  // serve
  auto* serve = app.add_subcommand("serve", "start the HTTP/JSON service");
  int port = 8080;
  std::string host = "0.0.0.0";
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "bind address");

  auto fail = [&](int code, const std::string& name, const std::string& message) {
    if (common.json_errors) {
      err << json{{"error", {{"code", name}, {"message", message}}}}.dump() << "\n";
    } else {
      err << "error: " << message << "\n";
    }
    return code;
  };

  try {
    app.parse(argc, argv);
    if (sweep->parsed() && !epsilons && !lambdas) {
      throw CLI::RequiredError("--epsilons or --lambdas");
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail(2, "UsageError", e.what());
  }

  try {
    if (gen->parsed()) {
      const auto g = make_generator(common.gen_seed);
      std::set<int> layers;
      if (gen_captures) layers = minigen::all_layers(g.config());
      const auto batch = pipeline::render_batch(g, gen_first, gen_count, layers);
      const fs::path dir = gen_out;
      fs::create_directories(dir);
      for (std::size_t i = 0; i < batch.images.size(); ++i) {
        write_bytes(dir / ("sample_" + std::to_string(batch.seeds[i]) + ".png"), image_io::image_png(batch.images[i]));
      }
      npy::ArrayMap styles;
      for (std::size_t l = 0; l < g.config().layers(); ++l) {
        NdArray a;
        a.shape = {batch.styles.size(), batch.styles.empty() ? 0 : batch.styles[0].sigma[l].size()};
        for (const auto& s : batch.styles) a.data.insert(a.data.end(), s.sigma[l].begin(), s.sigma[l].end());
        styles["sigma_l" + std::to_string(l)] = std::move(a);
      }
      npy::save_archive(dir / "styles.npz", styles);
      npy::save_archive(dir / "images.npz", {{"images", images_array(batch.images)}});
      if (gen_captures) {
        npy::ArrayMap caps;
        for (const auto& [layer, t] : batch.captures) caps[capture_key(layer)] = to_ndarray(t.tensor);
        npy::save_archive(dir / "captures.npz", caps);
      }
      out << json{{"samples", batch.images.size()}, {"out", dir.string()}, {"weight_checksum", g.weight_checksum()}}.dump()
          << "\n";
      return 0;
    }

    if (cluster->parsed()) {
      pipeline::ClusterOutcome outcome;
      if (cluster_captures) {
        const auto captures = captures_from_archive(*cluster_captures);
        const int base = copt.base_layer.value_or(minigen::GeneratorConfig{}.base_layer);
        if (!captures.contains(base)) {
          throw Error(ErrorCode::kMissingLayerAttribution, "captures archive has no layer " + std::to_string(base));
        }
        Provenance prov{copt.kmeans_seed, captures.at(base).tensor.shape().n, common.gen_seed, copt.first_sample_seed};
        outcome = pipeline::catalog_from_captures(
            captures, base, semantics::KMeansOptions{copt.k, copt.kmeans_seed, copt.max_iter, copt.tol}, prov);
      } else {
        copt.attribute_all_layers = false;
        outcome = pipeline::build_catalog(make_generator(common.gen_seed, copt.base_layer), copt);
      }
      save_catalog(outcome.catalog, common.catalog_dir());
      auto summary = cluster_summary(outcome.catalog);
      summary["iterations"] = outcome.iterations;
      summary["objective"] = outcome.objective.empty() ? json(nullptr) : json(outcome.objective.back());
      summary["catalog"] = common.catalog_dir().string();
      out << summary.dump() << "\n";
      return 0;
    }

    if (attribute->parsed()) {
      const auto catalog = load_catalog(common.catalog_dir());
      const auto next = attribute_captures ? pipeline::attribute_catalog(catalog, captures_from_archive(*attribute_captures))
                                           : pipeline::attribute_catalog(catalog, generator_for(catalog));
      save_catalog(next, common.catalog_dir());
      out << cluster_summary(next).dump() << "\n";
      return 0;
    }

    if (edit->parsed()) {
      const auto catalog = load_catalog(common.catalog_dir());
      const auto g = generator_for(catalog);
      editor::EditRequest req;
      req.target = target_seed;
      req.reference = ref_seed;
      req.part = select_part(catalog, part);
      req.params = params;
      req.params.mode = editor::parse_mode(mode_text);
      editor::validate(req.params);
      const auto report = pipeline::run_edit(g, catalog, req);
      const fs::path dir = edit_out;
      fs::create_directories(dir);
      write_bytes(dir / "target.png", image_io::image_png(report.result.target.image));
      write_bytes(dir / "reference.png", image_io::image_png(report.result.reference.image));
      write_bytes(dir / "edited.png", image_io::image_png(report.result.edited.image));
      image_io::write_heatmap(dir / "diff", report.diff);
      npy::ArrayMap qs;
      for (const auto& [layer, q] : report.result.q) {
        qs["q_l" + std::to_string(layer)] = NdArray{{q.q.size()}, std::vector<float>(q.q.begin(), q.q.end())};
      }
      npy::save_archive(dir / "q.npz", qs);
      json summary = json::array();
      for (const auto& s : report.q_summary) {
        summary.push_back({{"layer", s.layer}, {"support", s.support}, {"sum_q", s.sum_q}, {"budget_used", s.budget_used}});
      }
      json loc = locality_json(report.locality);
      loc["part"] = report.mask.part;
      loc["mode"] = editor::to_string(req.params.mode);
      loc["q_summary"] = summary;
      write_text(dir / "locality.json", loc.dump(2) + "\n");
      out << loc.dump() << "\n";
      return 0;
    }

    if (sweep->parsed()) {
      const auto catalog = load_catalog(common.catalog_dir());
      const auto g = generator_for(catalog);
      const auto mode = editor::parse_mode(sweep_mode);
      std::vector<double> grid_values;
      try {
        grid_values = parse_grid(epsilons ? *epsilons : *lambdas);
      } catch (const CLI::ValidationError& e) {
        return fail(2, "UsageError", e.what());
      }
      if (epsilons && mode != editor::EditMode::kSequential) {
        return fail(2, "UsageError", "--epsilons applies to --mode sequential; use --lambdas");
      }
      if (lambdas && mode == editor::EditMode::kSequential) {
        return fail(2, "UsageError", "--lambdas applies to global/simultaneous; use --epsilons");
      }
      const auto candidates =
          parts_spec == "auto" ? pipeline::default_parts(catalog) : std::vector<PartSelection>{select_part(catalog, parts_spec)};
      const fs::path dir = sweep_out;
      fs::create_directories(dir);
      std::ofstream csv(dir / "sweep.csv");
      std::ofstream qcsv(dir / "q_usage.csv");
      csv << std::setprecision(17) << "mode,epsilon_or_lambda,pair_id,part_id,in_mse,out_mse\n";
      qcsv << std::setprecision(17) << "mode,epsilon_or_lambda,pair_id,part_id,layer,support,sum_q,budget_used\n";
      std::size_t used = 0;
      for (std::size_t i = 0; i < pairs; ++i) {
        const auto pair = pipeline::prepare_pair_auto(g, catalog, i, pair_first + 2 * i, pair_first + 2 * i + 1, candidates);
        if (!pair) continue;
        ++used;
        for (double v : grid_values) {
          editor::EditParams p;
          p.mode = mode;
          p.rho_ratio = sweep_rho;
          (mode == editor::EditMode::kSequential ? p.epsilon : p.lambda) = v;
          editor::validate(p);
          const auto ev = pipeline::evaluate_pair(g, catalog, *pair, p);
          auto cell = [](const std::optional<double>& x) {
            std::ostringstream os;
            if (x) os << std::setprecision(17) << *x;
            return os.str();
          };
          csv << sweep_mode << ',' << v << ',' << i << ',' << pair->part.name << ',' << cell(ev.locality.in_mse) << ','
              << cell(ev.locality.out_mse) << '\n';
          for (const auto& s : ev.q_summary) {
            qcsv << sweep_mode << ',' << v << ',' << i << ',' << pair->part.name << ',' << s.layer << ',' << s.support
                 << ',' << s.sum_q << ',' << s.budget_used << '\n';
          }
        }
      }
      if (!csv || !qcsv) throw Error(ErrorCode::kIoError, "cannot write sweep CSVs under " + dir.string());
      out << json{{"pairs", used}, {"grid", grid_values}, {"csv", (dir / "sweep.csv").string()},
                  {"q_usage", (dir / "q_usage.csv").string()}}
                 .dump()
          << "\n";
      return 0;
    }

    if (frechet->parsed()) {
      auto load_images = [](const std::string& path) {
        const auto arrays = npy::load_archive(path);
        const auto it = arrays.find("images");
        if (it == arrays.end()) throw Error(ErrorCode::kBadArchive, path + " has no 'images' array");
        return images_from_array(it->second);
      };
      auto stats = [&](const std::vector<Image>& images) {
        std::vector<std::vector<double>> features;
        for (const auto& im : images) features.push_back(metrics::pooled_features(im, grid));
        return metrics::gaussian_stats(features);
      };
      const double d = metrics::frechet_distance(stats(load_images(set_a)), stats(load_images(set_b)));
      out << json{{"frechet", d}}.dump() << "\n";
      return 0;
    }

    if (serve->parsed()) {
      service::Service svc(common.catalog_dir());
      out << "serving " << common.catalog_dir().string() << " on http://" << host << ":" << port << "\n" << std::flush;
      svc.serve(host, port);
      return 0;
    }
  } catch (const Error& e) {
    return fail(1, std::string(error_code_name(e.code())), e.what());
  } catch (const std::exception& e) {
    return fail(1, "Internal", e.what());
  }
  return 2;
}

}  // namespace ganlocal::cli
