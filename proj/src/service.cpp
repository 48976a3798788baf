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

#include "ganlocal/service.hpp"

#include <charconv>
#include <regex>

#include "httplib.h"
#include "json.hpp"

#include "ganlocal/error.hpp"
#include "ganlocal/image_io.hpp"
#include "ganlocal/pipeline.hpp"

namespace ganlocal::service {
namespace {

using nlohmann::json;

Response json_response(int status, const json& body) {
  return Response{status, "application/json", body.dump()};
}

Response error_response(int status, const std::string& code, const std::string& message,
                        const json& fields = nullptr) {
  json err = {{"code", code}, {"message", message}};
  if (!fields.is_null()) err["fields"] = fields;
  return json_response(status, {{"error", err}});
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownCluster:
    case ErrorCode::kUnknownPart: return 404;
    case ErrorCode::kAlreadyAssigned: return 409;
    case ErrorCode::kInvalidArgument: return 400;
    default: return 500;
  }
}

std::optional<std::size_t> parse_index(const std::string& s) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json catalog_to_json(const SemanticCatalog& c) {
  json j;
  j["base_layer_id"] = c.base_layer_id;
  j["k"] = c.k;
  j["base_size"] = {c.base_h, c.base_w};
  j["clusters"] = json::array();
  for (const auto& cl : c.clusters) {
    j["clusters"].push_back({{"id", cl.id},
                             {"label", cl.label},
                             {"merged_into", cl.merged_into ? json(*cl.merged_into) : json(nullptr)},
                             {"color", image_io::kPalette[static_cast<std::size_t>(cl.id) % image_io::kPalette.size()]}});
  }
  j["parts"] = json::array();
  for (const auto& p : c.parts) {
    j["parts"].push_back({{"part_id", p.part_id}, {"label", p.label}, {"members", p.members}});
  }
  j["attributions"] = json::array();
  for (const auto& [layer, m] : c.attributions) {
    j["attributions"].push_back({{"layer", layer}, {"channels", m.c}});
  }
  j["provenance"] = {{"kmeans_seed", c.provenance.kmeans_seed},
                     {"sample_count", c.provenance.sample_count},
                     {"generator_seed", c.provenance.generator_seed},
                     {"first_sample_seed", c.provenance.first_sample_seed}};
  return j;
}

json parse_body(const Request& r) {
  try {
    return json::parse(r.body);
  } catch (const json::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "request body is not valid JSON");
  }
}

minigen::GeneratorConfig generator_config_for(const SemanticCatalog& c) {
  minigen::GeneratorConfig cfg;
  cfg.seed = c.provenance.generator_seed;
  cfg.base_layer = c.base_layer_id;
  return cfg;
}

}  // namespace

struct Service::Server {
  httplib::Server http;
};

Service::Service(std::filesystem::path catalog_dir)
    : catalog_dir_(std::move(catalog_dir)),
      catalog_(std::make_shared<const SemanticCatalog>(load_catalog(catalog_dir_))),
      generator_(generator_config_for(*catalog_)) {}

std::shared_ptr<const SemanticCatalog> Service::snapshot() const {
  std::shared_lock lock(snapshot_mutex_);
  return catalog_;
}

void Service::commit(SemanticCatalog next) {
  save_catalog(next, catalog_dir_);
  auto fresh = std::make_shared<const SemanticCatalog>(std::move(next));
  std::unique_lock lock(snapshot_mutex_);
  catalog_ = std::move(fresh);
}

std::shared_ptr<const Service::SampleView> Service::sample(std::size_t id) {
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  }
  const auto cat = snapshot();
  const std::size_t plane = cat->base_h * cat->base_w;
  auto view = std::make_shared<SampleView>();
  const auto render = generator_.render(
      minigen::latent_from_seed(cat->provenance.first_sample_seed + id, generator_.config().latent_dim));
  view->image = render.image;
  std::vector<int> labels(cat->base_labels.begin() + static_cast<std::ptrdiff_t>(id * plane),
                          cat->base_labels.begin() + static_cast<std::ptrdiff_t>((id + 1) * plane));
  view->membership = one_hot(labels, 1, cat->k, cat->base_h, cat->base_w);
  std::lock_guard lock(cache_mutex_);
  return cache_.emplace(id, std::move(view)).first->second;
}

Response Service::handle(const Request& r) {
  static const std::regex kSampleImage(R"(^/api/samples/([0-9]+)/image$)");
  static const std::regex kSampleMembership(R"(^/api/samples/([0-9]+)/membership$)");
  try {
    std::smatch m;
    if (r.method == "GET" && r.path == "/api/health") return json_response(200, {{"status", "ok"}});
    if (r.method == "GET" && r.path == "/api/samples") return samples(r);
    if (r.method == "GET" && r.path == "/api/catalog") return catalog_json();
    if (r.method == "PUT" && r.path == "/api/catalog/labels") return put_label(r);
    if (r.method == "POST" && r.path == "/api/catalog/parts") return post_part(r);
    if (r.method == "POST" && r.path == "/api/edit") return post_edit(r);
    const bool image = std::regex_match(r.path, m, kSampleImage);
    if (r.method == "GET" && (image || std::regex_match(r.path, m, kSampleMembership))) {
      const auto id = parse_index(m[1].str());
      if (!id || *id >= snapshot()->provenance.sample_count) {
        return error_response(404, "UnknownSample", "no sample " + m[1].str());
      }
      return image ? sample_image(*id) : sample_membership(*id, r);
    }
    return error_response(404, "NotFound", r.method + " " + r.path);
  } catch (const Error& e) {
    return error_response(status_for(e.code()), std::string(error_code_name(e.code())), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

Response Service::samples(const Request& r) {
  const auto cat = snapshot();
  std::size_t offset = 0;
  std::size_t limit = cat->provenance.sample_count;
  if (auto it = r.query.find("offset"); it != r.query.end()) {
    auto v = parse_index(it->second);
    if (!v) return error_response(400, "ValidationError", "bad offset", {{"offset", "must be a non-negative integer"}});
    offset = *v;
  }
  if (auto it = r.query.find("limit"); it != r.query.end()) {
    auto v = parse_index(it->second);
    if (!v) return error_response(400, "ValidationError", "bad limit", {{"limit", "must be a non-negative integer"}});
    limit = *v;
  }
  json list = json::array();
  for (std::size_t id = offset; id < cat->provenance.sample_count && id < offset + limit; ++id) {
    const auto view = sample(id);
    list.push_back({{"id", id},
                    {"seed", cat->provenance.first_sample_seed + id},
                    {"thumbnail", "data:image/png;base64," + image_io::base64_encode(image_io::image_png(view->image))}});
  }
  return json_response(200, {{"samples", list}, {"total", cat->provenance.sample_count}});
}

Response Service::sample_image(std::size_t id) {
  const auto png = image_io::image_png(sample(id)->image);
  return Response{200, "image/png", std::string(png.begin(), png.end())};
}

Response Service::sample_membership(std::size_t id, const Request& r) {
  const auto view = sample(id);
  MembershipTensor u = view->membership;
  if (auto it = r.query.find("layer"); it != r.query.end()) {
    const auto layer = parse_index(it->second);
    const auto& cfg = generator_.config();
    if (!layer || *layer >= cfg.layers()) {
      return error_response(400, "ValidationError", "bad layer", {{"layer", "must name a styled layer"}});
    }
    const std::size_t res = cfg.resolutions[*layer];
    u = resample_membership(u, res, res);
  }
  const auto png = image_io::membership_overlay_png(view->image, u);
  return Response{200, "image/png", std::string(png.begin(), png.end())};
}

Response Service::catalog_json() const { return json_response(200, catalog_to_json(*snapshot())); }

Response Service::put_label(const Request& r) {
  const json body = parse_body(r);
  json fields = json::object();
  if (!body.contains("cluster_id") || !body["cluster_id"].is_number_integer()) fields["cluster_id"] = "required integer";
  if (!body.contains("label") || !body["label"].is_string()) fields["label"] = "required string";
  if (!fields.empty()) return error_response(400, "ValidationError", "invalid label request", fields);
  std::lock_guard writer(writer_mutex_);
  auto next = set_label(*snapshot(), body["cluster_id"].get<int>(), body["label"].get<std::string>());
  commit(std::move(next));
  return catalog_json();
}

Response Service::post_part(const Request& r) {
  const json body = parse_body(r);
  json fields = json::object();
  if (!body.contains("label") || !body["label"].is_string()) fields["label"] = "required string";
  if (!body.contains("cluster_ids") || !body["cluster_ids"].is_array() || body["cluster_ids"].empty()) {
    fields["cluster_ids"] = "required non-empty array of integers";
  } else {
    for (const auto& v : body["cluster_ids"]) {
      if (!v.is_number_integer()) fields["cluster_ids"] = "required non-empty array of integers";
    }
  }
  if (!fields.empty()) return error_response(400, "ValidationError", "invalid part request", fields);
  std::lock_guard writer(writer_mutex_);
  auto next = merge_clusters(*snapshot(), body["cluster_ids"].get<std::vector<int>>(), body["label"].get<std::string>());
  const Part created = next.parts.back();
  commit(std::move(next));
  return json_response(201, {{"part_id", created.part_id}, {"label", created.label}, {"members", created.members}});
}

Response Service::post_edit(const Request& r) {
  const json body = parse_body(r);
  json fields = json::object();
  auto seed_field = [&](const char* key) -> std::uint64_t {
    if (!body.contains(key) || !body[key].is_number_integer() || body[key].get<std::int64_t>() < 0) {
      fields[key] = "required non-negative integer seed";
      return 0;
    }
    return body[key].get<std::uint64_t>();
  };
  auto number_field = [&](const char* key, double fallback) -> double {
    if (!body.contains(key) || body[key].is_null()) return fallback;
    if (!body[key].is_number()) {
      fields[key] = "must be a number";
      return fallback;
    }
    return body[key].get<double>();
  };
  editor::EditRequest req;
  req.target = seed_field("target");
  req.reference = seed_field("reference");
  if (!body.contains("mode") || !body["mode"].is_string()) {
    fields["mode"] = "required: global, simultaneous or sequential";
  } else {
    try {
      req.params.mode = editor::parse_mode(body["mode"].get<std::string>());
    } catch (const Error&) {
      fields["mode"] = "must be global, simultaneous or sequential";
    }
  }
  req.params.lambda = number_field("lambda", 1.0);
  req.params.epsilon = number_field("epsilon", editor::kDefaultEpsilon);
  req.params.rho_ratio = number_field("rho_ratio", editor::kDefaultRhoRatio);
  if (!fields.contains("mode")) {
    try {
      editor::validate(req.params);
    } catch (const Error& e) {
      const char* key = req.params.mode == editor::EditMode::kSequential
                            ? (req.params.epsilon >= 0.0 ? "rho_ratio" : "epsilon")
                            : "lambda";
      fields[key] = e.what();
    }
  }
  const bool has_part = body.contains("part_id") && (body["part_id"].is_number_integer() || body["part_id"].is_string());
  if (!has_part) fields["part_id"] = "required part id (integer) or selector string";
  if (!fields.empty()) return error_response(400, "ValidationError", "invalid edit request", fields);

  const auto cat = snapshot();
  req.part = body["part_id"].is_number_integer() ? select_part(*cat, body["part_id"].get<int>())
                                                 : select_part(*cat, body["part_id"].get<std::string>());
  const auto report = pipeline::run_edit(generator_, *cat, req);
  const auto heat = image_io::diff_heatmap(report.diff);
  json q = json::array();
  for (const auto& s : report.q_summary) {
    q.push_back({{"layer", s.layer}, {"support", s.support}, {"sum_q", s.sum_q}, {"budget_used", s.budget_used}});
  }
  return json_response(200, {{"edited_png_base64", image_io::base64_encode(image_io::image_png(report.result.edited.image))},
                             {"diff_png_base64", image_io::base64_encode(heat.png)},
                             {"diff_max", heat.max_value},
                             {"part", report.mask.part},
                             {"locality",
                              {{"in_mse", optional_number(report.locality.in_mse)},
                               {"out_mse", optional_number(report.locality.out_mse)},
                               {"roi_fraction", report.locality.roi_fraction}}},
                             {"q_summary", q}});
}

namespace {

void install(httplib::Server& http, Service& svc) {
  auto adapt = [&svc](const httplib::Request& req, httplib::Response& res) {
    Request r{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    const Response out = svc.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  const std::string any = R"(/api/.*)";
  http.Get(any, adapt);
  http.Put(any, adapt);
  http.Post(any, adapt);
}

}  // namespace

void Service::serve(const std::string& host, int port) {
  server_ = std::make_shared<Server>();
  install(server_->http, *this);
  if (!server_->http.listen(host, port)) {
    throw Error(ErrorCode::kIoError, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

int Service::bind_any_port(const std::string& host) {
  server_ = std::make_shared<Server>();
  install(server_->http, *this);
  const int port = server_->http.bind_to_any_port(host);
  if (port <= 0) throw Error(ErrorCode::kIoError, "cannot bind " + host);
  return port;
}

void Service::listen_after_bind() {
  if (server_) server_->http.listen_after_bind();
}

void Service::stop() {
  if (server_) server_->http.stop();
}

}  // namespace ganlocal::service
