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

#pragma once

// JSON-over-HTTP front end for the catalog and the editor. Routing is done
// by Service::handle so the API can be exercised without a socket; serve()
// binds it to cpp-httplib.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "ganlocal/catalog.hpp"
#include "ganlocal/minigen.hpp"

namespace ganlocal::service {

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

class Service {
 public:
  // Loads the catalog at catalog_dir; the generator seed comes from the
  // catalog provenance.
  explicit Service(std::filesystem::path catalog_dir);

  Response handle(const Request& request);

  // Blocks serving HTTP until stop() is called.
  void serve(const std::string& host, int port);
  void stop();
  // Binds to an ephemeral port and returns it; call listen_after_bind().
  int bind_any_port(const std::string& host);
  void listen_after_bind();

  std::shared_ptr<const SemanticCatalog> snapshot() const;

 private:
  struct SampleView {
    Image image;
    MembershipTensor membership;  // (1, K, h, w) at the base layer
  };

  Response samples(const Request& r);
  Response sample_image(std::size_t id);
  Response sample_membership(std::size_t id, const Request& r);
  Response catalog_json() const;
  Response put_label(const Request& r);
  Response post_part(const Request& r);
  Response post_edit(const Request& r);

  std::shared_ptr<const SampleView> sample(std::size_t id);
  void commit(SemanticCatalog next);

  std::filesystem::path catalog_dir_;
  mutable std::shared_mutex snapshot_mutex_;
  std::shared_ptr<const SemanticCatalog> catalog_;
  minigen::Generator generator_;
  std::mutex writer_mutex_;

  std::mutex cache_mutex_;
  std::map<std::size_t, std::shared_ptr<const SampleView>> cache_;

  struct Server;
  std::shared_ptr<Server> server_;
};

}  // namespace ganlocal::service
