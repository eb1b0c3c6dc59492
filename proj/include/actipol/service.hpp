// Copyright 2026 The Actipol Authors
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

#ifndef ACTIPOL_SERVICE_HPP
#define ACTIPOL_SERVICE_HPP

#include <string>

#include "actipol/engine.hpp"

namespace httplib {
class Server;
}

namespace actipol {

/// Serializes a decided request to the wire schema. `reason` is included
/// only when the engine attached one.
std::string to_wire_json(const ResponseContext& resp);

/// HTTP front end. Decision requests ride on GET to mirror the original
/// prototype's interface; administrative writes use PUT.
class Service {
 public:
  Service(Store& store, Engine& engine);

  /// Registers all routes on an externally owned server.
  void attach(httplib::Server& server);

  /// Binds and serves until the process is stopped. Returns false when the
  /// address cannot be bound.
  bool listen(const std::string& host, int port);

 private:
  Store& store_;
  Engine& engine_;
};

}  // namespace actipol

#endif  // ACTIPOL_SERVICE_HPP
