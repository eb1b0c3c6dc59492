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

#ifndef ACTIPOL_CONFIG_HPP
#define ACTIPOL_CONFIG_HPP

#include <string>

#include "actipol/engine.hpp"

namespace actipol {

/// Runtime settings for the service and the CLI front ends. Values come
/// from built-in defaults, then an optional JSON file, then ACTIPOL_*
/// environment variables, each layer overriding the previous one.
struct ServiceConfig {
  std::string policy_file = "policies/xacml_ad_policyset.xml";
  std::string fixture_file;
  ContinuityConfig continuity{10, 5};
  int chain_depth_limit = 2;
  std::string listen_address = "127.0.0.1:8080";

  EngineConfig engine_config() const {
    return EngineConfig{continuity, chain_depth_limit};
  }
};

/// Parses a config document. Unknown keys and wrong types are rejected.
ServiceConfig parse_service_config(const std::string& json_text);

/// Loads `path` (when non-empty) and applies environment overrides:
/// ACTIPOL_POLICY_FILE, ACTIPOL_FIXTURE_FILE, ACTIPOL_REPETITIONS,
/// ACTIPOL_INTERVAL_MS, ACTIPOL_CHAIN_DEPTH_LIMIT, ACTIPOL_LISTEN_ADDRESS.
ServiceConfig load_service_config(const std::string& path = "");

/// Splits "host:port", validating the port range.
void split_listen_address(const std::string& address, std::string& host,
                          int& port);

}  // namespace actipol

#endif  // ACTIPOL_CONFIG_HPP
