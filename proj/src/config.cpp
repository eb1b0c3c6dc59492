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

#include "actipol/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "actipol/errors.hpp"

namespace actipol {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      throw SchemaViolationError("unknown config key in " + where + ": " +
                                 it.key());
    }
  }
}

std::string string_field(const json& obj, const std::string& key,
                         const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) {
    throw SchemaViolationError("config key '" + key + "' must be a string");
  }
  return obj.at(key).get<std::string>();
}

int int_field(const json& obj, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_integer()) {
    throw SchemaViolationError("config key '" + key + "' must be an integer");
  }
  return obj.at(key).get<int>();
}

int int_from_env(const char* name, const std::string& text) {
  try {
    size_t used = 0;
    int value = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw InvariantViolationError(std::string(name) +
                                  " must be an integer, got: " + text);
  }
}

void validate(const ServiceConfig& cfg) {
  if (cfg.policy_file.empty()) {
    throw InvariantViolationError("policy_file must not be empty");
  }
  if (cfg.continuity.repetitions < 1) {
    throw InvariantViolationError("continuity repetitions must be >= 1");
  }
  if (cfg.continuity.interval_ms < 0) {
    throw InvariantViolationError("continuity interval_ms must be >= 0");
  }
  if (cfg.chain_depth_limit < 1) {
    throw InvariantViolationError("chain_depth_limit must be >= 1");
  }
  std::string host;
  int port = 0;
  split_listen_address(cfg.listen_address, host, port);
}

}  // namespace

ServiceConfig parse_service_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw JsonSyntaxError(std::string("config is not valid JSON: ") +
                          e.what());
  }
  if (!doc.is_object()) {
    throw SchemaViolationError("config document must be a JSON object");
  }
  reject_unknown_keys(doc,
                      {"policy_file", "fixture_file", "continuity",
                       "chain_depth_limit", "listen_address"},
                      "config");

  ServiceConfig cfg;
  cfg.policy_file = string_field(doc, "policy_file", cfg.policy_file);
  cfg.fixture_file = string_field(doc, "fixture_file", cfg.fixture_file);
  cfg.listen_address =
      string_field(doc, "listen_address", cfg.listen_address);
  cfg.chain_depth_limit =
      int_field(doc, "chain_depth_limit", cfg.chain_depth_limit);
  if (doc.contains("continuity")) {
    const json& cont = doc.at("continuity");
    if (!cont.is_object()) {
      throw SchemaViolationError("config key 'continuity' must be an object");
    }
    reject_unknown_keys(cont, {"repetitions", "interval_ms"},
                        "config continuity");
    cfg.continuity.repetitions =
        int_field(cont, "repetitions", cfg.continuity.repetitions);
    cfg.continuity.interval_ms =
        int_field(cont, "interval_ms", cfg.continuity.interval_ms);
  }
  validate(cfg);
  return cfg;
}

ServiceConfig load_service_config(const std::string& path) {
  ServiceConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    cfg = parse_service_config(buf.str());
  }

  if (const char* v = std::getenv("ACTIPOL_POLICY_FILE")) cfg.policy_file = v;
  if (const char* v = std::getenv("ACTIPOL_FIXTURE_FILE")) {
    cfg.fixture_file = v;
  }
  if (const char* v = std::getenv("ACTIPOL_REPETITIONS")) {
    cfg.continuity.repetitions = int_from_env("ACTIPOL_REPETITIONS", v);
  }
  if (const char* v = std::getenv("ACTIPOL_INTERVAL_MS")) {
    cfg.continuity.interval_ms = int_from_env("ACTIPOL_INTERVAL_MS", v);
  }
  if (const char* v = std::getenv("ACTIPOL_CHAIN_DEPTH_LIMIT")) {
    cfg.chain_depth_limit = int_from_env("ACTIPOL_CHAIN_DEPTH_LIMIT", v);
  }
  if (const char* v = std::getenv("ACTIPOL_LISTEN_ADDRESS")) {
    cfg.listen_address = v;
  }
  validate(cfg);
  return cfg;
}

void split_listen_address(const std::string& address, std::string& host,
                          int& port) {
  size_t colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 ||
      colon + 1 == address.size()) {
    throw InvariantViolationError("listen_address must be host:port, got: " +
                                  address);
  }
  host = address.substr(0, colon);
  port = int_from_env("listen_address port", address.substr(colon + 1));
  if (port < 1 || port > 65535) {
    throw InvariantViolationError("listen_address port out of range: " +
                                  std::to_string(port));
  }
}

}  // namespace actipol
