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

#include "actipol/service.hpp"

#include <functional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "actipol/errors.hpp"

namespace actipol {

namespace {

using nlohmann::ordered_json;

void reply_json(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& what) {
  reply_json(res, status, ordered_json{{"error", what}});
}

/// Runs a handler body and maps engine errors onto HTTP status codes.
void guarded(httplib::Response& res, const std::function<void()>& body) {
  try {
    body();
  } catch (const UnknownActivityError& e) {
    reply_error(res, 404, e.what());
  } catch (const IllegalTransitionError& e) {
    reply_error(res, 409, e.what());
  } catch (const TransactionBusyError& e) {
    reply_error(res, 409, e.what());
  } catch (const JsonSyntaxError& e) {
    reply_error(res, 400, e.what());
  } catch (const SchemaViolationError& e) {
    reply_error(res, 400, e.what());
  } catch (const InvariantViolationError& e) {
    reply_error(res, 400, e.what());
  } catch (const Error& e) {
    reply_error(res, 500, e.what());
  }
}

std::string required_param(const httplib::Request& req,
                           const std::string& name) {
  if (!req.has_param(name) || req.get_param_value(name).empty()) {
    throw SchemaViolationError("missing query parameter: " + name);
  }
  return req.get_param_value(name);
}

ordered_json activity_json(const ActivityRecord& rec) {
  return ordered_json{{"id", rec.id},
                      {"state", std::string(to_string(rec.state))},
                      {"mutable", rec.is_mutable}};
}

ActivityRecord activity_from_json(const ordered_json& item) {
  if (!item.is_object() || !item.contains("id") || !item.contains("state") ||
      !item.contains("mutable") || !item.at("id").is_string() ||
      !item.at("state").is_string() || !item.at("mutable").is_boolean()) {
    throw SchemaViolationError(
        "activity record must be {\"id\", \"state\", \"mutable\"}");
  }
  ActivityRecord rec;
  rec.id = item.at("id").get<std::string>();
  rec.state = activity_state_from_string(item.at("state").get<std::string>());
  rec.is_mutable = item.at("mutable").get<bool>();
  return rec;
}

DependencySpec dependency_from_json(const ordered_json& item) {
  if (!item.is_object() || !item.contains("subject") ||
      !item.contains("phase") || !item.contains("dependent") ||
      !item.contains("desired_state")) {
    throw SchemaViolationError(
        "dependency must be {\"subject\", \"phase\", \"dependent\", "
        "\"desired_state\"}");
  }
  DependencySpec spec;
  spec.subject = item.at("subject").get<std::string>();
  spec.phase = phase_from_string(item.at("phase").get<std::string>());
  spec.dependent = item.at("dependent").get<std::string>();
  spec.desired_state =
      activity_state_from_string(item.at("desired_state").get<std::string>());
  return spec;
}

/// Admin PUT bodies carry either a single record or an array of records.
template <typename Item>
int upsert_body(Store& store, const std::string& body,
                Item (*parse)(const ordered_json&)) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(body);
  } catch (const ordered_json::parse_error& e) {
    throw JsonSyntaxError(std::string("body is not valid JSON: ") + e.what());
  }
  std::vector<Item> items;
  if (doc.is_array()) {
    for (const ordered_json& item : doc) items.push_back(parse(item));
  } else {
    items.push_back(parse(doc));
  }
  for (const Item& item : items) store.admin_upsert(item);
  return static_cast<int>(items.size());
}

}  // namespace

std::string to_wire_json(const ResponseContext& resp) {
  ordered_json body;
  body["decision"] = std::string(to_string(resp.decision));
  body["activity"] = resp.activity;
  body["state"] = std::string(to_string(resp.final_state));
  body["obligations"] = resp.obligations_fulfilled;
  if (!resp.reason.empty()) body["reason"] = resp.reason;
  body["elapsed_ms"] = resp.elapsed_ms;
  return body.dump();
}

Service::Service(Store& store, Engine& engine)
    : store_(store), engine_(engine) {}

void Service::attach(httplib::Server& server) {
  // Decision requests are tiny; without this the loopback pays the
  // Nagle-plus-delayed-ACK penalty on every response.
  server.set_tcp_nodelay(true);

  server.Get("/v1/decide", [this](const httplib::Request& req,
                                  httplib::Response& res) {
    guarded(res, [&] {
      ActivityRequest request;
      request.subject = required_param(req, "subject");
      request.activity = required_param(req, "activity");
      ActionId action = action_id_from_string(required_param(req, "action"));
      if (!is_external_action(action)) {
        throw SchemaViolationError("action is internal-only: " +
                                   std::string(to_string(action)));
      }
      request.action = action;
      ResponseContext resp = engine_.handle_request(request);
      res.status = 200;
      res.set_content(to_wire_json(resp), "application/json");
    });
  });

  server.Get("/v1/activities/([^/]+)", [this](const httplib::Request& req,
                                              httplib::Response& res) {
    guarded(res, [&] {
      ActivityRecord rec = store_.get_activity(req.matches[1]);
      reply_json(res, 200, activity_json(rec));
    });
  });

  server.Put("/v1/admin/activities", [this](const httplib::Request& req,
                                            httplib::Response& res) {
    guarded(res, [&] {
      int n = upsert_body<ActivityRecord>(store_, req.body,
                                          &activity_from_json);
      reply_json(res, 200, ordered_json{{"status", "ok"}, {"updated", n}});
    });
  });

  server.Put("/v1/admin/dependencies", [this](const httplib::Request& req,
                                              httplib::Response& res) {
    guarded(res, [&] {
      int n = upsert_body<DependencySpec>(store_, req.body,
                                          &dependency_from_json);
      reply_json(res, 200, ordered_json{{"status", "ok"}, {"updated", n}});
    });
  });

  server.Get("/v1/reports/continuity/([^/]+)",
             [this](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 std::string id = req.matches[1];
                 auto report = engine_.continuity_report(id);
                 if (!report) {
                   reply_error(res, 404,
                               "no continuity report for activity: " + id);
                   return;
                 }
                 res.status = 200;
                 res.set_content(to_json(*report), "application/json");
               });
             });

  server.Get("/healthz", [this](const httplib::Request&,
                                httplib::Response& res) {
    size_t policies = engine_.policy_set().policies.size();
    reply_json(res, 200,
               ordered_json{{"status", "ok"}, {"policies", policies}});
  });
}

bool Service::listen(const std::string& host, int port) {
  httplib::Server server;
  attach(server);
  return server.listen(host, port);
}

}  // namespace actipol
