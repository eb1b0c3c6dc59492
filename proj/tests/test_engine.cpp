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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "actipol/engine.hpp"
#include "actipol/errors.hpp"

using namespace actipol;

namespace {

const PolicySet& corpus() {
  static const PolicySet ps = parse_policy_file(ACTIPOL_POLICY_FILE);
  return ps;
}

void load_smartfarm(Store& store) {
  store.load_fixture_file(std::string(ACTIPOL_FIXTURE_DIR) +
                          "/smartfarm.json");
}

ActivityRequest request(const std::string& activity, ActionId action) {
  return ActivityRequest{"farm-controller", activity, action};
}

std::vector<std::string> read_golden_trace() {
  std::ifstream in(std::string(ACTIPOL_FIXTURE_DIR) + "/golden_trace.txt");
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST_CASE("start permit drives inactive to running and schedules continuity") {
  Store store;
  load_smartfarm(store);
  Engine engine(store, corpus(), EngineConfig{{3, 1}, 2});

  ResponseContext resp =
      engine.handle_request(request("sowing", ActionId::StartActivity));

  CHECK(resp.decision == Decision::Permit);
  CHECK(resp.final_state == ActivityState::Running);
  CHECK(resp.reason.empty());
  REQUIRE(resp.obligations_fulfilled.size() == 2);
  CHECK(resp.obligations_fulfilled[0] == "updateRequestedActivityState");
  CHECK(resp.obligations_fulfilled[1] == "call-continueActivityPolicy");
  CHECK(resp.elapsed_ms >= 0.0);

  // The unmet mutable pre-dependency was provisionally moved to its desired
  // state inside the same commit.
  CHECK(store.get_activity("plowing").state == ActivityState::Finished);

  engine.wait_for_continuity("sowing");
  auto report = engine.continuity_report("sowing");
  REQUIRE(report.has_value());
  CHECK(report->complete);
  CHECK(report->activity == "sowing");
  CHECK(report->stop_reason == "exhausted");
  CHECK(report->iterations.size() == 3);
  for (const ContinuityIteration& it : report->iterations) {
    CHECK(it.decision == Decision::Permit);
  }
  CHECK(store.get_activity("sowing").state == ActivityState::Running);
}

TEST_CASE("start deny aborts the activity and keeps dependencies untouched") {
  Store store;
  load_smartfarm(store);
  store.admin_upsert(ActivityRecord{"plowing", ActivityState::Running, false});
  Engine engine(store, corpus());

  ResponseContext resp =
      engine.handle_request(request("sowing", ActionId::StartActivity));

  CHECK(resp.decision == Decision::Deny);
  CHECK(resp.final_state == ActivityState::Aborted);
  REQUIRE(resp.obligations_fulfilled.size() == 1);
  CHECK(resp.obligations_fulfilled[0] == "updateRequestedActivityState");
  CHECK(store.get_activity("plowing").state == ActivityState::Running);
  CHECK(!engine.continuity_report("sowing").has_value());
}

TEST_CASE("not-applicable start maps to deny with a reason") {
  Store store;
  load_smartfarm(store);
  // Break the chain: plowing can only finish once pump-water runs.
  store.admin_upsert(
      ActivityRecord{"pump-water", ActivityState::Inactive, true});
  Engine engine(store, corpus());

  ResponseContext resp =
      engine.handle_request(request("sowing", ActionId::StartActivity));

  CHECK(resp.decision == Decision::Deny);
  CHECK(resp.final_state == ActivityState::Aborted);
  CHECK(resp.obligations_fulfilled.empty());
  CHECK(resp.reason == "no applicable policy or rule");
  CHECK(store.get_activity("plowing").state == ActivityState::Running);
}

TEST_CASE("life cycle start, continuity, finish, post-update") {
  Store store;
  load_smartfarm(store);
  Engine engine(store, corpus(), EngineConfig{{10, 1}, 2});

  CHECK(store.get_activity("sowing").state == ActivityState::Inactive);

  ResponseContext start =
      engine.handle_request(request("sowing", ActionId::StartActivity));
  CHECK(start.final_state == ActivityState::Running);

  engine.wait_for_continuity("sowing");
  auto loop = engine.continuity_report("sowing");
  REQUIRE(loop.has_value());
  CHECK(loop->stop_reason == "exhausted");
  CHECK(loop->iterations.size() == 10);
  CHECK(loop->final_state == ActivityState::Running);

  ResponseContext finish =
      engine.handle_request(request("sowing", ActionId::FinishActivity));
  CHECK(finish.decision == Decision::Permit);
  // The finish response reports the state after the chained post-update.
  CHECK(finish.final_state == ActivityState::Inactive);
  REQUIRE(finish.obligations_fulfilled.size() == 3);
  CHECK(finish.obligations_fulfilled[0] == "updateRequestedActivityState");
  CHECK(finish.obligations_fulfilled[1] == "call-postUpdatePolicy");
  CHECK(finish.obligations_fulfilled[2] == "updateRequestedActivityState");
  CHECK(store.get_activity("sowing").state == ActivityState::Inactive);
}

TEST_CASE("post dependencies gate the return to inactive") {
  Store store;
  load_smartfarm(store);
  store.admin_upsert(ActivityRecord{"barn", ActivityState::Running, false});
  store.admin_upsert(DependencySpec{"sowing", Phase::Post, "barn",
                                    ActivityState::Finished});
  Engine engine(store, corpus(), EngineConfig{{1, 1}, 2});

  engine.handle_request(request("sowing", ActionId::StartActivity));
  engine.wait_for_continuity("sowing");
  ResponseContext finish =
      engine.handle_request(request("sowing", ActionId::FinishActivity));

  // postUpdatePolicy has no deny rule; the unmet immutable post-dependency
  // leaves no rule applicable, so the activity stays finished.
  CHECK(finish.decision == Decision::Permit);
  CHECK(finish.final_state == ActivityState::Finished);
  CHECK(finish.reason == "no applicable policy or rule");
  CHECK(store.get_activity("barn").state == ActivityState::Running);
}

TEST_CASE("second start while running is rejected before evaluation") {
  Store store;
  load_smartfarm(store);
  Engine engine(store, corpus(), EngineConfig{{1, 1}, 2});

  engine.handle_request(request("sowing", ActionId::StartActivity));
  CHECK(store.get_activity("sowing").state == ActivityState::Running);
  CHECK_THROWS_AS(
      engine.handle_request(request("sowing", ActionId::StartActivity)),
      IllegalTransitionError);
  CHECK(store.get_activity("sowing").state == ActivityState::Running);
}

TEST_CASE("hold moves a running activity aside without a policy") {
  Store store;
  load_smartfarm(store);
  Engine engine(store, corpus(), EngineConfig{{50, 2}, 2});

  engine.handle_request(request("sowing", ActionId::StartActivity));
  ResponseContext hold =
      engine.handle_request(request("sowing", ActionId::HoldActivity));
  CHECK(hold.decision == Decision::Permit);
  CHECK(hold.final_state == ActivityState::Hold);
  CHECK(hold.obligations_fulfilled.empty());

  // The continuity loop observes the non-running state and stops.
  engine.wait_for_continuity("sowing");
  auto report = engine.continuity_report("sowing");
  REQUIRE(report.has_value());
  CHECK(report->stop_reason == "finished");
  CHECK(report->final_state == ActivityState::Hold);

  CHECK_THROWS_AS(
      engine.handle_request(request("sowing", ActionId::HoldActivity)),
      IllegalTransitionError);
}

TEST_CASE("finish requires a running activity") {
  Store store;
  load_smartfarm(store);
  Engine engine(store, corpus());
  CHECK_THROWS_AS(
      engine.handle_request(request("sowing", ActionId::FinishActivity)),
      IllegalTransitionError);
  CHECK(store.get_activity("sowing").state == ActivityState::Inactive);
}

TEST_CASE("internal actions are rejected at the boundary") {
  Store store;
  load_smartfarm(store);
  Engine engine(store, corpus());
  CHECK_THROWS_AS(
      engine.handle_request(request("sowing", ActionId::ContinueActivity)),
      SchemaViolationError);
  CHECK_THROWS_AS(
      engine.handle_request(request("sowing", ActionId::PostUpdate)),
      SchemaViolationError);
}

TEST_CASE("unknown activities surface the store error") {
  Store store;
  load_smartfarm(store);
  Engine engine(store, corpus());
  CHECK_THROWS_AS(
      engine.handle_request(request("ghost", ActionId::StartActivity)),
      UnknownActivityError);
}

TEST_CASE("continuity loop revokes when an iteration denies") {
  Store store;
  load_smartfarm(store);
  Engine engine(store, corpus());

  engine.handle_request(request("sowing", ActionId::StartActivity));
  engine.wait_for_continuity("sowing");

  // Violate the ongoing dependency right before the third iteration: the
  // pump stalls and cannot be updated.
  engine.set_continuity_probe([&](const std::string& activity, int n) {
    if (activity == "sowing" && n == 3) {
      store.admin_upsert(
          ActivityRecord{"pump-water", ActivityState::Hold, false});
    }
  });

  ContinuityReport report =
      engine.run_continuity("sowing", ContinuityConfig{10, 1});
  REQUIRE(report.iterations.size() == 3);
  CHECK(report.iterations[0].decision == Decision::Permit);
  CHECK(report.iterations[1].decision == Decision::Permit);
  CHECK(report.iterations[2].decision == Decision::Deny);
  CHECK(report.stop_reason == "revoked");
  CHECK(report.final_state == ActivityState::Revoked);
  CHECK(store.get_activity("sowing").state == ActivityState::Revoked);
}

TEST_CASE("continuity loop stops when the activity leaves running") {
  Store store;
  load_smartfarm(store);
  Engine engine(store, corpus());

  ContinuityReport report =
      engine.run_continuity("sowing", ContinuityConfig{5, 1});
  CHECK(report.iterations.empty());
  CHECK(report.stop_reason == "finished");
  CHECK(report.final_state == ActivityState::Inactive);
}

TEST_CASE("continuity intervals are minimum delays") {
  Store store;
  load_smartfarm(store);
  Engine engine(store, corpus());
  engine.handle_request(request("sowing", ActionId::StartActivity));
  engine.wait_for_continuity("sowing");

  ContinuityReport report =
      engine.run_continuity("sowing", ContinuityConfig{3, 10});
  REQUIRE(report.iterations.size() == 3);
  CHECK(report.iterations[2].elapsed_ms >= 2 * 10 - 0.5);
  CHECK(report.stop_reason == "exhausted");
}

TEST_CASE("continuity report serializes with the documented keys") {
  Store store;
  load_smartfarm(store);
  Engine engine(store, corpus());
  engine.handle_request(request("sowing", ActionId::StartActivity));
  engine.wait_for_continuity("sowing");

  ContinuityReport report =
      engine.run_continuity("sowing", ContinuityConfig{2, 1});
  nlohmann::json j = nlohmann::json::parse(to_json(report));
  CHECK(j.at("activity") == "sowing");
  CHECK(j.at("iterations").size() == 2);
  CHECK(j.at("iterations")[0].at("n") == 1);
  CHECK(j.at("iterations")[0].at("decision") == "permit");
  CHECK(j.at("iterations")[0].at("elapsed_ms").is_number());
  CHECK(j.at("final_state") == "running");
  CHECK(j.at("stop_reason") == "exhausted");
}

TEST_CASE("start request trace matches the golden flow") {
  Store store;
  load_smartfarm(store);
  Engine engine(store, corpus(), EngineConfig{{1, 1}, 2});

  std::vector<std::string> steps;
  engine.set_trace_hook([&](const std::string& s) { steps.push_back(s); });
  engine.handle_request(request("sowing", ActionId::StartActivity));
  engine.set_trace_hook(nullptr);

  CHECK(steps == read_golden_trace());
}

TEST_CASE("unknown obligations fail without retracting the decision") {
  Store store;
  load_smartfarm(store);
  Engine engine(store, corpus());

  Txn txn = store.begin_txn();
  ObligationExpression ob;
  ob.obligation_id = "send-email";
  ob.fulfill_on = Decision::Permit;
  CHECK_THROWS_AS(engine.fulfill_obligation(ob, Decision::Permit, "sowing",
                                            ActionId::StartActivity, txn),
                  UnknownObligationError);
  txn.rollback();
}

TEST_CASE("admin writes on activities inside an open evaluation are busy") {
  Store store;
  load_smartfarm(store);
  Engine engine(store, corpus());

  Txn txn = store.begin_txn();
  (void)store.get_activity("sowing", txn);
  CHECK_THROWS_AS(store.admin_upsert(ActivityRecord{
                      "sowing", ActivityState::Running, true}),
                  TransactionBusyError);
  txn.rollback();
  store.admin_upsert(ActivityRecord{"sowing", ActivityState::Inactive, true});
}

TEST_CASE("concurrent starts on disjoint activities both succeed") {
  Store store;
  for (int i = 0; i < 8; ++i) {
    std::string id = "job-" + std::to_string(i);
    store.admin_upsert(ActivityRecord{id, ActivityState::Inactive, true});
  }
  Engine engine(store, corpus(), EngineConfig{{2, 1}, 2});

  std::vector<std::jthread> workers;
  std::vector<Decision> decisions(8, Decision::Deny);
  for (int i = 0; i < 8; ++i) {
    workers.emplace_back([&engine, &decisions, i] {
      ResponseContext r = engine.handle_request(
          ActivityRequest{"tester", "job-" + std::to_string(i),
                          ActionId::StartActivity});
      decisions[i] = r.decision;
    });
  }
  workers.clear();

  for (int i = 0; i < 8; ++i) {
    CHECK(decisions[i] == Decision::Permit);
    CHECK(store.get_activity("job-" + std::to_string(i)).state ==
          ActivityState::Running);
  }
}
