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

#include <string>

#include "acoracle/oracle.hpp"

using namespace acoracle;

namespace {

World farm_world(const std::string& plowing_state, bool plowing_mutable) {
  World w;
  w.activities = {{"sowing", "inactive", true},
                  {"plowing", plowing_state, plowing_mutable},
                  {"pump-water", "running", true}};
  w.dependencies = {{"sowing", "pre", "plowing", "finished"}};
  return w;
}

const std::string& state_of(const World& w, const std::string& id) {
  return w.find(id)->state;
}

}  // namespace

TEST_CASE("no dependencies permits without updates") {
  World w = farm_world("running", true);
  w.dependencies.clear();
  Outcome out = oracle_decide(w, "sowing", "pre", 2);
  CHECK(out.verdict == Verdict::Permit);
  CHECK(state_of(out.world, "plowing") == "running");
}

TEST_CASE("all dependents already in desired state permits") {
  Outcome out = oracle_decide(farm_world("finished", true), "sowing", "pre", 2);
  CHECK(out.verdict == Verdict::Permit);
  CHECK(state_of(out.world, "plowing") == "finished");
}

TEST_CASE("unmet mutable dependent with no chain permits with update") {
  Outcome out = oracle_decide(farm_world("running", true), "sowing", "pre", 2);
  CHECK(out.verdict == Verdict::Permit);
  CHECK(state_of(out.world, "plowing") == "finished");
}

TEST_CASE("unmet immutable dependent denies") {
  Outcome out = oracle_decide(farm_world("running", false), "sowing", "pre", 2);
  CHECK(out.verdict == Verdict::Deny);
  CHECK(state_of(out.world, "plowing") == "running");
}

TEST_CASE("dependencies are phase-scoped") {
  World w = farm_world("running", false);
  Outcome out = oracle_decide(w, "sowing", "ongoing", 2);
  CHECK(out.verdict == Verdict::Permit);
}

TEST_CASE("satisfied requirement chain permits with update") {
  World w = farm_world("running", true);
  w.transition_dependencies = {
      {"plowing", "finished", {{"pump-water", "running"}}}};
  Outcome out = oracle_decide(w, "sowing", "pre", 2);
  CHECK(out.verdict == Verdict::Permit);
  CHECK(state_of(out.world, "plowing") == "finished");
  // The chain requirement is a precondition, not an update target.
  CHECK(state_of(out.world, "pump-water") == "running");
}

TEST_CASE("unsatisfied mutable requirement chain yields not-applicable") {
  World w = farm_world("running", true);
  w.transition_dependencies = {
      {"plowing", "finished", {{"pump-water", "finished"}}}};
  Outcome out = oracle_decide(w, "sowing", "pre", 2);
  CHECK(out.verdict == Verdict::NotApplicable);
  CHECK(state_of(out.world, "plowing") == "running");
}

TEST_CASE("unsatisfied immutable requirement chain denies") {
  World w = farm_world("running", true);
  w.activities[2].is_mutable = false;
  w.transition_dependencies = {
      {"plowing", "finished", {{"pump-water", "finished"}}}};
  Outcome out = oracle_decide(w, "sowing", "pre", 2);
  CHECK(out.verdict == Verdict::Deny);
}

TEST_CASE("depth limit 1 ignores requirement chains entirely") {
  World w = farm_world("running", true);
  w.activities[2].is_mutable = false;
  w.transition_dependencies = {
      {"plowing", "finished", {{"pump-water", "finished"}}}};
  Outcome out = oracle_decide(w, "sowing", "pre", 1);
  CHECK(out.verdict == Verdict::Permit);
  CHECK(state_of(out.world, "plowing") == "finished");
}

TEST_CASE("depth limit 3 scans one level deeper for immutable blockers") {
  World w = farm_world("running", true);
  w.activities.push_back({"tractor-maint", "dormant", false});
  w.transition_dependencies = {
      {"plowing", "finished", {{"pump-water", "finished"}}},
      {"pump-water", "finished", {{"tractor-maint", "finished"}}}};

  // Depth 2: the chain below pump-water is out of scope; pump-water itself is
  // mutable and unmet, so the chain is merely unsatisfied.
  Outcome at2 = oracle_decide(w, "sowing", "pre", 2);
  CHECK(at2.verdict == Verdict::NotApplicable);

  // Depth 3 reaches tractor-maint, which is immutable and unmet.
  Outcome at3 = oracle_decide(w, "sowing", "pre", 3);
  CHECK(at3.verdict == Verdict::Deny);
}

TEST_CASE("mixed dependents: any immutable unmet one wins") {
  World w = farm_world("running", true);
  w.activities.push_back({"field-survey", "running", false});
  w.dependencies.push_back({"sowing", "pre", "field-survey", "finished"});
  Outcome out = oracle_decide(w, "sowing", "pre", 2);
  CHECK(out.verdict == Verdict::Deny);
  CHECK(state_of(out.world, "plowing") == "running");
}

TEST_CASE("updates apply to every unmet mutable dependent") {
  World w = farm_world("running", true);
  w.activities.push_back({"field-survey", "running", true});
  w.dependencies.push_back({"sowing", "pre", "field-survey", "hold"});
  Outcome out = oracle_decide(w, "sowing", "pre", 2);
  CHECK(out.verdict == Verdict::Permit);
  CHECK(state_of(out.world, "plowing") == "finished");
  CHECK(state_of(out.world, "field-survey") == "hold");
}

TEST_CASE("unknown subject throws") {
  CHECK_THROWS_AS(oracle_decide(farm_world("running", true), "ghost", "pre", 2),
                  UnknownWorldActivity);
}

TEST_CASE("oracle_decide is a pure function of its inputs") {
  World w = farm_world("running", true);
  w.transition_dependencies = {
      {"plowing", "finished", {{"pump-water", "running"}}}};
  Outcome a = oracle_decide(w, "sowing", "pre", 2);
  Outcome b = oracle_decide(w, "sowing", "pre", 2);
  CHECK(a.verdict == b.verdict);
  CHECK(world_to_json(a.world) == world_to_json(b.world));
  // And the argument world is untouched.
  CHECK(state_of(w, "plowing") == "running");
}

TEST_CASE("world JSON round-trips") {
  World w = farm_world("running", false);
  w.transition_dependencies = {
      {"plowing", "finished", {{"pump-water", "running"}}}};
  std::string text = world_to_json(w);
  World again = world_from_json(text);
  CHECK(world_to_json(again) == text);
  CHECK(again.find("plowing")->is_mutable == false);
  CHECK_THROWS(world_from_json("{broken"));
}
