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

#include "acoracle/oracle.hpp"

#include <json.hpp>

namespace acoracle {

namespace {

const std::string& state_of(const World& w, const std::string& id) {
  const WorldActivity* a = w.find(id);
  if (!a) throw UnknownWorldActivity(id);
  return a->state;
}

bool mutable_flag(const World& w, const std::string& id) {
  const WorldActivity* a = w.find(id);
  if (!a) throw UnknownWorldActivity(id);
  return a->is_mutable;
}

const std::vector<ChainRequirement>* chain_of(const World& w,
                                              const std::string& activity,
                                              const std::string& target) {
  for (const WorldChain& c : w.transition_dependencies) {
    if (c.activity == activity && c.target_state == target) {
      return &c.requirements;
    }
  }
  return nullptr;
}

// True when the requirement chain below (activity -> target) contains an
// unmet immutable activity. `level` is the level the chain entries sit at;
// entries past depth_limit are out of scope.
bool chain_has_immutable_blocker(const World& w, const std::string& activity,
                                 const std::string& target, int level,
                                 int depth_limit) {
  if (level > depth_limit) return false;
  const auto* reqs = chain_of(w, activity, target);
  if (!reqs) return false;
  for (const ChainRequirement& r : *reqs) {
    if (state_of(w, r.activity) == r.state) continue;
    if (!mutable_flag(w, r.activity)) return true;
    if (chain_has_immutable_blocker(w, r.activity, r.state, level + 1,
                                    depth_limit)) {
      return true;
    }
  }
  return false;
}

}  // namespace

const WorldActivity* World::find(const std::string& id) const {
  for (const WorldActivity& a : activities) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Permit: return "permit";
    case Verdict::Deny: return "deny";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

Outcome oracle_decide(World world, const std::string& subject,
                      const std::string& phase, int depth_limit) {
  if (!world.find(subject)) throw UnknownWorldActivity(subject);

  std::vector<const WorldDependency*> deps;
  for (const WorldDependency& d : world.dependencies) {
    if (d.subject == subject && d.phase == phase) deps.push_back(&d);
  }
  if (deps.empty()) return {Verdict::Permit, std::move(world)};

  std::vector<const WorldDependency*> unmet;
  for (const WorldDependency* d : deps) {
    if (state_of(world, d->dependent) != d->desired_state) unmet.push_back(d);
  }
  if (unmet.empty()) return {Verdict::Permit, std::move(world)};

  for (const WorldDependency* d : unmet) {
    if (!mutable_flag(world, d->dependent)) {
      return {Verdict::Deny, std::move(world)};
    }
  }
  if (depth_limit >= 2) {
    for (const WorldDependency* d : unmet) {
      if (chain_has_immutable_blocker(world, d->dependent, d->desired_state,
                                      2, depth_limit)) {
        return {Verdict::Deny, std::move(world)};
      }
    }
  }

  // Every unmet dependent is mutable; it may only be updated when its
  // requirement chain is empty or already satisfied.
  for (const WorldDependency* d : unmet) {
    if (depth_limit < 2) continue;
    const auto* reqs = chain_of(world, d->dependent, d->desired_state);
    if (!reqs) continue;
    for (const ChainRequirement& r : *reqs) {
      if (state_of(world, r.activity) != r.state) {
        return {Verdict::NotApplicable, std::move(world)};
      }
    }
  }

  for (const WorldDependency* d : unmet) {
    for (WorldActivity& a : world.activities) {
      if (a.id == d->dependent) a.state = d->desired_state;
    }
  }
  return {Verdict::Permit, std::move(world)};
}

World world_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("world is not valid JSON: ") +
                             e.what());
  }
  World w;
  for (const auto& a : j.value("activities", nlohmann::json::array())) {
    w.activities.push_back({a.at("id").get<std::string>(),
                            a.at("state").get<std::string>(),
                            a.value("mutable", true)});
  }
  for (const auto& d : j.value("dependencies", nlohmann::json::array())) {
    w.dependencies.push_back({d.at("subject").get<std::string>(),
                              d.at("phase").get<std::string>(),
                              d.at("dependent").get<std::string>(),
                              d.at("desired_state").get<std::string>()});
  }
  for (const auto& c :
       j.value("transition_dependencies", nlohmann::json::array())) {
    WorldChain chain;
    chain.activity = c.at("activity").get<std::string>();
    chain.target_state = c.at("target_state").get<std::string>();
    for (const auto& r : c.value("requirements", nlohmann::json::array())) {
      chain.requirements.push_back({r.at("activity").get<std::string>(),
                                    r.at("state").get<std::string>()});
    }
    w.transition_dependencies.push_back(std::move(chain));
  }
  return w;
}

std::string world_to_json(const World& world) {
  nlohmann::ordered_json j;
  j["activities"] = nlohmann::ordered_json::array();
  for (const WorldActivity& a : world.activities) {
    j["activities"].push_back(
        {{"id", a.id}, {"state", a.state}, {"mutable", a.is_mutable}});
  }
  j["dependencies"] = nlohmann::ordered_json::array();
  for (const WorldDependency& d : world.dependencies) {
    j["dependencies"].push_back({{"subject", d.subject},
                                 {"phase", d.phase},
                                 {"dependent", d.dependent},
                                 {"desired_state", d.desired_state}});
  }
  j["transition_dependencies"] = nlohmann::ordered_json::array();
  for (const WorldChain& c : world.transition_dependencies) {
    nlohmann::ordered_json reqs = nlohmann::ordered_json::array();
    for (const ChainRequirement& r : c.requirements) {
      reqs.push_back({{"activity", r.activity}, {"state", r.state}});
    }
    j["transition_dependencies"].push_back({{"activity", c.activity},
                                            {"target_state", c.target_state},
                                            {"requirements", std::move(reqs)}});
  }
  return j.dump(2);
}

}  // namespace acoracle
