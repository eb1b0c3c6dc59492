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

// Brute-force reference for activity-dependency decisions. This tree shares
// no code with the policy engine: plain string states, flat vectors, and a
// direct transcription of the dependency-evaluation rules. It exists so the
// engine's decisions can be checked against something that was not derived
// from the engine.

#ifndef ACORACLE_ORACLE_HPP
#define ACORACLE_ORACLE_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace acoracle {

struct WorldActivity {
  std::string id;
  std::string state;
  bool is_mutable = true;
};

struct WorldDependency {
  std::string subject;
  std::string phase;  // "pre" | "ongoing" | "post"
  std::string dependent;
  std::string desired_state;
};

struct ChainRequirement {
  std::string activity;
  std::string state;
};

struct WorldChain {
  std::string activity;
  std::string target_state;
  std::vector<ChainRequirement> requirements;
};

/// Flat world model, structurally identical to the engine's fixture files.
struct World {
  std::vector<WorldActivity> activities;
  std::vector<WorldDependency> dependencies;
  std::vector<WorldChain> transition_dependencies;

  const WorldActivity* find(const std::string& id) const;
};

enum class Verdict {
  Permit,
  Deny,
  NotApplicable,
};

const char* verdict_name(Verdict v);

struct Outcome {
  Verdict verdict;
  World world;  // dependent-activity updates applied on Permit
};

class UnknownWorldActivity : public std::runtime_error {
 public:
  explicit UnknownWorldActivity(const std::string& id)
      : std::runtime_error("unknown activity: " + id) {}
};

/// Decides whether `subject` may proceed through `phase`, given the
/// dependency requirements in `world`, and applies the resulting state
/// updates on dependent activities. Pure: the input world is taken by value.
///
///   - no dependencies for the phase              -> Permit
///   - every dependent already in desired state   -> Permit
///   - an unmet dependent (or, within depth_limit,
///     an unmet chain requirement) is immutable   -> Deny
///   - every unmet dependent is mutable and has an
///     empty or fully satisfied requirement chain -> Permit + updates
///   - otherwise                                  -> NotApplicable
///
/// depth_limit counts chain levels: 1 looks only at direct dependents, 2 adds
/// their transition requirements. Levels past the limit are never consulted.
Outcome oracle_decide(World world, const std::string& subject,
                      const std::string& phase, int depth_limit);

World world_from_json(const std::string& text);
std::string world_to_json(const World& world);

}  // namespace acoracle

#endif  // ACORACLE_ORACLE_HPP
