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

#include "actipol/activity.hpp"

#include <array>

namespace actipol {

namespace {

struct Edge {
  ActivityState from;
  ActionId action;
  Decision decision;
  ActivityState to;
};

constexpr std::array<Edge, 7> kEdges{{
    {ActivityState::Dormant, ActionId::StartActivity, Decision::Deny,
     ActivityState::Aborted},
    {ActivityState::Dormant, ActionId::StartActivity, Decision::Permit,
     ActivityState::Running},
    {ActivityState::Running, ActionId::ContinueActivity, Decision::Deny,
     ActivityState::Revoked},
    {ActivityState::Running, ActionId::ContinueActivity, Decision::Permit,
     ActivityState::Running},
    {ActivityState::Running, ActionId::HoldActivity, Decision::Permit,
     ActivityState::Hold},
    {ActivityState::Running, ActionId::FinishActivity, Decision::Permit,
     ActivityState::Finished},
    {ActivityState::Finished, ActionId::PostUpdate, Decision::Permit,
     ActivityState::Inactive},
}};

}  // namespace

std::string_view to_string(ActivityState s) {
  switch (s) {
    case ActivityState::Inactive: return "inactive";
    case ActivityState::Dormant: return "dormant";
    case ActivityState::Aborted: return "aborted";
    case ActivityState::Running: return "running";
    case ActivityState::Hold: return "hold";
    case ActivityState::Revoked: return "revoked";
    case ActivityState::Finished: return "finished";
  }
  return "?";
}

std::string_view to_string(ActionId a) {
  switch (a) {
    case ActionId::StartActivity: return "startActivity";
    case ActionId::ContinueActivity: return "continueActivity";
    case ActionId::HoldActivity: return "holdActivity";
    case ActionId::FinishActivity: return "finishActivity";
    case ActionId::PostUpdate: return "postUpdate";
  }
  return "?";
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Permit: return "permit";
    case Decision::Deny: return "deny";
    case Decision::NotApplicable: return "not-applicable";
    case Decision::Indeterminate: return "indeterminate";
  }
  return "?";
}

ActivityState activity_state_from_string(std::string_view text) {
  for (int i = 0; i < kActivityStateCount; ++i) {
    auto s = static_cast<ActivityState>(i);
    if (to_string(s) == text) return s;
  }
  throw SchemaViolationError("not an activity state: " + std::string(text));
}

ActionId action_id_from_string(std::string_view text) {
  for (int i = 0; i < kActionIdCount; ++i) {
    auto a = static_cast<ActionId>(i);
    if (to_string(a) == text) return a;
  }
  throw SchemaViolationError("not an action id: " + std::string(text));
}

Decision decision_from_string(std::string_view text) {
  for (int i = 0; i < kDecisionCount; ++i) {
    auto d = static_cast<Decision>(i);
    if (to_string(d) == text) return d;
  }
  throw SchemaViolationError("not a decision: " + std::string(text));
}

bool is_external_action(ActionId a) {
  return a == ActionId::StartActivity || a == ActionId::HoldActivity ||
         a == ActionId::FinishActivity;
}

std::optional<ActivityState> next_state(ActivityState state, ActionId action,
                                        Decision decision) {
  for (const Edge& e : kEdges) {
    if (e.from == state && e.action == action && e.decision == decision) {
      return e.to;
    }
  }
  return std::nullopt;
}

ActivityRecord apply_transition(const ActivityRecord& record, ActionId action,
                                Decision decision) {
  auto to = next_state(record.state, action, decision);
  if (!to) {
    throw IllegalTransitionError(
        "no transition for (" + std::string(to_string(record.state)) + ", " +
        std::string(to_string(action)) + ", " +
        std::string(to_string(decision)) + ") on activity " + record.id);
  }
  ActivityRecord out = record;
  out.state = *to;
  return out;
}

ActivityRecord intercept_request(const ActivityRecord& record,
                                 ActionId action) {
  if (action != ActionId::StartActivity) return record;
  if (record.state != ActivityState::Inactive) {
    throw IllegalTransitionError("startActivity intercepted while activity " +
                                 record.id + " is " +
                                 std::string(to_string(record.state)));
  }
  ActivityRecord out = record;
  out.state = ActivityState::Dormant;
  return out;
}

bool action_admissible(ActivityState state, ActionId action) {
  if (action == ActionId::StartActivity && state == ActivityState::Inactive) {
    return true;
  }
  for (const Edge& e : kEdges) {
    if (e.from == state && e.action == action) return true;
  }
  return false;
}

}  // namespace actipol
