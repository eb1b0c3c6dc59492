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

#ifndef ACTIPOL_ACTIVITY_HPP
#define ACTIPOL_ACTIVITY_HPP

#include <optional>
#include <string>
#include <string_view>

#include "actipol/errors.hpp"

namespace actipol {

/// The seven life-cycle states an activity can be in.
enum class ActivityState {
  Inactive,
  Dormant,
  Aborted,
  Running,
  Hold,
  Revoked,
  Finished,
};

inline constexpr int kActivityStateCount = 7;

/// Actions that can be requested on an activity. ContinueActivity and
/// PostUpdate are internal: they are issued by the obligation service, never
/// by an external requester.
enum class ActionId {
  StartActivity,
  ContinueActivity,
  HoldActivity,
  FinishActivity,
  PostUpdate,
};

inline constexpr int kActionIdCount = 5;

/// Outcome of a policy evaluation.
enum class Decision {
  Permit,
  Deny,
  NotApplicable,
  Indeterminate,
};

inline constexpr int kDecisionCount = 4;

std::string_view to_string(ActivityState s);
std::string_view to_string(ActionId a);
std::string_view to_string(Decision d);

/// Parse the lowercase wire form ("inactive", "running", ...).
ActivityState activity_state_from_string(std::string_view text);
/// Parse the camelCase wire form ("startActivity", ...).
ActionId action_id_from_string(std::string_view text);
Decision decision_from_string(std::string_view text);

bool is_external_action(ActionId a);

struct ActivityRecord {
  std::string id;
  ActivityState state = ActivityState::Inactive;
  bool is_mutable = true;

  bool operator==(const ActivityRecord&) const = default;
};

/// Returns the successor state for a (state, action, decision) triple, or
/// nullopt when the triple is not an edge of the life-cycle graph.
///
/// The legal decision-bearing edges:
///   (Dormant,  Start,    Deny)   -> Aborted
///   (Dormant,  Start,    Permit) -> Running
///   (Running,  Continue, Deny)   -> Revoked
///   (Running,  Continue, Permit) -> Running
///   (Running,  Hold,     Permit) -> Hold
///   (Running,  Finish,   Permit) -> Finished
///   (Finished, PostUpdate, Permit) -> Inactive
///
/// The Inactive -> Dormant edge carries no decision; it happens when a start
/// request is intercepted, before any policy evaluation (see
/// intercept_request).
std::optional<ActivityState> next_state(ActivityState state, ActionId action,
                                        Decision decision);

/// Applies one decision-bearing transition. Throws IllegalTransitionError
/// when the triple is not in the table.
ActivityRecord apply_transition(const ActivityRecord& record, ActionId action,
                                Decision decision);

/// Moves an Inactive activity to Dormant when a start request is
/// intercepted. Actions other than StartActivity leave the record unchanged.
/// Throws IllegalTransitionError for StartActivity on a non-Inactive record.
ActivityRecord intercept_request(const ActivityRecord& record, ActionId action);

/// True when some decision can legally drive `action` out of `state`.
/// StartActivity is additionally admissible from Inactive (via interception).
bool action_admissible(ActivityState state, ActionId action);

}  // namespace actipol

#endif  // ACTIPOL_ACTIVITY_HPP
