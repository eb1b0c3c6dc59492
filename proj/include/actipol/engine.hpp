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

#ifndef ACTIPOL_ENGINE_HPP
#define ACTIPOL_ENGINE_HPP

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "actipol/pdp.hpp"
#include "actipol/policy.hpp"
#include "actipol/store.hpp"

namespace actipol {

/// One external request against an activity.
struct ActivityRequest {
  std::string subject;
  std::string activity;
  ActionId action = ActionId::StartActivity;
};

/// What the enforcement point returns to the requester. The decision is
/// always Permit or Deny (deny-biased mapping); `reason` explains mapped
/// NotApplicable/Indeterminate outcomes and obligation failures.
struct ResponseContext {
  Decision decision = Decision::Deny;
  std::string activity;
  ActivityState final_state = ActivityState::Inactive;
  std::vector<std::string> obligations_fulfilled;
  std::string reason;
  double elapsed_ms = 0.0;
};

struct ContinuityConfig {
  int repetitions = 10;
  int interval_ms = 5;
};

struct ContinuityIteration {
  int n = 0;
  Decision decision = Decision::Permit;
  double elapsed_ms = 0.0;
};

/// Record of one continuity loop. `stop_reason` is "exhausted" when all
/// repetitions ran, "revoked" when an iteration denied, "finished" when the
/// activity left Running between iterations, or "stopped" on engine
/// shutdown.
struct ContinuityReport {
  std::string activity;
  std::vector<ContinuityIteration> iterations;
  ActivityState final_state = ActivityState::Inactive;
  std::string stop_reason;
  bool complete = false;
};

std::string to_json(const ContinuityReport& report);

struct EngineConfig {
  ContinuityConfig continuity;
  int chain_depth_limit = 2;
};

/// Deferred half of an obligation: work that must wait until the decision's
/// transaction has committed.
enum class DeferredObligation {
  None,
  ScheduleContinuity,
  RunPostUpdate,
};

/// Context handler, enforcement core, obligation service, and continuity
/// scheduler in one object. It owns no store or policy data; both are
/// injected and shared.
class Engine {
 public:
  /// Observes the enforcement flow step by step, e.g. "pep:intercept".
  using TraceHook = std::function<void(const std::string& step)>;
  /// Runs before each continuity iteration's transaction opens; gives tests
  /// a deterministic point to perturb the store.
  using ContinuityProbe = std::function<void(const std::string& activity,
                                             int iteration)>;

  Engine(Store& store, PolicySet policy_set, EngineConfig config = {});
  ~Engine();

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Runs the full enforcement flow for one external request. Throws
  /// UnknownActivityError for a missing activity, IllegalTransitionError
  /// when the action cannot legally leave the current state, and
  /// SchemaViolationError for internal-only actions.
  ResponseContext handle_request(const ActivityRequest& req);

  /// Runs the continuity loop synchronously and returns its report.
  ContinuityReport run_continuity(const std::string& activity,
                                  const ContinuityConfig& cfg);

  /// Launches the continuity loop on its own thread; at most one loop per
  /// activity runs at a time (a duplicate request is ignored).
  void schedule_continuity(const std::string& activity);

  /// Latest report for the activity's most recent loop, live or finished.
  std::optional<ContinuityReport> continuity_report(
      const std::string& activity) const;

  /// Blocks until the activity's scheduled loop ends; no-op without one.
  void wait_for_continuity(const std::string& activity);

  /// Applies one triggered obligation. The state-update obligation writes
  /// the (state, action, decision) life-cycle edge inside `txn` and returns
  /// None; the call-* obligations do nothing here and return the deferred
  /// task to run after commit. Throws UnknownObligationError.
  DeferredObligation fulfill_obligation(const ObligationExpression& ob,
                                        Decision decision,
                                        const std::string& activity,
                                        ActionId action, Txn& txn);

  void set_trace_hook(TraceHook hook);
  void set_continuity_probe(ContinuityProbe probe);

  const PolicySet& policy_set() const { return policy_set_; }
  const EngineConfig& config() const { return config_; }

 private:
  struct LoopSlot {
    mutable std::mutex mutex;
    ContinuityReport report;
    std::jthread thread;  // declared last: joins before the rest dies
  };

  ResponseContext handle_start(const ActivityRequest& req);
  ResponseContext handle_hold(const ActivityRequest& req);
  ResponseContext handle_finish(const ActivityRequest& req);
  ResponseContext handle_post_update(const std::string& subject,
                                     const std::string& activity);

  /// Evaluates the policy set for (activity, action) inside txn and walks
  /// the traced PDP/PRP/PIP sequence.
  PolicyEvaluation decide(const std::string& subject,
                          const std::string& activity, ActionId action,
                          Txn& txn);

  ContinuityReport run_continuity_impl(const std::string& activity,
                                       const ContinuityConfig& cfg,
                                       std::stop_token stop,
                                       LoopSlot* slot);

  std::mutex& admission_lock(const std::string& activity);
  void trace(const char* step) const;

  Store& store_;
  const PolicySet policy_set_;
  const EngineConfig config_;

  /// The policy retrieval index: action id -> policy, built at load. When a
  /// policy's target has no action constraint the index cannot rule requests
  /// out, so lookups fall through to a full scan.
  std::unordered_map<std::string, const Policy*> policy_index_;
  bool has_wildcard_policy_ = false;

  mutable std::mutex admission_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> admission_locks_;

  mutable std::mutex loops_mutex_;
  std::map<std::string, std::unique_ptr<LoopSlot>> loops_;

  mutable std::mutex hooks_mutex_;
  TraceHook trace_hook_;
  ContinuityProbe continuity_probe_;
};

}  // namespace actipol

#endif  // ACTIPOL_ENGINE_HPP
