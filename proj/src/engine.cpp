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

#include "actipol/engine.hpp"

#include <chrono>
#include <condition_variable>
#include <utility>

#include <json.hpp>

#include "actipol/activity.hpp"
#include "actipol/errors.hpp"

namespace actipol {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

constexpr const char* kObUpdateState = "updateRequestedActivityState";
constexpr const char* kObCallContinue = "call-continueActivityPolicy";
constexpr const char* kObCallPostUpdate = "call-postUpdatePolicy";

/// Drives the life-cycle edge for (current state, action, decision) when one
/// exists and actually changes the state. The enforcement point falls back
/// to this when no triggered obligation performed the update.
void enforce_edge(Store& store, const std::string& activity, ActionId action,
                  Decision decision, Txn& txn) {
  ActivityRecord cur = store.get_activity(activity, txn);
  std::optional<ActivityState> next = next_state(cur.state, action, decision);
  if (next && *next != cur.state) {
    store.set_state(activity, *next, txn, WriteOrigin::Transition);
  }
}

struct ObligationOutcome {
  std::vector<std::string> fulfilled;
  std::vector<DeferredObligation> deferred;
  bool state_updated = false;
  std::string failure;
};

}  // namespace

std::string to_json(const ContinuityReport& report) {
  nlohmann::ordered_json j;
  j["activity"] = report.activity;
  j["iterations"] = nlohmann::ordered_json::array();
  for (const ContinuityIteration& it : report.iterations) {
    j["iterations"].push_back({{"n", it.n},
                               {"decision", to_string(it.decision)},
                               {"elapsed_ms", it.elapsed_ms}});
  }
  j["final_state"] = to_string(report.final_state);
  j["stop_reason"] = report.stop_reason;
  j["complete"] = report.complete;
  return j.dump(2);
}

Engine::Engine(Store& store, PolicySet policy_set, EngineConfig config)
    : store_(store), policy_set_(std::move(policy_set)), config_(config) {
  for (const Policy& p : policy_set_.policies) {
    if (p.target.actions.empty()) has_wildcard_policy_ = true;
    for (const MatchExpr& m : p.target.actions) {
      if (m.attribute_id == kAttrActionId) {
        policy_index_.emplace(m.value, &p);
      }
    }
  }
}

Engine::~Engine() {
  std::lock_guard<std::mutex> lk(loops_mutex_);
  for (auto& [_, slot] : loops_) slot->thread.request_stop();
  loops_.clear();
}

void Engine::set_trace_hook(TraceHook hook) {
  std::lock_guard<std::mutex> lk(hooks_mutex_);
  trace_hook_ = std::move(hook);
}

void Engine::set_continuity_probe(ContinuityProbe probe) {
  std::lock_guard<std::mutex> lk(hooks_mutex_);
  continuity_probe_ = std::move(probe);
}

void Engine::trace(const char* step) const {
  TraceHook hook;
  {
    std::lock_guard<std::mutex> lk(hooks_mutex_);
    hook = trace_hook_;
  }
  if (hook) hook(step);
}

std::mutex& Engine::admission_lock(const std::string& activity) {
  std::lock_guard<std::mutex> lk(admission_mutex_);
  std::unique_ptr<std::mutex>& slot = admission_locks_[activity];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

PolicyEvaluation Engine::decide(const std::string& subject,
                                const std::string& activity, ActionId action,
                                Txn& txn) {
  trace("context-handler:build-context");
  EvaluationContext ctx;
  ctx.request.subject_id = subject;
  ctx.request.activity_id = activity;
  ctx.request.action_id = std::string(to_string(action));
  ctx.store = &store_;
  ctx.txn = &txn;
  ctx.chain_depth_limit = config_.chain_depth_limit;

  trace("context-handler:notify-pdp");
  trace("pdp:retrieve-policy");
  if (!has_wildcard_policy_ &&
      policy_index_.find(ctx.request.action_id) == policy_index_.end()) {
    trace("pdp:decide");
    trace("context-handler:return-response");
    PolicyEvaluation none;
    none.decision = Decision::NotApplicable;
    return none;
  }

  trace("context-handler:query-info");
  trace("pip:fetch-attributes");
  trace("context-handler:return-attributes");
  PolicyEvaluation result = evaluate(policy_set_, ctx);
  trace("pdp:decide");
  trace("context-handler:return-response");
  return result;
}

DeferredObligation Engine::fulfill_obligation(const ObligationExpression& ob,
                                              Decision decision,
                                              const std::string& activity,
                                              ActionId action, Txn& txn) {
  if (ob.obligation_id == kObUpdateState) {
    ActivityRecord rec = store_.get_activity(activity, txn);
    ActivityRecord next = apply_transition(rec, action, decision);
    if (next.state != rec.state) {
      store_.set_state(activity, next.state, txn, WriteOrigin::Transition);
    }
    return DeferredObligation::None;
  }
  if (ob.obligation_id == kObCallContinue) {
    return DeferredObligation::ScheduleContinuity;
  }
  if (ob.obligation_id == kObCallPostUpdate) {
    return DeferredObligation::RunPostUpdate;
  }
  throw UnknownObligationError(ob.obligation_id);
}

namespace {

ObligationOutcome run_obligations(
    Engine& engine, const std::vector<ObligationExpression>& obligations,
    Decision enforcement, const std::string& activity, ActionId action,
    Txn& txn) {
  ObligationOutcome out;
  for (const ObligationExpression& ob : obligations) {
    try {
      DeferredObligation deferred =
          engine.fulfill_obligation(ob, enforcement, activity, action, txn);
      if (deferred != DeferredObligation::None) {
        out.deferred.push_back(deferred);
      }
      if (ob.obligation_id == kObUpdateState) out.state_updated = true;
      out.fulfilled.push_back(ob.obligation_id);
    } catch (const Error& e) {
      if (!out.failure.empty()) out.failure += "; ";
      out.failure += "obligation " + ob.obligation_id + " failed: " + e.what();
    }
  }
  return out;
}

std::string mapped_reason(Decision pdp_decision) {
  switch (pdp_decision) {
    case Decision::NotApplicable:
      return "no applicable policy or rule";
    case Decision::Indeterminate:
      return "indeterminate evaluation";
    default:
      return "";
  }
}

void append_reason(std::string& reason, const std::string& more) {
  if (more.empty()) return;
  if (!reason.empty()) reason += "; ";
  reason += more;
}

}  // namespace

ResponseContext Engine::handle_request(const ActivityRequest& req) {
  if (!is_external_action(req.action)) {
    throw SchemaViolationError("internal-only action: " +
                               std::string(to_string(req.action)));
  }
  switch (req.action) {
    case ActionId::StartActivity:
      return handle_start(req);
    case ActionId::HoldActivity:
      return handle_hold(req);
    case ActionId::FinishActivity:
      return handle_finish(req);
    default:
      throw SchemaViolationError("unhandled action");
  }
}

ResponseContext Engine::handle_start(const ActivityRequest& req) {
  Clock::time_point t0 = Clock::now();
  std::lock_guard<std::mutex> admission(admission_lock(req.activity));
  trace("pep:intercept");

  ResponseContext resp;
  resp.activity = req.activity;

  Txn txn = store_.begin_txn();
  ActivityRecord rec = store_.get_activity(req.activity, txn);
  ActivityRecord intercepted = intercept_request(rec, ActionId::StartActivity);
  store_.set_state(req.activity, intercepted.state, txn,
                   WriteOrigin::Transition);

  PolicyEvaluation result =
      decide(req.subject, req.activity, ActionId::StartActivity, txn);
  Decision enforcement = to_enforcement_decision(result.decision);
  resp.reason = mapped_reason(result.decision);

  if (enforcement == Decision::Deny) txn.discard_provisional_writes();

  trace("pep:respond");
  trace("obligation-service:fulfill");
  ObligationOutcome obligations =
      run_obligations(*this, result.triggered_obligations, enforcement,
                      req.activity, ActionId::StartActivity, txn);
  if (!obligations.state_updated) {
    enforce_edge(store_, req.activity, ActionId::StartActivity, enforcement,
                 txn);
  }
  txn.commit();

  for (DeferredObligation task : obligations.deferred) {
    if (task == DeferredObligation::ScheduleContinuity) {
      schedule_continuity(req.activity);
    } else if (task == DeferredObligation::RunPostUpdate) {
      ResponseContext post = handle_post_update(req.subject, req.activity);
      obligations.fulfilled.insert(obligations.fulfilled.end(),
                                   post.obligations_fulfilled.begin(),
                                   post.obligations_fulfilled.end());
    }
  }

  resp.decision = enforcement;
  resp.obligations_fulfilled = std::move(obligations.fulfilled);
  append_reason(resp.reason, obligations.failure);
  resp.final_state = store_.get_activity(req.activity).state;
  resp.elapsed_ms = ms_since(t0);
  return resp;
}

ResponseContext Engine::handle_hold(const ActivityRequest& req) {
  Clock::time_point t0 = Clock::now();
  std::lock_guard<std::mutex> admission(admission_lock(req.activity));
  trace("pep:intercept");

  Txn txn = store_.begin_txn();
  ActivityRecord rec = store_.get_activity(req.activity, txn);
  // No dependency policy governs holds; the enforcement point drives the
  // Running -> Hold edge directly.
  ActivityRecord next =
      apply_transition(rec, ActionId::HoldActivity, Decision::Permit);
  store_.set_state(req.activity, next.state, txn, WriteOrigin::Transition);
  trace("pep:respond");
  txn.commit();

  ResponseContext resp;
  resp.decision = Decision::Permit;
  resp.activity = req.activity;
  resp.final_state = store_.get_activity(req.activity).state;
  resp.elapsed_ms = ms_since(t0);
  return resp;
}

ResponseContext Engine::handle_finish(const ActivityRequest& req) {
  Clock::time_point t0 = Clock::now();
  std::lock_guard<std::mutex> admission(admission_lock(req.activity));
  trace("pep:intercept");

  ResponseContext resp;
  resp.activity = req.activity;

  Txn txn = store_.begin_txn();
  ActivityRecord rec = store_.get_activity(req.activity, txn);
  if (!action_admissible(rec.state, ActionId::FinishActivity)) {
    throw IllegalTransitionError(
        "finishActivity is not admissible from state " +
        std::string(to_string(rec.state)) + " for " + req.activity);
  }

  PolicyEvaluation result =
      decide(req.subject, req.activity, ActionId::FinishActivity, txn);
  Decision enforcement = to_enforcement_decision(result.decision);
  resp.reason = mapped_reason(result.decision);

  if (enforcement == Decision::Deny) txn.discard_provisional_writes();

  trace("pep:respond");
  trace("obligation-service:fulfill");
  ObligationOutcome obligations =
      run_obligations(*this, result.triggered_obligations, enforcement,
                      req.activity, ActionId::FinishActivity, txn);
  if (!obligations.state_updated) {
    enforce_edge(store_, req.activity, ActionId::FinishActivity, enforcement,
                 txn);
  }
  txn.commit();

  for (DeferredObligation task : obligations.deferred) {
    if (task == DeferredObligation::ScheduleContinuity) {
      schedule_continuity(req.activity);
    } else if (task == DeferredObligation::RunPostUpdate) {
      try {
        ResponseContext post = handle_post_update(req.subject, req.activity);
        obligations.fulfilled.insert(obligations.fulfilled.end(),
                                     post.obligations_fulfilled.begin(),
                                     post.obligations_fulfilled.end());
        append_reason(resp.reason, post.reason);
      } catch (const Error& e) {
        append_reason(resp.reason,
                      std::string("post-update failed: ") + e.what());
      }
    }
  }

  resp.decision = enforcement;
  resp.obligations_fulfilled = std::move(obligations.fulfilled);
  resp.final_state = store_.get_activity(req.activity).state;
  resp.elapsed_ms = ms_since(t0);
  return resp;
}

ResponseContext Engine::handle_post_update(const std::string& subject,
                                           const std::string& activity) {
  Txn txn = store_.begin_txn();

  PolicyEvaluation result =
      decide(subject, activity, ActionId::PostUpdate, txn);
  Decision enforcement = to_enforcement_decision(result.decision);

  if (enforcement == Decision::Deny) txn.discard_provisional_writes();

  ObligationOutcome obligations =
      run_obligations(*this, result.triggered_obligations, enforcement,
                      activity, ActionId::PostUpdate, txn);
  if (!obligations.state_updated) {
    enforce_edge(store_, activity, ActionId::PostUpdate, enforcement, txn);
  }
  txn.commit();

  ResponseContext resp;
  resp.decision = enforcement;
  resp.activity = activity;
  resp.reason = mapped_reason(result.decision);
  append_reason(resp.reason, obligations.failure);
  resp.obligations_fulfilled = std::move(obligations.fulfilled);
  resp.final_state = store_.get_activity(activity).state;
  return resp;
}

ContinuityReport Engine::run_continuity(const std::string& activity,
                                        const ContinuityConfig& cfg) {
  return run_continuity_impl(activity, cfg, std::stop_token{}, nullptr);
}

ContinuityReport Engine::run_continuity_impl(const std::string& activity,
                                             const ContinuityConfig& cfg,
                                             std::stop_token stop,
                                             LoopSlot* slot) {
  ContinuityReport report;
  report.activity = activity;

  auto publish = [&] {
    if (!slot) return;
    std::lock_guard<std::mutex> lk(slot->mutex);
    slot->report = report;
  };
  publish();

  Clock::time_point loop_start = Clock::now();
  std::string stop_reason = "exhausted";

  try {
    for (int n = 1; n <= cfg.repetitions; ++n) {
      if (n > 1) {
        // Interval is a minimum delay between evaluations, not a period.
        std::mutex m;
        std::condition_variable_any cv;
        std::unique_lock<std::mutex> lk(m);
        cv.wait_for(lk, stop, std::chrono::milliseconds(cfg.interval_ms),
                    [] { return false; });
        if (stop.stop_requested()) {
          stop_reason = "stopped";
          break;
        }
      }

      ContinuityProbe probe;
      {
        std::lock_guard<std::mutex> lk(hooks_mutex_);
        probe = continuity_probe_;
      }
      if (probe) probe(activity, n);

      std::lock_guard<std::mutex> admission(admission_lock(activity));
      Txn txn = store_.begin_txn();
      ActivityRecord rec = store_.get_activity(activity, txn);
      if (rec.state != ActivityState::Running) {
        txn.rollback();
        stop_reason = "finished";
        break;
      }

      Decision enforcement = Decision::Deny;
      try {
        PolicyEvaluation result =
            decide("system", activity, ActionId::ContinueActivity, txn);
        enforcement = to_enforcement_decision(result.decision);
      } catch (const Error&) {
        // Evaluation failures count as Deny iterations.
        enforcement = Decision::Deny;
      }

      ContinuityIteration iteration{n, enforcement, ms_since(loop_start)};
      if (enforcement == Decision::Deny) {
        // Revocation happens inside the same transaction as the denying
        // evaluation, dropping that evaluation's provisional updates.
        txn.discard_provisional_writes();
        enforce_edge(store_, activity, ActionId::ContinueActivity,
                     Decision::Deny, txn);
        txn.commit();
        report.iterations.push_back(iteration);
        publish();
        stop_reason = "revoked";
        break;
      }
      txn.commit();
      report.iterations.push_back(iteration);
      publish();
    }
  } catch (...) {
    stop_reason = "stopped";
  }

  report.final_state = store_.get_activity(activity).state;
  report.stop_reason = stop_reason;
  report.complete = true;
  publish();
  return report;
}

void Engine::schedule_continuity(const std::string& activity) {
  std::lock_guard<std::mutex> lk(loops_mutex_);
  std::unique_ptr<LoopSlot>& slot = loops_[activity];
  if (slot) {
    std::lock_guard<std::mutex> s(slot->mutex);
    if (!slot->report.complete) return;
  }
  auto fresh = std::make_unique<LoopSlot>();
  fresh->report.activity = activity;
  LoopSlot* raw = fresh.get();
  ContinuityConfig cfg = config_.continuity;
  fresh->thread =
      std::jthread([this, activity, cfg, raw](std::stop_token stop) {
        run_continuity_impl(activity, cfg, stop, raw);
      });
  slot = std::move(fresh);
}

std::optional<ContinuityReport> Engine::continuity_report(
    const std::string& activity) const {
  std::lock_guard<std::mutex> lk(loops_mutex_);
  auto it = loops_.find(activity);
  if (it == loops_.end()) return std::nullopt;
  std::lock_guard<std::mutex> s(it->second->mutex);
  return it->second->report;
}

void Engine::wait_for_continuity(const std::string& activity) {
  LoopSlot* slot = nullptr;
  {
    std::lock_guard<std::mutex> lk(loops_mutex_);
    auto it = loops_.find(activity);
    if (it == loops_.end()) return;
    slot = it->second.get();
  }
  if (slot->thread.joinable()) slot->thread.join();
}

}  // namespace actipol
