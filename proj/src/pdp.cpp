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

#include "actipol/pdp.hpp"

#include <utility>

#include "actipol/errors.hpp"

namespace actipol {

namespace {

/// Temporarily installs a ForAll binding; restores the previous one on exit
/// so nested and failed evaluations cannot leak a dangling pointer.
class BindingScope {
 public:
  BindingScope(EvaluationContext& ctx, const DependencySpec* binding)
      : ctx_(ctx), previous_(ctx.bound_dependent) {
    ctx_.bound_dependent = binding;
  }
  ~BindingScope() { ctx_.bound_dependent = previous_; }

  BindingScope(const BindingScope&) = delete;
  BindingScope& operator=(const BindingScope&) = delete;

 private:
  EvaluationContext& ctx_;
  const DependencySpec* previous_;
};

std::string resolve_attribute(const EvaluationContext& ctx,
                              const ConditionExpr& designator) {
  const std::string& category = designator.category;
  const std::string& attr = designator.attribute_id;
  if (category == kCategoryResource && attr == kAttrActivityId) {
    return ctx.request.activity_id;
  }
  if (category == kCategoryAction && attr == kAttrActionId) {
    return ctx.request.action_id;
  }
  if (category == kCategorySubject && attr == kAttrSubjectId) {
    return ctx.request.subject_id;
  }
  if (category == kCategoryDependent) {
    if (!ctx.bound_dependent) {
      throw EvaluationError(
          "dependent-activity attribute referenced outside a ForAll binding: " +
          attr);
    }
    if (attr == kAttrActivityId) return ctx.bound_dependent->dependent;
    if (attr == kAttrDesiredState) {
      return std::string(to_string(ctx.bound_dependent->desired_state));
    }
  }
  throw EvaluationError("unresolvable attribute " + attr + " in category " +
                        category);
}

std::string string_arg(const ConditionExpr& expr, EvaluationContext& ctx) {
  switch (expr.kind) {
    case ConditionExpr::Kind::Literal:
      return expr.value;
    case ConditionExpr::Kind::Designator:
      return resolve_attribute(ctx, expr);
    case ConditionExpr::Kind::Apply:
      break;
  }
  throw EvaluationError("expected a string-valued argument, got a function");
}

Phase phase_arg(const std::string& text) {
  try {
    return phase_from_string(text);
  } catch (const SchemaViolationError& e) {
    throw EvaluationError(e.what());
  }
}

ActivityState state_arg(const std::string& text) {
  try {
    return activity_state_from_string(text);
  } catch (const SchemaViolationError& e) {
    throw EvaluationError(e.what());
  }
}

std::vector<DependencySpec> unmet_dependents(EvaluationContext& ctx,
                                             const std::string& subject,
                                             Phase phase) {
  std::vector<DependencySpec> unmet;
  for (const DependencySpec& d : ctx.store->get_dependencies(subject, phase)) {
    if (ctx.store->get_activity(d.dependent, *ctx.txn).state !=
        d.desired_state) {
      unmet.push_back(d);
    }
  }
  return unmet;
}

/// True when the requirement chain below (activity -> target) contains an
/// unmet immutable activity, scanning through unmet mutable requirements.
/// `level` is the level the chain entries sit at; entries past the depth
/// limit are out of scope.
bool chain_has_immutable_blocker(EvaluationContext& ctx,
                                 const std::string& activity,
                                 ActivityState target, int level) {
  if (level > ctx.chain_depth_limit) return false;
  for (const auto& [req_id, req_state] :
       ctx.store->get_transition_dependencies(activity, target)) {
    ActivityRecord rec = ctx.store->get_activity(req_id, *ctx.txn);
    if (rec.state == req_state) continue;
    if (!rec.is_mutable) return true;
    if (chain_has_immutable_blocker(ctx, req_id, req_state, level + 1)) {
      return true;
    }
  }
  return false;
}

void execute_provisional(const ProvisionalAction& pa, EvaluationContext& ctx) {
  if (pa.action != "Update") {
    throw EvaluationError("unsupported provisional action: " + pa.action);
  }
  std::vector<DependencySpec> deps =
      ctx.store->get_dependencies(ctx.request.activity_id,
                                  pa.fulfillment_phase);
  if (pa.for_all) {
    if (pa.for_all->category != kCategoryDependent) {
      throw EvaluationError("unsupported ForAll category: " +
                            pa.for_all->category);
    }
    for (const DependencySpec& dep : deps) {
      BindingScope bind(ctx, &dep);
      if (!eval_condition(pa.condition, ctx)) continue;
      if (ctx.store->get_activity(dep.dependent, *ctx.txn).state ==
          dep.desired_state) {
        continue;
      }
      ctx.store->set_state(dep.dependent, dep.desired_state, *ctx.txn,
                           WriteOrigin::Provisional);
    }
    return;
  }
  // Without ForAll the condition is a single set-level gate; the update then
  // covers every dependent that is both out of its desired state and mutable.
  if (!eval_condition(pa.condition, ctx)) return;
  for (const DependencySpec& dep : deps) {
    ActivityRecord rec = ctx.store->get_activity(dep.dependent, *ctx.txn);
    if (rec.state == dep.desired_state || !rec.is_mutable) continue;
    ctx.store->set_state(dep.dependent, dep.desired_state, *ctx.txn,
                         WriteOrigin::Provisional);
  }
}

void require_usable(const EvaluationContext& ctx) {
  if (!ctx.store || !ctx.txn) {
    throw EvaluationError("evaluation context has no store or transaction");
  }
  if (!ctx.txn->open()) throw NoOpenTransactionError();
  if (ctx.chain_depth_limit < 1) {
    throw EvaluationError("chain_depth_limit must be at least 1");
  }
}

bool section_matches(const std::vector<MatchExpr>& matches,
                     std::string_view category,
                     const RequestContext& request) {
  if (matches.empty()) return true;
  for (const MatchExpr& m : matches) {
    std::string_view actual;
    if (category == kCategoryAction && m.attribute_id == kAttrActionId) {
      actual = request.action_id;
    } else if (category == kCategoryResource &&
               m.attribute_id == kAttrActivityId) {
      actual = request.activity_id;
    } else if (category == kCategorySubject &&
               m.attribute_id == kAttrSubjectId) {
      actual = request.subject_id;
    } else {
      continue;
    }
    if (actual == m.value) return true;
  }
  return false;
}

}  // namespace

bool target_matches(const Target& target, const RequestContext& request) {
  return section_matches(target.subjects, kCategorySubject, request) &&
         section_matches(target.resources, kCategoryResource, request) &&
         section_matches(target.actions, kCategoryAction, request);
}

bool eval_condition(const ConditionExpr& expr, EvaluationContext& ctx) {
  if (expr.kind != ConditionExpr::Kind::Apply) {
    throw EvaluationError("condition must be a function application");
  }
  const std::string& fn = expr.function_id;

  if (fn == kFnAnd) {
    for (const ConditionExpr& arg : expr.args) {
      if (!eval_condition(arg, ctx)) return false;
    }
    return true;
  }
  if (fn == kFnOr) {
    for (const ConditionExpr& arg : expr.args) {
      if (eval_condition(arg, ctx)) return true;
    }
    return false;
  }
  if (fn == kFnNot) {
    if (expr.args.size() != 1) throw EvaluationError("not expects one argument");
    return !eval_condition(expr.args[0], ctx);
  }

  if (expr.args.size() < 1 || expr.args.size() > 2) {
    throw EvaluationError("wrong argument count for " + fn);
  }
  std::string first = string_arg(expr.args[0], ctx);

  if (fn == kFnIsMutable) {
    return ctx.store->get_activity(first, *ctx.txn).is_mutable;
  }

  if (expr.args.size() != 2) {
    throw EvaluationError("wrong argument count for " + fn);
  }
  std::string second = string_arg(expr.args[1], ctx);

  if (fn == kFnStateEqual) {
    ActivityRecord rec = ctx.store->get_activity(first, *ctx.txn);
    return to_string(rec.state) == second;
  }
  if (fn == kFnChainEmpty) {
    return ctx.store
        ->get_transition_dependencies(first, state_arg(second))
        .empty();
  }
  if (fn == kFnChainAllInRequiredState) {
    for (const auto& [req_id, req_state] :
         ctx.store->get_transition_dependencies(first, state_arg(second))) {
      if (ctx.store->get_activity(req_id, *ctx.txn).state != req_state) {
        return false;
      }
    }
    return true;
  }

  // The remaining functions quantify over the (subject, phase) dependent set.
  Phase phase = phase_arg(second);

  if (fn == kFnDependencySetEmpty) {
    return ctx.store->get_dependencies(first, phase).empty();
  }
  if (fn == kFnAllInDesiredState) {
    return unmet_dependents(ctx, first, phase).empty();
  }
  if (fn == kFnExistsUnmetMutable) {
    for (const DependencySpec& d : unmet_dependents(ctx, first, phase)) {
      if (ctx.store->get_activity(d.dependent, *ctx.txn).is_mutable) {
        return true;
      }
    }
    return false;
  }
  if (fn == kFnExistsUnmetImmutable) {
    for (const DependencySpec& d : unmet_dependents(ctx, first, phase)) {
      if (!ctx.store->get_activity(d.dependent, *ctx.txn).is_mutable) {
        return true;
      }
      if (ctx.chain_depth_limit >= 2 &&
          chain_has_immutable_blocker(ctx, d.dependent, d.desired_state, 2)) {
        return true;
      }
    }
    return false;
  }
  if (fn == kFnAllUnmetChainsEmpty) {
    if (ctx.chain_depth_limit < 2) return true;
    for (const DependencySpec& d : unmet_dependents(ctx, first, phase)) {
      if (!ctx.store
               ->get_transition_dependencies(d.dependent, d.desired_state)
               .empty()) {
        return false;
      }
    }
    return true;
  }
  if (fn == kFnExistsUnmetChain) {
    if (ctx.chain_depth_limit < 2) return false;
    for (const DependencySpec& d : unmet_dependents(ctx, first, phase)) {
      if (!ctx.store
               ->get_transition_dependencies(d.dependent, d.desired_state)
               .empty()) {
        return true;
      }
    }
    return false;
  }
  if (fn == kFnAllUnmetChainsSatisfied) {
    if (ctx.chain_depth_limit < 2) return true;
    for (const DependencySpec& d : unmet_dependents(ctx, first, phase)) {
      for (const auto& [req_id, req_state] :
           ctx.store->get_transition_dependencies(d.dependent,
                                                  d.desired_state)) {
        if (ctx.store->get_activity(req_id, *ctx.txn).state != req_state) {
          return false;
        }
      }
    }
    return true;
  }

  throw EvaluationError("unknown condition function: " + fn);
}

Decision evaluate_rule(const Rule& rule, EvaluationContext& ctx) {
  if (rule.condition && !eval_condition(*rule.condition, ctx)) {
    return Decision::NotApplicable;
  }
  for (const ProvisionalAction& pa : rule.provisional_actions) {
    execute_provisional(pa, ctx);
  }
  return rule.effect;
}

PolicyEvaluation evaluate_policy(const Policy& policy,
                                 EvaluationContext& ctx) {
  require_usable(ctx);
  PolicyEvaluation out;
  out.policy_id = policy.policy_id;

  Decision decision = Decision::NotApplicable;
  std::string rule_id;
  try {
    switch (policy.rule_combining_alg) {
      case CombiningAlg::FirstApplicable:
        for (const Rule& rule : policy.rules) {
          Decision d = evaluate_rule(rule, ctx);
          if (d != Decision::NotApplicable) {
            decision = d;
            rule_id = rule.rule_id;
            break;
          }
        }
        break;
      case CombiningAlg::PermitOverrides:
        for (const Rule& rule : policy.rules) {
          Decision d = evaluate_rule(rule, ctx);
          if (d == Decision::Permit) {
            decision = Decision::Permit;
            rule_id = rule.rule_id;
            break;
          }
          if (d == Decision::Deny && decision == Decision::NotApplicable) {
            decision = Decision::Deny;
            rule_id = rule.rule_id;
          }
        }
        break;
      case CombiningAlg::DenyOverrides:
        for (const Rule& rule : policy.rules) {
          Decision d = evaluate_rule(rule, ctx);
          if (d == Decision::Deny) {
            decision = Decision::Deny;
            rule_id = rule.rule_id;
            break;
          }
          if (d == Decision::Permit && decision == Decision::NotApplicable) {
            decision = Decision::Permit;
            rule_id = rule.rule_id;
          }
        }
        break;
      case CombiningAlg::OnlyOneApplicable:
        // Defined for policy sets, not rule lists.
        out.decision = Decision::Indeterminate;
        return out;
    }
  } catch (const EvaluationError&) {
    out.decision = Decision::Indeterminate;
    return out;
  }

  out.decision = decision;
  out.rule_id = std::move(rule_id);
  if (decision == Decision::Permit || decision == Decision::Deny) {
    for (const ObligationExpression& o : policy.obligations) {
      if (o.fulfill_on == decision) out.triggered_obligations.push_back(o);
    }
  }
  return out;
}

PolicyEvaluation evaluate(const PolicySet& ps, EvaluationContext& ctx) {
  require_usable(ctx);
  PolicyEvaluation out;
  if (ps.policy_combining_alg != CombiningAlg::OnlyOneApplicable) {
    out.decision = Decision::Indeterminate;
    return out;
  }
  const Policy* chosen = nullptr;
  for (const Policy& policy : ps.policies) {
    if (!target_matches(policy.target, ctx.request)) continue;
    if (chosen) {
      out.decision = Decision::Indeterminate;
      return out;
    }
    chosen = &policy;
  }
  if (!chosen) {
    out.decision = Decision::NotApplicable;
    return out;
  }
  return evaluate_policy(*chosen, ctx);
}

Decision to_enforcement_decision(Decision d) {
  return d == Decision::Permit ? Decision::Permit : Decision::Deny;
}

}  // namespace actipol
