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

#ifndef ACTIPOL_PDP_HPP
#define ACTIPOL_PDP_HPP

#include <string>
#include <vector>

#include "actipol/policy.hpp"
#include "actipol/store.hpp"

namespace actipol {

/// Attributes of one access request, as assembled by the context handler.
struct RequestContext {
  std::string subject_id;
  /// The requested activity (the request's resource).
  std::string activity_id;
  /// Wire form of the requested action, e.g. "startActivity".
  std::string action_id;
};

/// Everything one evaluation needs: the request, the information point, the
/// open transaction that carries provisional writes, and the chain scope.
///
/// `chain_depth_limit` bounds how far condition functions look down the
/// transition-dependency chain. Level 1 is the direct dependent set; level 2
/// is the dependents' own requirements. Below 2, chains are invisible.
struct EvaluationContext {
  RequestContext request;
  Store* store = nullptr;
  Txn* txn = nullptr;
  int chain_depth_limit = 2;

  /// Bound dependency while a ForAll iteration runs; resolves the
  /// dependent-activity category attributes. Null outside ForAll.
  const DependencySpec* bound_dependent = nullptr;
};

/// Outcome of evaluating a policy or policy set.
struct PolicyEvaluation {
  Decision decision = Decision::NotApplicable;
  /// Obligations of the decided policy whose FulfillOn equals the decision.
  std::vector<ObligationExpression> triggered_obligations;
  /// Which policy decided; empty when no target matched.
  std::string policy_id;
  /// Which rule decided; empty when no rule applied.
  std::string rule_id;
};

/// True when every non-empty target section has at least one match whose
/// request attribute equals its literal value. Empty sections match all.
bool target_matches(const Target& target, const RequestContext& request);

/// Evaluates one condition expression to a boolean. Throws EvaluationError
/// for unresolvable attributes or malformed calls; UnknownActivityError
/// propagates when a referenced activity is not stored.
bool eval_condition(const ConditionExpr& expr, EvaluationContext& ctx);

/// Evaluates one rule: NotApplicable when the condition is false, otherwise
/// the rule's effect. When the rule applies, its provisional actions run
/// against ctx.txn before the effect is returned.
Decision evaluate_rule(const Rule& rule, EvaluationContext& ctx);

/// Combines the policy's rules (target is assumed to have matched already).
/// A condition evaluation failure yields Indeterminate.
PolicyEvaluation evaluate_policy(const Policy& policy, EvaluationContext& ctx);

/// Entry point. Under only-one-applicable: zero matching targets is
/// NotApplicable, more than one is Indeterminate, exactly one defers to the
/// policy. The corpus pins only-one-applicable at the set level; any other
/// set-level algorithm evaluates Indeterminate.
PolicyEvaluation evaluate(const PolicySet& ps, EvaluationContext& ctx);

/// Deny-biased mapping at the enforcement boundary: Permit stays Permit,
/// everything else is Deny.
Decision to_enforcement_decision(Decision d);

}  // namespace actipol

#endif  // ACTIPOL_PDP_HPP
