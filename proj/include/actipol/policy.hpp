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

#ifndef ACTIPOL_POLICY_HPP
#define ACTIPOL_POLICY_HPP

#include <optional>
#include <string>
#include <vector>

#include "actipol/activity.hpp"
#include "actipol/store.hpp"

namespace actipol {

/// How decisions from child policies (or rules) combine into one result.
enum class CombiningAlg {
  FirstApplicable,
  OnlyOneApplicable,
  PermitOverrides,
  DenyOverrides,
};

inline constexpr int kCombiningAlgCount = 4;

std::string_view to_string(CombiningAlg alg);
CombiningAlg combining_alg_from_string(std::string_view text);

/// One expression node. A flat tagged struct instead of a variant tree so the
/// recursive args vector stays simple; only the fields of the active kind are
/// meaningful.
struct ConditionExpr {
  enum class Kind { Apply, Designator, Literal };

  Kind kind = Kind::Literal;

  // Kind::Apply
  std::string function_id;
  std::vector<ConditionExpr> args;

  // Kind::Designator
  std::string category;
  std::string attribute_id;

  // Kind::Literal
  std::string data_type;
  std::string value;

  bool operator==(const ConditionExpr&) const = default;

  static ConditionExpr apply(std::string function_id,
                             std::vector<ConditionExpr> args);
  static ConditionExpr designator(std::string category,
                                  std::string attribute_id);
  static ConditionExpr literal(std::string value);
};

/// A single target constraint: the request attribute named `attribute_id`
/// must equal `value`. The attribute's category is implied by the target
/// section the expression sits in.
struct MatchExpr {
  std::string attribute_id;
  std::string value;

  bool operator==(const MatchExpr&) const = default;
};

/// Which requests a policy applies to. An empty section matches anything;
/// a non-empty section matches when any one of its expressions holds.
struct Target {
  std::vector<MatchExpr> subjects;
  std::vector<MatchExpr> resources;
  std::vector<MatchExpr> actions;

  bool operator==(const Target&) const = default;
};

/// Iteration binding of a provisional action: the nested condition runs once
/// per entry of the phase's dependent-activity set, with that entry's
/// attributes exposed under `category`.
struct ForAllBinding {
  std::string category;

  bool operator==(const ForAllBinding&) const = default;
};

/// A state update to perform as part of permitting a request: for each bound
/// dependent activity whose guard condition holds, set it to its desired
/// state. The `action` field is fixed to "Update".
struct ProvisionalAction {
  Phase fulfillment_phase = Phase::Pre;
  std::string action;
  std::optional<ForAllBinding> for_all;
  ConditionExpr condition;

  bool operator==(const ProvisionalAction&) const = default;
};

struct Rule {
  std::string rule_id;
  Decision effect = Decision::Permit;  // Permit or Deny only
  std::optional<ConditionExpr> condition;
  std::vector<ProvisionalAction> provisional_actions;

  bool operator==(const Rule&) const = default;
};

struct ObligationExpression {
  std::string obligation_id;
  Decision fulfill_on = Decision::Permit;  // Permit or Deny only
  std::vector<std::pair<std::string, std::string>> parameters;

  bool operator==(const ObligationExpression&) const = default;
};

struct Policy {
  std::string policy_id;
  CombiningAlg rule_combining_alg = CombiningAlg::FirstApplicable;
  Target target;
  std::vector<Rule> rules;
  std::vector<ObligationExpression> obligations;

  bool operator==(const Policy&) const = default;
};

struct PolicySet {
  std::string policy_set_id;
  CombiningAlg policy_combining_alg = CombiningAlg::OnlyOneApplicable;
  std::vector<Policy> policies;

  bool operator==(const PolicySet&) const = default;
};

// -- well-known attribute vocabulary ----------------------------------------

/// Categories a designator or target section can reference.
inline constexpr std::string_view kCategorySubject =
    "urn:oasis:names:tc:xacml:1.0:subject-category:access-subject";
inline constexpr std::string_view kCategoryResource =
    "urn:oasis:names:tc:xacml:3.0:attribute-category:resource";
inline constexpr std::string_view kCategoryAction =
    "urn:oasis:names:tc:xacml:3.0:attribute-category:action";
/// The ForAll-bound dependent activity of a provisional action.
inline constexpr std::string_view kCategoryDependent =
    "urn:xacml-ad:attribute-category:dependent-activity";

inline constexpr std::string_view kAttrSubjectId =
    "urn:oasis:names:tc:xacml:1.0:subject:subject-id";
inline constexpr std::string_view kAttrActionId =
    "urn:oasis:names:tc:xacml:1.0:action:action-id";
/// Identifies the requested activity (resource category) or the bound
/// dependent activity (dependent-activity category).
inline constexpr std::string_view kAttrActivityId =
    "urn:xacml-ad:attribute:activity-id";
/// Desired state of the bound dependent activity.
inline constexpr std::string_view kAttrDesiredState =
    "urn:xacml-ad:attribute:desired-state";

// -- condition function table ------------------------------------------------

/// Argument discipline of a condition function: Boolean functions take Apply
/// sub-expressions, String functions take designators and literals.
enum class ArgKind { Boolean, String };

struct FunctionSig {
  std::string_view id;
  int min_args;
  int max_args;  // -1 = unbounded
  ArgKind arg_kind;
};

inline constexpr std::string_view kFnAnd =
    "urn:oasis:names:tc:xacml:1.0:function:and";
inline constexpr std::string_view kFnOr =
    "urn:oasis:names:tc:xacml:1.0:function:or";
inline constexpr std::string_view kFnNot =
    "urn:oasis:names:tc:xacml:1.0:function:not";
inline constexpr std::string_view kFnStateEqual =
    "urn:xacml-ad:function:state-equal";
inline constexpr std::string_view kFnIsMutable =
    "urn:xacml-ad:function:is-mutable";
inline constexpr std::string_view kFnDependencySetEmpty =
    "urn:xacml-ad:function:dependency-set-empty";
inline constexpr std::string_view kFnAllInDesiredState =
    "urn:xacml-ad:function:all-in-desired-state";
inline constexpr std::string_view kFnChainEmpty =
    "urn:xacml-ad:function:chain-empty";
inline constexpr std::string_view kFnChainAllInRequiredState =
    "urn:xacml-ad:function:chain-all-in-required-state";
inline constexpr std::string_view kFnExistsUnmetMutable =
    "urn:xacml-ad:function:exists-unmet-mutable";
inline constexpr std::string_view kFnExistsUnmetImmutable =
    "urn:xacml-ad:function:exists-unmet-immutable";
inline constexpr std::string_view kFnAllUnmetChainsEmpty =
    "urn:xacml-ad:function:all-unmet-dependent-chains-empty";
inline constexpr std::string_view kFnExistsUnmetChain =
    "urn:xacml-ad:function:exists-unmet-dependent-chain";
inline constexpr std::string_view kFnAllUnmetChainsSatisfied =
    "urn:xacml-ad:function:all-unmet-dependent-chains-satisfied";

/// The closed set of functions a Condition may call; the parser checks ids,
/// arity, and argument kinds against this table at load time.
const std::vector<FunctionSig>& function_table();
const FunctionSig* find_function(std::string_view id);

/// Checks every Apply node in the tree against the function table: known id,
/// arity in range, boolean functions applied to Apply nodes, string functions
/// applied to designators and literals. Throws SchemaViolation on failure.
void validate_condition_expr(const ConditionExpr& expr);

/// Obligation ids with a registered handler; anything else is rejected at
/// load time.
const std::vector<std::string_view>& registered_obligation_ids();

// -- operations ---------------------------------------------------------------

/// Parses an XACML_AD policy document. Element names are resolved through
/// their XML namespaces; the dialect accepts the standard policy elements
/// plus the ProvisionalActions extension and rejects everything else.
PolicySet parse_policy_set(const std::string& document);
PolicySet parse_policy_file(const std::string& path);

/// Deterministic JSON image: stable key order and array order, so two equal
/// PolicySets always serialize to byte-identical text.
std::string to_canonical_json(const PolicySet& ps);
PolicySet from_canonical_json(const std::string& text);

/// Lint diagnostics for a parsed set: rule-ordering hazards under
/// first-applicable and call-policy obligations referencing missing policy
/// ids. Diagnostics never fail the load.
std::vector<std::string> validate_corpus(const PolicySet& ps);

}  // namespace actipol

#endif  // ACTIPOL_POLICY_HPP
