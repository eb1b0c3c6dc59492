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

#include <json.hpp>

#include "actipol/errors.hpp"
#include "actipol/policy.hpp"

namespace actipol {

namespace {

constexpr std::string_view kStringDataType =
    "http://www.w3.org/2001/XMLSchema#string";

using ordered_json = nlohmann::ordered_json;

}  // namespace

ConditionExpr ConditionExpr::apply(std::string function_id,
                                   std::vector<ConditionExpr> args) {
  ConditionExpr e;
  e.kind = Kind::Apply;
  e.function_id = std::move(function_id);
  e.args = std::move(args);
  return e;
}

ConditionExpr ConditionExpr::designator(std::string category,
                                        std::string attribute_id) {
  ConditionExpr e;
  e.kind = Kind::Designator;
  e.category = std::move(category);
  e.attribute_id = std::move(attribute_id);
  return e;
}

ConditionExpr ConditionExpr::literal(std::string value) {
  ConditionExpr e;
  e.kind = Kind::Literal;
  e.data_type = kStringDataType;
  e.value = std::move(value);
  return e;
}

std::string_view to_string(CombiningAlg alg) {
  switch (alg) {
    case CombiningAlg::FirstApplicable: return "first-applicable";
    case CombiningAlg::OnlyOneApplicable: return "only-one-applicable";
    case CombiningAlg::PermitOverrides: return "permit-overrides";
    case CombiningAlg::DenyOverrides: return "deny-overrides";
  }
  return "?";
}

CombiningAlg combining_alg_from_string(std::string_view text) {
  // Full XACML algorithm URNs are accepted alongside the short names used in
  // canonical JSON; the URN's policy-/rule- flavor does not matter here.
  auto tail = text;
  if (auto pos = tail.rfind(':'); pos != std::string_view::npos) {
    tail = tail.substr(pos + 1);
  }
  for (int i = 0; i < kCombiningAlgCount; ++i) {
    auto alg = static_cast<CombiningAlg>(i);
    if (to_string(alg) == tail) return alg;
  }
  throw SchemaViolationError("unknown combining algorithm: " +
                             std::string(text));
}

const std::vector<FunctionSig>& function_table() {
  static const std::vector<FunctionSig> table{
      {kFnAnd, 0, -1, ArgKind::Boolean},
      {kFnOr, 0, -1, ArgKind::Boolean},
      {kFnNot, 1, 1, ArgKind::Boolean},
      {kFnStateEqual, 2, 2, ArgKind::String},
      {kFnIsMutable, 1, 1, ArgKind::String},
      {kFnDependencySetEmpty, 2, 2, ArgKind::String},
      {kFnAllInDesiredState, 2, 2, ArgKind::String},
      {kFnChainEmpty, 2, 2, ArgKind::String},
      {kFnChainAllInRequiredState, 2, 2, ArgKind::String},
      {kFnExistsUnmetMutable, 2, 2, ArgKind::String},
      {kFnExistsUnmetImmutable, 2, 2, ArgKind::String},
      {kFnAllUnmetChainsEmpty, 2, 2, ArgKind::String},
      {kFnExistsUnmetChain, 2, 2, ArgKind::String},
      {kFnAllUnmetChainsSatisfied, 2, 2, ArgKind::String},
  };
  return table;
}

const FunctionSig* find_function(std::string_view id) {
  for (const FunctionSig& sig : function_table()) {
    if (sig.id == id) return &sig;
  }
  return nullptr;
}

void validate_condition_expr(const ConditionExpr& expr) {
  if (expr.kind != ConditionExpr::Kind::Apply) return;
  const FunctionSig* sig = find_function(expr.function_id);
  if (!sig) throw UnknownFunctionError(expr.function_id);
  int count = static_cast<int>(expr.args.size());
  if (count < sig->min_args || (sig->max_args >= 0 && count > sig->max_args)) {
    throw SchemaViolationError("function '" + expr.function_id +
                               "' called with " + std::to_string(count) +
                               " arguments");
  }
  for (const ConditionExpr& arg : expr.args) {
    bool is_boolean = arg.kind == ConditionExpr::Kind::Apply;
    if (sig->arg_kind == ArgKind::Boolean && !is_boolean) {
      throw SchemaViolationError("function '" + expr.function_id +
                                 "' takes boolean arguments only");
    }
    if (sig->arg_kind == ArgKind::String && is_boolean) {
      throw SchemaViolationError("function '" + expr.function_id +
                                 "' takes attribute arguments only");
    }
    validate_condition_expr(arg);
  }
}

const std::vector<std::string_view>& registered_obligation_ids() {
  static const std::vector<std::string_view> ids{
      "updateRequestedActivityState",
      "call-continueActivityPolicy",
      "call-postUpdatePolicy",
  };
  return ids;
}

// ---------------------------------------------------------------------------
// canonical JSON

namespace {

ordered_json expr_to_json(const ConditionExpr& e) {
  switch (e.kind) {
    case ConditionExpr::Kind::Apply: {
      ordered_json args = ordered_json::array();
      for (const ConditionExpr& a : e.args) args.push_back(expr_to_json(a));
      return {{"apply",
               {{"function_id", e.function_id}, {"args", std::move(args)}}}};
    }
    case ConditionExpr::Kind::Designator:
      return {{"designator",
               {{"category", e.category}, {"attribute_id", e.attribute_id}}}};
    case ConditionExpr::Kind::Literal:
      return {{"literal", {{"data_type", e.data_type}, {"value", e.value}}}};
  }
  throw EvaluationError("corrupt expression node");
}

ordered_json matches_to_json(const std::vector<MatchExpr>& matches) {
  ordered_json out = ordered_json::array();
  for (const MatchExpr& m : matches) {
    out.push_back({{"attribute_id", m.attribute_id}, {"value", m.value}});
  }
  return out;
}

ordered_json provisional_to_json(const ProvisionalAction& pa) {
  ordered_json j;
  j["fulfillment_phase"] = std::string(to_string(pa.fulfillment_phase));
  j["action"] = pa.action;
  if (pa.for_all) {
    j["for_all"] = {{"category", pa.for_all->category}};
  } else {
    j["for_all"] = nullptr;
  }
  j["condition"] = expr_to_json(pa.condition);
  return j;
}

ConditionExpr expr_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.size() != 1) {
    throw SchemaViolationError("expression node must be a one-key object");
  }
  if (j.contains("apply")) {
    const auto& a = j.at("apply");
    std::vector<ConditionExpr> args;
    for (const auto& arg : a.at("args")) args.push_back(expr_from_json(arg));
    return ConditionExpr::apply(a.at("function_id").get<std::string>(),
                                std::move(args));
  }
  if (j.contains("designator")) {
    const auto& d = j.at("designator");
    return ConditionExpr::designator(d.at("category").get<std::string>(),
                                     d.at("attribute_id").get<std::string>());
  }
  if (j.contains("literal")) {
    const auto& l = j.at("literal");
    ConditionExpr e = ConditionExpr::literal(l.at("value").get<std::string>());
    e.data_type = l.at("data_type").get<std::string>();
    return e;
  }
  throw SchemaViolationError("expression node kind not recognized");
}

std::vector<MatchExpr> matches_from_json(const nlohmann::json& j) {
  std::vector<MatchExpr> out;
  for (const auto& m : j) {
    out.push_back({m.at("attribute_id").get<std::string>(),
                   m.at("value").get<std::string>()});
  }
  return out;
}

Decision effect_from_json(const std::string& text) {
  Decision d = decision_from_string(text);
  if (d != Decision::Permit && d != Decision::Deny) {
    throw SchemaViolationError("effect must be permit or deny, got: " + text);
  }
  return d;
}

}  // namespace

std::string to_canonical_json(const PolicySet& ps) {
  ordered_json root;
  root["policy_set_id"] = ps.policy_set_id;
  root["policy_combining_alg"] = std::string(to_string(ps.policy_combining_alg));
  root["policies"] = ordered_json::array();
  for (const Policy& p : ps.policies) {
    ordered_json pj;
    pj["policy_id"] = p.policy_id;
    pj["rule_combining_alg"] = std::string(to_string(p.rule_combining_alg));
    pj["target"] = {{"subjects", matches_to_json(p.target.subjects)},
                    {"resources", matches_to_json(p.target.resources)},
                    {"actions", matches_to_json(p.target.actions)}};
    pj["rules"] = ordered_json::array();
    for (const Rule& r : p.rules) {
      ordered_json rj;
      rj["rule_id"] = r.rule_id;
      rj["effect"] = std::string(to_string(r.effect));
      rj["condition"] =
          r.condition ? expr_to_json(*r.condition) : ordered_json(nullptr);
      rj["provisional_actions"] = ordered_json::array();
      for (const ProvisionalAction& pa : r.provisional_actions) {
        rj["provisional_actions"].push_back(provisional_to_json(pa));
      }
      pj["rules"].push_back(std::move(rj));
    }
    pj["obligations"] = ordered_json::array();
    for (const ObligationExpression& o : p.obligations) {
      ordered_json oj;
      oj["obligation_id"] = o.obligation_id;
      oj["fulfill_on"] = std::string(to_string(o.fulfill_on));
      oj["parameters"] = ordered_json::array();
      for (const auto& [key, value] : o.parameters) {
        oj["parameters"].push_back({{"key", key}, {"value", value}});
      }
      pj["obligations"].push_back(std::move(oj));
    }
    root["policies"].push_back(std::move(pj));
  }
  return root.dump(2);
}

PolicySet from_canonical_json(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw JsonSyntaxError(std::string("policy JSON is not valid: ") + e.what());
  }
  PolicySet ps;
  try {
    ps.policy_set_id = root.at("policy_set_id").get<std::string>();
    ps.policy_combining_alg =
        combining_alg_from_string(root.at("policy_combining_alg").get<std::string>());
    for (const auto& pj : root.at("policies")) {
      Policy p;
      p.policy_id = pj.at("policy_id").get<std::string>();
      p.rule_combining_alg = combining_alg_from_string(
          pj.at("rule_combining_alg").get<std::string>());
      const auto& tj = pj.at("target");
      p.target.subjects = matches_from_json(tj.at("subjects"));
      p.target.resources = matches_from_json(tj.at("resources"));
      p.target.actions = matches_from_json(tj.at("actions"));
      for (const auto& rj : pj.at("rules")) {
        Rule r;
        r.rule_id = rj.at("rule_id").get<std::string>();
        r.effect = effect_from_json(rj.at("effect").get<std::string>());
        if (!rj.at("condition").is_null()) {
          r.condition = expr_from_json(rj.at("condition"));
          validate_condition_expr(*r.condition);
        }
        for (const auto& paj : rj.at("provisional_actions")) {
          ProvisionalAction pa;
          pa.fulfillment_phase =
              phase_from_string(paj.at("fulfillment_phase").get<std::string>());
          pa.action = paj.at("action").get<std::string>();
          if (!paj.at("for_all").is_null()) {
            pa.for_all = ForAllBinding{
                paj.at("for_all").at("category").get<std::string>()};
          }
          pa.condition = expr_from_json(paj.at("condition"));
          validate_condition_expr(pa.condition);
          r.provisional_actions.push_back(std::move(pa));
        }
        p.rules.push_back(std::move(r));
      }
      for (const auto& oj : pj.at("obligations")) {
        ObligationExpression o;
        o.obligation_id = oj.at("obligation_id").get<std::string>();
        bool registered = false;
        for (std::string_view id : registered_obligation_ids()) {
          if (id == o.obligation_id) registered = true;
        }
        if (!registered) throw UnknownObligationError(o.obligation_id);
        o.fulfill_on = effect_from_json(oj.at("fulfill_on").get<std::string>());
        for (const auto& param : oj.at("parameters")) {
          o.parameters.emplace_back(param.at("key").get<std::string>(),
                                    param.at("value").get<std::string>());
        }
        p.obligations.push_back(std::move(o));
      }
      ps.policies.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaViolationError(std::string("malformed policy JSON: ") +
                               e.what());
  }
  return ps;
}

// ---------------------------------------------------------------------------
// lint

std::vector<std::string> validate_corpus(const PolicySet& ps) {
  std::vector<std::string> diagnostics;

  for (const Policy& p : ps.policies) {
    if (p.rule_combining_alg == CombiningAlg::FirstApplicable) {
      for (size_t i = 0; i + 1 < p.rules.size(); ++i) {
        if (!p.rules[i].condition) {
          diagnostics.push_back(
              "policy '" + p.policy_id + "': unconditioned rule '" +
              p.rules[i].rule_id +
              "' shadows every later rule under first-applicable");
        }
      }
    }
    for (const ObligationExpression& o : p.obligations) {
      constexpr std::string_view kCallPrefix = "call-";
      if (o.obligation_id.rfind(kCallPrefix, 0) != 0) continue;
      // The referenced policy id comes from an explicit policy-id parameter
      // when present, otherwise from the obligation id itself.
      std::string referenced = o.obligation_id.substr(kCallPrefix.size());
      for (const auto& [key, value] : o.parameters) {
        if (key == "policy-id") referenced = value;
      }
      bool found = false;
      for (const Policy& q : ps.policies) {
        if (q.policy_id == referenced) found = true;
      }
      if (!found) {
        diagnostics.push_back("policy '" + p.policy_id + "': obligation '" +
                              o.obligation_id +
                              "' references unknown policy '" + referenced +
                              "'");
      }
    }
  }
  return diagnostics;
}

}  // namespace actipol
