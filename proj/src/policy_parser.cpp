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

// XML front end for the policy dialect. Boost.PropertyTree tokenizes the
// document; everything above that (namespace resolution, element and
// attribute vocabulary, arity checks) is done here so that two documents
// differing only in prefixes or attribute order load into equal models.

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "actipol/errors.hpp"
#include "actipol/policy.hpp"

namespace actipol {

namespace {

namespace pt = boost::property_tree;

constexpr std::string_view kXacmlNs =
    "urn:oasis:names:tc:xacml:3.0:core:schema:wd-17";
constexpr std::string_view kXacmlAdNs = "urn:xacml-ad:schema:1.0";
constexpr std::string_view kStringDataType =
    "http://www.w3.org/2001/XMLSchema#string";
constexpr std::string_view kStringEqualFn =
    "urn:oasis:names:tc:xacml:1.0:function:string-equal";

/// An element with its name resolved against the in-scope namespace
/// declarations and its non-namespace attributes collected by local name.
struct Element {
  std::string ns;
  std::string local;
  const pt::ptree* node = nullptr;
  std::map<std::string, std::string> attrs;
  std::map<std::string, std::string> ns_scope;  // prefix ("" = default) -> URI

  std::string text() const { return node->get_value<std::string>(); }

  bool is(std::string_view want_ns, std::string_view want_local) const {
    return ns == want_ns && local == want_local;
  }

  std::string display_name() const { return "{" + ns + "}" + local; }
};

std::pair<std::string, std::string> split_qname(const std::string& raw) {
  auto pos = raw.find(':');
  if (pos == std::string::npos) return {"", raw};
  return {raw.substr(0, pos), raw.substr(pos + 1)};
}

Element resolve_element(const std::string& raw_name, const pt::ptree& node,
                        const std::map<std::string, std::string>& parent_scope) {
  Element out;
  out.node = &node;
  out.ns_scope = parent_scope;

  if (auto attrs = node.get_child_optional("<xmlattr>")) {
    for (const auto& [attr_name, attr_node] : *attrs) {
      std::string value = attr_node.get_value<std::string>();
      if (attr_name == "xmlns") {
        out.ns_scope[""] = value;
      } else if (attr_name.rfind("xmlns:", 0) == 0) {
        out.ns_scope[attr_name.substr(6)] = value;
      } else {
        auto [prefix, local] = split_qname(attr_name);
        if (!prefix.empty()) {
          throw SchemaViolationError("prefixed attribute not supported: " +
                                     attr_name);
        }
        out.attrs[local] = std::move(value);
      }
    }
  }

  auto [prefix, local] = split_qname(raw_name);
  out.local = local;
  auto it = out.ns_scope.find(prefix);
  if (it == out.ns_scope.end()) {
    throw SchemaViolationError("element '" + raw_name +
                               "' uses an undeclared namespace prefix");
  }
  out.ns = it->second;
  return out;
}

std::vector<Element> children_of(const Element& parent) {
  std::vector<Element> out;
  for (const auto& [name, node] : *parent.node) {
    if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
    if (name == "<xmltext>") {
      throw SchemaViolationError("unexpected text content inside " +
                                 parent.display_name());
    }
    out.push_back(resolve_element(name, node, parent.ns_scope));
  }
  return out;
}

[[noreturn]] void unexpected_element(const Element& parent,
                                     const Element& child) {
  throw SchemaViolationError("unexpected element " + child.display_name() +
                             " inside " + parent.display_name());
}

/// Enforces the attribute vocabulary of one element.
void check_attrs(const Element& e, const std::set<std::string>& required,
                 const std::set<std::string>& optional = {}) {
  for (const std::string& name : required) {
    if (!e.attrs.contains(name)) {
      throw SchemaViolationError(e.display_name() +
                                 " is missing required attribute '" + name +
                                 "'");
    }
  }
  for (const auto& [name, _] : e.attrs) {
    if (!required.contains(name) && !optional.contains(name)) {
      throw SchemaViolationError(e.display_name() +
                                 " has unexpected attribute '" + name + "'");
    }
  }
}

Decision parse_effect(const Element& e, const std::string& attr) {
  const std::string& text = e.attrs.at(attr);
  if (text == "Permit") return Decision::Permit;
  if (text == "Deny") return Decision::Deny;
  throw SchemaViolationError(e.display_name() + " " + attr +
                             " must be Permit or Deny, got '" + text + "'");
}

// -- condition expressions ----------------------------------------------------

ConditionExpr parse_expr(const Element& e);

ConditionExpr parse_apply(const Element& e) {
  check_attrs(e, {"FunctionId"});
  std::vector<ConditionExpr> args;
  for (const Element& child : children_of(e)) args.push_back(parse_expr(child));
  return ConditionExpr::apply(e.attrs.at("FunctionId"), std::move(args));
}

ConditionExpr parse_designator(const Element& e) {
  check_attrs(e, {"Category", "AttributeId"}, {"DataType", "MustBePresent"});
  if (auto it = e.attrs.find("DataType");
      it != e.attrs.end() && it->second != kStringDataType) {
    throw SchemaViolationError("only string attributes are supported, got " +
                               it->second);
  }
  return ConditionExpr::designator(e.attrs.at("Category"),
                                   e.attrs.at("AttributeId"));
}

ConditionExpr parse_literal(const Element& e) {
  check_attrs(e, {"DataType"});
  if (e.attrs.at("DataType") != kStringDataType) {
    throw SchemaViolationError("only string literals are supported, got " +
                               e.attrs.at("DataType"));
  }
  return ConditionExpr::literal(e.text());
}

ConditionExpr parse_expr(const Element& e) {
  if (e.is(kXacmlNs, "Apply")) return parse_apply(e);
  if (e.is(kXacmlNs, "AttributeDesignator")) return parse_designator(e);
  if (e.is(kXacmlNs, "AttributeValue")) return parse_literal(e);
  throw SchemaViolationError("expected an expression, got " +
                             e.display_name());
}

ConditionExpr parse_condition(const Element& e) {
  check_attrs(e, {});
  std::vector<Element> children = children_of(e);
  if (children.size() != 1) {
    throw SchemaViolationError(
        "Condition must hold exactly one expression, got " +
        std::to_string(children.size()));
  }
  ConditionExpr expr = parse_expr(children[0]);
  validate_condition_expr(expr);
  return expr;
}

// -- target ---------------------------------------------------------------------

MatchExpr parse_match(const Element& e, std::string_view section_category) {
  check_attrs(e, {"MatchId"});
  if (e.attrs.at("MatchId") != kStringEqualFn) {
    throw SchemaViolationError("only string-equal matches are supported");
  }
  std::string value;
  std::string attribute_id;
  bool saw_value = false;
  bool saw_designator = false;
  for (const Element& child : children_of(e)) {
    if (child.is(kXacmlNs, "AttributeValue")) {
      if (saw_value) {
        throw SchemaViolationError("Match holds more than one AttributeValue");
      }
      ConditionExpr lit = parse_literal(child);
      value = lit.value;
      saw_value = true;
    } else if (child.is(kXacmlNs, "AttributeDesignator")) {
      if (saw_designator) {
        throw SchemaViolationError(
            "Match holds more than one AttributeDesignator");
      }
      check_attrs(child, {"AttributeId"},
                  {"Category", "DataType", "MustBePresent"});
      if (auto it = child.attrs.find("Category");
          it != child.attrs.end() && it->second != section_category) {
        throw SchemaViolationError(
            "designator category '" + it->second +
            "' contradicts its target section's category");
      }
      attribute_id = child.attrs.at("AttributeId");
      saw_designator = true;
    } else {
      unexpected_element(e, child);
    }
  }
  if (!saw_value || !saw_designator) {
    throw SchemaViolationError(
        "Match needs one AttributeValue and one AttributeDesignator");
  }
  return {std::move(attribute_id), std::move(value)};
}

std::vector<MatchExpr> parse_target_section(const Element& section,
                                            std::string_view entry_name,
                                            std::string_view category) {
  check_attrs(section, {});
  std::vector<MatchExpr> out;
  for (const Element& entry : children_of(section)) {
    if (!entry.is(kXacmlNs, entry_name)) unexpected_element(section, entry);
    check_attrs(entry, {});
    for (const Element& match : children_of(entry)) {
      if (!match.is(kXacmlNs, "Match")) unexpected_element(entry, match);
      out.push_back(parse_match(match, category));
    }
  }
  return out;
}

Target parse_target(const Element& e) {
  check_attrs(e, {});
  Target target;
  for (const Element& child : children_of(e)) {
    if (child.is(kXacmlNs, "Subjects")) {
      target.subjects =
          parse_target_section(child, "Subject", kCategorySubject);
    } else if (child.is(kXacmlNs, "Resources")) {
      target.resources =
          parse_target_section(child, "Resource", kCategoryResource);
    } else if (child.is(kXacmlNs, "Actions")) {
      target.actions = parse_target_section(child, "Action", kCategoryAction);
    } else {
      unexpected_element(e, child);
    }
  }
  return target;
}

// -- provisional actions ---------------------------------------------------------

ProvisionalAction parse_provisional_action(const Element& e) {
  check_attrs(e, {"FulfillmentPhase", "ProvisionalAction"});
  ProvisionalAction pa;
  pa.fulfillment_phase = phase_from_string(e.attrs.at("FulfillmentPhase"));
  pa.action = e.attrs.at("ProvisionalAction");
  if (pa.action != "Update") {
    throw SchemaViolationError("ProvisionalAction must be \"Update\", got '" +
                               pa.action + "'");
  }
  bool saw_condition = false;
  for (const Element& child : children_of(e)) {
    if (child.is(kXacmlAdNs, "ForAll")) {
      if (pa.for_all) {
        throw SchemaViolationError(
            "ProvisionalAction holds more than one ForAll");
      }
      check_attrs(child, {"Category"});
      pa.for_all = ForAllBinding{child.attrs.at("Category")};
    } else if (child.is(kXacmlNs, "Condition")) {
      if (saw_condition) {
        throw SchemaViolationError(
            "ProvisionalAction holds more than one Condition");
      }
      pa.condition = parse_condition(child);
      saw_condition = true;
    } else {
      unexpected_element(e, child);
    }
  }
  if (!saw_condition) {
    throw SchemaViolationError("ProvisionalAction is missing its Condition");
  }
  return pa;
}

std::vector<ProvisionalAction> parse_provisional_actions(const Element& e) {
  check_attrs(e, {});
  std::vector<ProvisionalAction> out;
  for (const Element& child : children_of(e)) {
    if (!child.is(kXacmlAdNs, "ProvisionalAction")) {
      unexpected_element(e, child);
    }
    out.push_back(parse_provisional_action(child));
  }
  return out;
}

// -- rules, obligations, policies --------------------------------------------------

Rule parse_rule(const Element& e) {
  check_attrs(e, {"RuleId", "Effect"});
  Rule rule;
  rule.rule_id = e.attrs.at("RuleId");
  rule.effect = parse_effect(e, "Effect");
  for (const Element& child : children_of(e)) {
    if (child.is(kXacmlNs, "Condition")) {
      if (rule.condition) {
        throw SchemaViolationError("rule '" + rule.rule_id +
                                   "' holds more than one Condition");
      }
      rule.condition = parse_condition(child);
    } else if (child.is(kXacmlAdNs, "ProvisionalActions")) {
      if (!rule.provisional_actions.empty()) {
        throw SchemaViolationError("rule '" + rule.rule_id +
                                   "' holds more than one ProvisionalActions");
      }
      rule.provisional_actions = parse_provisional_actions(child);
    } else {
      unexpected_element(e, child);
    }
  }
  return rule;
}

ObligationExpression parse_obligation(const Element& e) {
  check_attrs(e, {"ObligationId", "FulfillOn"});
  ObligationExpression o;
  o.obligation_id = e.attrs.at("ObligationId");
  o.fulfill_on = parse_effect(e, "FulfillOn");
  bool registered = false;
  for (std::string_view id : registered_obligation_ids()) {
    if (id == o.obligation_id) registered = true;
  }
  if (!registered) throw UnknownObligationError(o.obligation_id);
  for (const Element& child : children_of(e)) {
    if (!child.is(kXacmlNs, "AttributeAssignmentExpression")) {
      unexpected_element(e, child);
    }
    check_attrs(child, {"AttributeId"});
    std::vector<Element> values = children_of(child);
    if (values.size() != 1 || !values[0].is(kXacmlNs, "AttributeValue")) {
      throw SchemaViolationError(
          "AttributeAssignmentExpression needs exactly one AttributeValue");
    }
    ConditionExpr lit = parse_literal(values[0]);
    o.parameters.emplace_back(child.attrs.at("AttributeId"), lit.value);
  }
  return o;
}

/// Phase a policy's provisional actions must declare, keyed by the action
/// its target matches. Policies matching other actions may not carry
/// provisional actions at all.
std::optional<Phase> phase_of_policy(const Policy& p) {
  if (p.target.actions.size() != 1) return std::nullopt;
  const MatchExpr& m = p.target.actions[0];
  if (m.attribute_id != kAttrActionId) return std::nullopt;
  if (m.value == to_string(ActionId::StartActivity)) return Phase::Pre;
  if (m.value == to_string(ActionId::ContinueActivity)) return Phase::Ongoing;
  if (m.value == to_string(ActionId::PostUpdate)) return Phase::Post;
  return std::nullopt;
}

Policy parse_policy(const Element& e) {
  check_attrs(e, {"PolicyId", "RuleCombiningAlgId"});
  Policy policy;
  policy.policy_id = e.attrs.at("PolicyId");
  policy.rule_combining_alg =
      combining_alg_from_string(e.attrs.at("RuleCombiningAlgId"));

  bool saw_target = false;
  std::set<std::string> rule_ids;
  for (const Element& child : children_of(e)) {
    if (child.is(kXacmlNs, "Target")) {
      if (saw_target) {
        throw SchemaViolationError("policy '" + policy.policy_id +
                                   "' holds more than one Target");
      }
      policy.target = parse_target(child);
      saw_target = true;
    } else if (child.is(kXacmlNs, "Rule")) {
      Rule rule = parse_rule(child);
      if (!rule_ids.insert(rule.rule_id).second) {
        throw SchemaViolationError("duplicate rule id '" + rule.rule_id +
                                   "' in policy '" + policy.policy_id + "'");
      }
      policy.rules.push_back(std::move(rule));
    } else if (child.is(kXacmlNs, "ObligationExpressions")) {
      if (!policy.obligations.empty()) {
        throw SchemaViolationError(
            "policy '" + policy.policy_id +
            "' holds more than one ObligationExpressions");
      }
      for (const Element& oblig : children_of(child)) {
        if (!oblig.is(kXacmlNs, "ObligationExpression")) {
          unexpected_element(child, oblig);
        }
        policy.obligations.push_back(parse_obligation(oblig));
      }
    } else {
      unexpected_element(e, child);
    }
  }
  if (!saw_target) {
    throw SchemaViolationError("policy '" + policy.policy_id +
                               "' is missing its Target");
  }

  std::optional<Phase> expected_phase = phase_of_policy(policy);
  for (const Rule& rule : policy.rules) {
    for (const ProvisionalAction& pa : rule.provisional_actions) {
      if (!expected_phase) {
        throw SchemaViolationError(
            "policy '" + policy.policy_id +
            "' carries provisional actions but matches no phased action");
      }
      if (pa.fulfillment_phase != *expected_phase) {
        throw SchemaViolationError(
            "rule '" + rule.rule_id + "': FulfillmentPhase '" +
            std::string(to_string(pa.fulfillment_phase)) +
            "' does not match the policy's action phase '" +
            std::string(to_string(*expected_phase)) + "'");
      }
    }
  }
  return policy;
}

PolicySet parse_policy_set_element(const Element& e) {
  check_attrs(e, {"PolicySetId", "PolicyCombiningAlgId"});
  PolicySet ps;
  ps.policy_set_id = e.attrs.at("PolicySetId");
  ps.policy_combining_alg =
      combining_alg_from_string(e.attrs.at("PolicyCombiningAlgId"));
  std::set<std::string> policy_ids;
  for (const Element& child : children_of(e)) {
    if (!child.is(kXacmlNs, "Policy")) unexpected_element(e, child);
    Policy policy = parse_policy(child);
    if (!policy_ids.insert(policy.policy_id).second) {
      throw SchemaViolationError("duplicate policy id '" + policy.policy_id +
                                 "'");
    }
    ps.policies.push_back(std::move(policy));
  }
  return ps;
}

}  // namespace

PolicySet parse_policy_set(const std::string& document) {
  pt::ptree doc;
  std::istringstream in(document);
  try {
    pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw XmlSyntaxError(std::string("policy document is not well-formed: ") +
                         e.what());
  }

  const std::map<std::string, std::string> empty_scope;
  std::optional<Element> root;
  for (const auto& [name, node] : doc) {
    if (name == "<xmlcomment>" || name.rfind("<?", 0) == 0) continue;
    if (root) throw SchemaViolationError("more than one root element");
    root = resolve_element(name, node, empty_scope);
  }
  if (!root) throw SchemaViolationError("document has no root element");
  if (!root->is(kXacmlNs, "PolicySet")) {
    throw SchemaViolationError("root element must be PolicySet, got " +
                               root->display_name());
  }
  return parse_policy_set_element(*root);
}

PolicySet parse_policy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open policy file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_policy_set(buf.str());
}

}  // namespace actipol
