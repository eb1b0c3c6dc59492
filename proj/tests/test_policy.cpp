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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "actipol/errors.hpp"
#include "actipol/policy.hpp"

using namespace actipol;

namespace {

#ifndef ACTIPOL_POLICY_FILE
#error "ACTIPOL_POLICY_FILE must point at the shipped policy corpus"
#endif

std::string minimal_doc(const std::string& policies) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<PolicySet xmlns=\"urn:oasis:names:tc:xacml:3.0:core:schema:wd-17\"\n"
         "           xmlns:xacml-ad=\"urn:xacml-ad:schema:1.0\"\n"
         "           PolicySetId=\"test\"\n"
         "           PolicyCombiningAlgId=\"only-one-applicable\">" +
         policies + "</PolicySet>";
}

std::string start_target() {
  return R"(<Target>
      <Subjects/>
      <Resources/>
      <Actions><Action>
        <Match MatchId="urn:oasis:names:tc:xacml:1.0:function:string-equal">
          <AttributeValue DataType="http://www.w3.org/2001/XMLSchema#string">startActivity</AttributeValue>
          <AttributeDesignator Category="urn:oasis:names:tc:xacml:3.0:attribute-category:action"
                               AttributeId="urn:oasis:names:tc:xacml:1.0:action:action-id"
                               DataType="http://www.w3.org/2001/XMLSchema#string"/>
        </Match>
      </Action></Actions>
    </Target>)";
}

std::string one_policy_doc(const std::string& rules) {
  return minimal_doc(
      "<Policy PolicyId=\"p\" RuleCombiningAlgId=\"first-applicable\">" +
      start_target() + rules + "</Policy>");
}

const std::string kSimpleCondition = R"(<Condition>
  <Apply FunctionId="urn:xacml-ad:function:dependency-set-empty">
    <AttributeDesignator Category="urn:oasis:names:tc:xacml:3.0:attribute-category:resource"
                         AttributeId="urn:xacml-ad:attribute:activity-id"
                         DataType="http://www.w3.org/2001/XMLSchema#string"/>
    <AttributeValue DataType="http://www.w3.org/2001/XMLSchema#string">pre</AttributeValue>
  </Apply>
</Condition>)";

}  // namespace

TEST_CASE("the shipped corpus parses into the expected structure") {
  PolicySet ps = parse_policy_file(ACTIPOL_POLICY_FILE);

  CHECK(ps.policy_set_id == "1");
  CHECK(ps.policy_combining_alg == CombiningAlg::OnlyOneApplicable);
  REQUIRE(ps.policies.size() == 4);

  const Policy& start = ps.policies[0];
  CHECK(start.policy_id == "startActivityPolicy");
  CHECK(start.rule_combining_alg == CombiningAlg::FirstApplicable);
  REQUIRE(start.target.actions.size() == 1);
  CHECK(start.target.actions[0].attribute_id == kAttrActionId);
  CHECK(start.target.actions[0].value == "startActivity");
  CHECK(start.target.subjects.empty());
  CHECK(start.target.resources.empty());
  REQUIRE(start.rules.size() == 5);
  CHECK(start.rules[0].rule_id == "startActivityNoPreDep");
  CHECK(start.rules[1].rule_id == "startActivityWithPreDepNoUpdate");
  CHECK(start.rules[2].rule_id ==
        "startActivityWithImmutablePreDepWithUpdateNeeded");
  CHECK(start.rules[3].rule_id == "startActivityWithPreDepUpdateNoDepOfDep");
  CHECK(start.rules[4].rule_id ==
        "startActivityWithPreDepUpdateWithDepOfDepNoUpdateNeeded");
  for (size_t i = 0; i < 5; ++i) {
    CHECK(start.rules[i].effect ==
          (i == 2 ? Decision::Deny : Decision::Permit));
    CHECK(start.rules[i].condition.has_value());
  }
  CHECK(start.rules[0].provisional_actions.empty());
  CHECK(start.rules[2].provisional_actions.empty());
  REQUIRE(start.rules[3].provisional_actions.size() == 1);
  REQUIRE(start.rules[4].provisional_actions.size() == 1);
  const ProvisionalAction& pa = start.rules[3].provisional_actions[0];
  CHECK(pa.fulfillment_phase == Phase::Pre);
  CHECK(pa.action == "Update");
  REQUIRE(pa.for_all.has_value());
  CHECK(pa.for_all->category == kCategoryDependent);
  REQUIRE(start.obligations.size() == 3);
  CHECK(start.obligations[0].obligation_id == "updateRequestedActivityState");
  CHECK(start.obligations[0].fulfill_on == Decision::Permit);
  CHECK(start.obligations[1].obligation_id == "call-continueActivityPolicy");
  CHECK(start.obligations[1].fulfill_on == Decision::Permit);
  CHECK(start.obligations[2].obligation_id == "updateRequestedActivityState");
  CHECK(start.obligations[2].fulfill_on == Decision::Deny);

  const Policy& cont = ps.policies[1];
  CHECK(cont.policy_id == "continueActivityPolicy");
  CHECK(cont.rule_combining_alg == CombiningAlg::FirstApplicable);
  REQUIRE(cont.rules.size() == 5);
  CHECK(cont.rules[0].rule_id == "continueActivityNoOnDep");
  CHECK(cont.rules[1].rule_id == "continueActivityWithOnDepNoUpdate");
  CHECK(cont.rules[2].rule_id ==
        "ongoingActivityWithImmutableOnDepWithUpdateNeeded");
  CHECK(cont.rules[2].effect == Decision::Deny);
  CHECK(cont.rules[3].rule_id == "continueActivityWithOnDepUpdateNoDepOfDep");
  CHECK(cont.rules[4].rule_id ==
        "continueActivityWithOnDepUpdateWithDepOfDepNoUpdateNeeded");
  CHECK(cont.rules[3].provisional_actions[0].fulfillment_phase ==
        Phase::Ongoing);
  REQUIRE(cont.obligations.size() == 2);
  CHECK(cont.obligations[0].obligation_id == "call-continueActivityPolicy");
  CHECK(cont.obligations[1].fulfill_on == Decision::Deny);

  const Policy& finish = ps.policies[2];
  CHECK(finish.policy_id == "finishActivityPolicy");
  CHECK(finish.rule_combining_alg == CombiningAlg::PermitOverrides);
  REQUIRE(finish.rules.size() == 1);
  CHECK(finish.rules[0].rule_id == "finishActivityNoDependency");
  CHECK(finish.rules[0].effect == Decision::Permit);
  CHECK(!finish.rules[0].condition.has_value());
  REQUIRE(finish.obligations.size() == 2);
  CHECK(finish.obligations[1].obligation_id == "call-postUpdatePolicy");

  const Policy& post = ps.policies[3];
  CHECK(post.policy_id == "postUpdatePolicy");
  CHECK(post.rule_combining_alg == CombiningAlg::FirstApplicable);
  REQUIRE(post.rules.size() == 4);
  CHECK(post.rules[0].rule_id == "postUpdateNoPostDep");
  CHECK(post.rules[1].rule_id == "postUpdateWithPostDepNoUpdate");
  CHECK(post.rules[2].rule_id == "postUpdateWithPostDepUpdateNoDepOfDep");
  CHECK(post.rules[3].rule_id ==
        "postUpdateWithPostDepUpdateWithDepOfDepNoUpdateNeeded");
  for (const Rule& r : post.rules) CHECK(r.effect == Decision::Permit);
  CHECK(post.rules[2].provisional_actions[0].fulfillment_phase == Phase::Post);
  REQUIRE(post.obligations.size() == 1);

  CHECK(validate_corpus(ps).empty());
}

TEST_CASE("corpus round-trips through canonical JSON") {
  PolicySet ps = parse_policy_file(ACTIPOL_POLICY_FILE);
  std::string json = to_canonical_json(ps);
  PolicySet again = from_canonical_json(json);
  CHECK(again == ps);
  CHECK(to_canonical_json(again) == json);
  CHECK(json.find("\"first-applicable\"") != std::string::npos);
  CHECK(json.find("\"only-one-applicable\"") != std::string::npos);
}

TEST_CASE("prefix choice and attribute order do not affect the model") {
  std::string variant_a = minimal_doc(
      "<Policy PolicyId=\"p\" RuleCombiningAlgId=\"first-applicable\">" +
      start_target() +
      R"(<Rule RuleId="r" Effect="Permit">)" + kSimpleCondition +
      R"(<xacml-ad:ProvisionalActions>
           <xacml-ad:ProvisionalAction FulfillmentPhase="pre" ProvisionalAction="Update">
             <Condition>
               <Apply FunctionId="urn:xacml-ad:function:is-mutable">
                 <AttributeDesignator Category="urn:xacml-ad:attribute-category:dependent-activity"
                                      AttributeId="urn:xacml-ad:attribute:activity-id"
                                      DataType="http://www.w3.org/2001/XMLSchema#string"/>
               </Apply>
             </Condition>
           </xacml-ad:ProvisionalAction>
         </xacml-ad:ProvisionalActions>
         </Rule></Policy>)");

  // Same document with the extension namespace bound to another prefix, the
  // rule attributes swapped, and the designator attributes reordered.
  std::string variant_b =
      "<PolicySet PolicyCombiningAlgId=\"only-one-applicable\" "
      "PolicySetId=\"test\" "
      "xmlns=\"urn:oasis:names:tc:xacml:3.0:core:schema:wd-17\" "
      "xmlns:XACML_AD=\"urn:xacml-ad:schema:1.0\">"
      "<Policy RuleCombiningAlgId=\"first-applicable\" PolicyId=\"p\">" +
      start_target() +
      R"(<Rule Effect="Permit" RuleId="r">)" + kSimpleCondition +
      R"(<XACML_AD:ProvisionalActions>
           <XACML_AD:ProvisionalAction ProvisionalAction="Update" FulfillmentPhase="pre">
             <Condition>
               <Apply FunctionId="urn:xacml-ad:function:is-mutable">
                 <AttributeDesignator DataType="http://www.w3.org/2001/XMLSchema#string"
                                      AttributeId="urn:xacml-ad:attribute:activity-id"
                                      Category="urn:xacml-ad:attribute-category:dependent-activity"/>
               </Apply>
             </Condition>
           </XACML_AD:ProvisionalAction>
         </XACML_AD:ProvisionalActions>
         </Rule></Policy></PolicySet>)";

  PolicySet a = parse_policy_set(variant_a);
  PolicySet b = parse_policy_set(variant_b);
  CHECK(a == b);
  CHECK(to_canonical_json(a) == to_canonical_json(b));
}

TEST_CASE("empty policy set is valid") {
  PolicySet ps = parse_policy_set(minimal_doc(""));
  CHECK(ps.policy_set_id == "test");
  CHECK(ps.policies.empty());
}

TEST_CASE("malformed XML raises XmlSyntaxError") {
  CHECK_THROWS_AS(parse_policy_set("<PolicySet"), XmlSyntaxError);
  CHECK_THROWS_AS(parse_policy_set("<PolicySet PolicySetId></PolicySet>"),
                  XmlSyntaxError);
}

TEST_CASE("dialect violations raise SchemaViolation") {
  SUBCASE("wrong root element") {
    CHECK_THROWS_AS(
        parse_policy_set(
            "<Policy xmlns=\"urn:oasis:names:tc:xacml:3.0:core:schema:wd-17\" "
            "PolicyId=\"p\" RuleCombiningAlgId=\"first-applicable\"/>"),
        SchemaViolationError);
  }

  SUBCASE("undeclared namespace prefix") {
    CHECK_THROWS_AS(parse_policy_set("<foo:PolicySet PolicySetId=\"x\" "
                                     "PolicyCombiningAlgId=\"only-one-"
                                     "applicable\"/>"),
                    SchemaViolationError);
  }

  SUBCASE("unknown combining algorithm") {
    CHECK_THROWS_AS(
        parse_policy_set(
            "<PolicySet xmlns=\"urn:oasis:names:tc:xacml:3.0:core:schema:wd-17\" "
            "PolicySetId=\"x\" PolicyCombiningAlgId=\"most-votes\"/>"),
        SchemaViolationError);
  }

  SUBCASE("missing required attribute") {
    CHECK_THROWS_AS(
        parse_policy_set(
            "<PolicySet xmlns=\"urn:oasis:names:tc:xacml:3.0:core:schema:wd-17\" "
            "PolicySetId=\"x\"/>"),
        SchemaViolationError);
  }

  SUBCASE("unexpected attribute") {
    CHECK_THROWS_AS(
        parse_policy_set(
            "<PolicySet xmlns=\"urn:oasis:names:tc:xacml:3.0:core:schema:wd-17\" "
            "PolicySetId=\"x\" PolicyCombiningAlgId=\"only-one-applicable\" "
            "Version=\"1.0\"/>"),
        SchemaViolationError);
  }

  SUBCASE("unknown element inside a known namespace") {
    CHECK_THROWS_AS(
        parse_policy_set(minimal_doc("<VariableDefinition/>")),
        SchemaViolationError);
  }

  SUBCASE("rule effect must be Permit or Deny") {
    CHECK_THROWS_AS(
        parse_policy_set(one_policy_doc(
            R"(<Rule RuleId="r" Effect="Allow"/>)")),
        SchemaViolationError);
  }

  SUBCASE("duplicate rule ids") {
    CHECK_THROWS_AS(parse_policy_set(one_policy_doc(
                        R"(<Rule RuleId="r" Effect="Permit"/>
                           <Rule RuleId="r" Effect="Deny"/>)")),
                    SchemaViolationError);
  }

  SUBCASE("duplicate policy ids") {
    std::string policy =
        "<Policy PolicyId=\"p\" RuleCombiningAlgId=\"first-applicable\">" +
        start_target() + "</Policy>";
    CHECK_THROWS_AS(parse_policy_set(minimal_doc(policy + policy)),
                    SchemaViolationError);
  }

  SUBCASE("policy without a target") {
    CHECK_THROWS_AS(
        parse_policy_set(minimal_doc(
            "<Policy PolicyId=\"p\" RuleCombiningAlgId=\"first-applicable\"/>")),
        SchemaViolationError);
  }

  SUBCASE("unknown condition function") {
    CHECK_THROWS_AS(parse_policy_set(one_policy_doc(
                        R"(<Rule RuleId="r" Effect="Permit"><Condition>
                             <Apply FunctionId="urn:xacml-ad:function:is-awesome">
                               <AttributeValue DataType="http://www.w3.org/2001/XMLSchema#string">x</AttributeValue>
                             </Apply>
                           </Condition></Rule>)")),
                    SchemaViolationError);
  }

  SUBCASE("wrong arity") {
    CHECK_THROWS_AS(parse_policy_set(one_policy_doc(
                        R"(<Rule RuleId="r" Effect="Permit"><Condition>
                             <Apply FunctionId="urn:xacml-ad:function:is-mutable">
                               <AttributeValue DataType="http://www.w3.org/2001/XMLSchema#string">a</AttributeValue>
                               <AttributeValue DataType="http://www.w3.org/2001/XMLSchema#string">b</AttributeValue>
                             </Apply>
                           </Condition></Rule>)")),
                    SchemaViolationError);
  }

  SUBCASE("boolean function over attribute arguments") {
    CHECK_THROWS_AS(parse_policy_set(one_policy_doc(
                        R"(<Rule RuleId="r" Effect="Permit"><Condition>
                             <Apply FunctionId="urn:oasis:names:tc:xacml:1.0:function:not">
                               <AttributeValue DataType="http://www.w3.org/2001/XMLSchema#string">x</AttributeValue>
                             </Apply>
                           </Condition></Rule>)")),
                    SchemaViolationError);
  }

  SUBCASE("string function over a boolean argument") {
    CHECK_THROWS_AS(parse_policy_set(one_policy_doc(
                        R"(<Rule RuleId="r" Effect="Permit"><Condition>
                             <Apply FunctionId="urn:xacml-ad:function:is-mutable">
                               <Apply FunctionId="urn:oasis:names:tc:xacml:1.0:function:and"/>
                             </Apply>
                           </Condition></Rule>)")),
                    SchemaViolationError);
  }

  SUBCASE("non-string literals are rejected") {
    CHECK_THROWS_AS(parse_policy_set(one_policy_doc(
                        R"(<Rule RuleId="r" Effect="Permit"><Condition>
                             <Apply FunctionId="urn:xacml-ad:function:is-mutable">
                               <AttributeValue DataType="http://www.w3.org/2001/XMLSchema#integer">7</AttributeValue>
                             </Apply>
                           </Condition></Rule>)")),
                    SchemaViolationError);
  }

  SUBCASE("provisional action must be Update") {
    CHECK_THROWS_AS(parse_policy_set(one_policy_doc(
                        R"(<Rule RuleId="r" Effect="Permit">
                             <xacml-ad:ProvisionalActions>
                               <xacml-ad:ProvisionalAction FulfillmentPhase="pre" ProvisionalAction="Delete">
                                 <Condition>
                                   <Apply FunctionId="urn:oasis:names:tc:xacml:1.0:function:and"/>
                                 </Condition>
                               </xacml-ad:ProvisionalAction>
                             </xacml-ad:ProvisionalActions>
                           </Rule>)")),
                    SchemaViolationError);
  }

  SUBCASE("provisional action without a condition") {
    CHECK_THROWS_AS(parse_policy_set(one_policy_doc(
                        R"(<Rule RuleId="r" Effect="Permit">
                             <xacml-ad:ProvisionalActions>
                               <xacml-ad:ProvisionalAction FulfillmentPhase="pre" ProvisionalAction="Update"/>
                             </xacml-ad:ProvisionalActions>
                           </Rule>)")),
                    SchemaViolationError);
  }

  SUBCASE("fulfillment phase must match the policy's action phase") {
    CHECK_THROWS_AS(parse_policy_set(one_policy_doc(
                        R"(<Rule RuleId="r" Effect="Permit">
                             <xacml-ad:ProvisionalActions>
                               <xacml-ad:ProvisionalAction FulfillmentPhase="post" ProvisionalAction="Update">
                                 <Condition>
                                   <Apply FunctionId="urn:oasis:names:tc:xacml:1.0:function:and"/>
                                 </Condition>
                               </xacml-ad:ProvisionalAction>
                             </xacml-ad:ProvisionalActions>
                           </Rule>)")),
                    SchemaViolationError);
  }

  SUBCASE("unknown obligation id") {
    CHECK_THROWS_AS(parse_policy_set(one_policy_doc(
                        R"(<ObligationExpressions>
                             <ObligationExpression ObligationId="send-email" FulfillOn="Permit"/>
                           </ObligationExpressions>)")),
                    UnknownObligationError);
  }
}

TEST_CASE("canonical JSON loader validates like the XML loader") {
  PolicySet ps = parse_policy_file(ACTIPOL_POLICY_FILE);
  std::string json = to_canonical_json(ps);

  CHECK_THROWS_AS(from_canonical_json("{oops"), JsonSyntaxError);
  CHECK_THROWS_AS(from_canonical_json("{}"), SchemaViolationError);

  std::string bad_fn = json;
  auto pos = bad_fn.find("urn:xacml-ad:function:dependency-set-empty");
  REQUIRE(pos != std::string::npos);
  bad_fn.replace(pos, 42, "urn:xacml-ad:function:dependency-set-emptyy");
  CHECK_THROWS_AS(from_canonical_json(bad_fn), SchemaViolationError);
}

TEST_CASE("lint flags shadowing rules and dangling call obligations") {
  SUBCASE("unconditioned rule shadowing later rules") {
    PolicySet ps = parse_policy_set(one_policy_doc(
        R"(<Rule RuleId="open-door" Effect="Permit"/>
           <Rule RuleId="never-reached" Effect="Deny">)" +
        kSimpleCondition + "</Rule>"));
    auto diags = validate_corpus(ps);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("open-door") != std::string::npos);
    CHECK(diags[0].find("shadows") != std::string::npos);
  }

  SUBCASE("unconditioned final rule is fine") {
    PolicySet ps = parse_policy_set(one_policy_doc(
        R"(<Rule RuleId="specific" Effect="Deny">)" + kSimpleCondition +
        R"(</Rule><Rule RuleId="fallback" Effect="Permit"/>)"));
    CHECK(validate_corpus(ps).empty());
  }

  SUBCASE("call obligation referencing a missing policy") {
    PolicySet ps = parse_policy_set(one_policy_doc(
        R"(<Rule RuleId="r" Effect="Permit"/>
           <ObligationExpressions>
             <ObligationExpression ObligationId="call-continueActivityPolicy" FulfillOn="Permit"/>
           </ObligationExpressions>)"));
    auto diags = validate_corpus(ps);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("continueActivityPolicy") != std::string::npos);
  }
}

// ---------------------------------------------------------------------------
// randomized round-trip property

namespace {

class PolicyGenerator {
 public:
  explicit PolicyGenerator(uint32_t seed) : rng_(seed) {}

  PolicySet next_policy_set() {
    PolicySet ps;
    ps.policy_set_id = "set-" + std::to_string(counter_++);
    ps.policy_combining_alg = random_alg();
    int n = pick(0, 4);
    for (int i = 0; i < n; ++i) ps.policies.push_back(next_policy(i));
    return ps;
  }

 private:
  int pick(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool flip() { return pick(0, 1) == 1; }

  CombiningAlg random_alg() {
    return static_cast<CombiningAlg>(pick(0, kCombiningAlgCount - 1));
  }

  std::string random_token() {
    static const char* kWords[] = {"sowing", "plowing", "pump",  "survey",
                                   "harvest", "tractor", "field", "water"};
    return kWords[pick(0, 7)] + std::to_string(pick(0, 99));
  }

  MatchExpr random_match() { return {random_token(), random_token()}; }

  ConditionExpr random_string_arg(bool designator_ok) {
    if (designator_ok && flip()) {
      return ConditionExpr::designator(std::string(kCategoryResource),
                                       std::string(kAttrActivityId));
    }
    return ConditionExpr::literal(random_token());
  }

  ConditionExpr random_expr(int depth) {
    const auto& table = function_table();
    while (true) {
      const FunctionSig& sig = table[pick(0, (int)table.size() - 1)];
      if (sig.arg_kind == ArgKind::Boolean && depth <= 0) continue;
      int max_args = sig.max_args < 0 ? 3 : sig.max_args;
      int count = pick(sig.min_args, max_args);
      std::vector<ConditionExpr> args;
      for (int i = 0; i < count; ++i) {
        args.push_back(sig.arg_kind == ArgKind::Boolean
                           ? random_expr(depth - 1)
                           : random_string_arg(true));
      }
      return ConditionExpr::apply(std::string(sig.id), std::move(args));
    }
  }

  Policy next_policy(int index) {
    Policy p;
    p.policy_id = "policy-" + std::to_string(index);
    p.rule_combining_alg = random_alg();
    if (flip()) p.target.subjects.push_back(random_match());
    if (flip()) p.target.resources.push_back(random_match());
    if (flip()) p.target.actions.push_back(random_match());
    int rules = pick(0, 5);
    for (int i = 0; i < rules; ++i) {
      Rule r;
      r.rule_id = "rule-" + std::to_string(i);
      r.effect = flip() ? Decision::Permit : Decision::Deny;
      if (flip()) r.condition = random_expr(2);
      if (flip()) {
        ProvisionalAction pa;
        pa.fulfillment_phase = static_cast<Phase>(pick(0, kPhaseCount - 1));
        pa.action = "Update";
        if (flip()) pa.for_all = ForAllBinding{std::string(kCategoryDependent)};
        pa.condition = random_expr(1);
        r.provisional_actions.push_back(std::move(pa));
      }
      p.rules.push_back(std::move(r));
    }
    const auto& obligation_ids = registered_obligation_ids();
    int obligations = pick(0, 2);
    for (int i = 0; i < obligations; ++i) {
      ObligationExpression o;
      o.obligation_id =
          std::string(obligation_ids[pick(0, (int)obligation_ids.size() - 1)]);
      o.fulfill_on = flip() ? Decision::Permit : Decision::Deny;
      if (flip()) o.parameters.emplace_back("policy-id", random_token());
      p.obligations.push_back(std::move(o));
    }
    return p;
  }

  std::mt19937 rng_;
  int counter_ = 0;
};

}  // namespace

TEST_CASE("canonical JSON round-trips randomized policy sets") {
  PolicyGenerator gen(20260815);
  for (int i = 0; i < 250; ++i) {
    PolicySet ps = gen.next_policy_set();
    std::string json = to_canonical_json(ps);
    PolicySet back = from_canonical_json(json);
    REQUIRE(back == ps);
    REQUIRE(to_canonical_json(back) == json);
  }
}

TEST_CASE("parsing preserves policy and rule order") {
  std::string doc = minimal_doc(
      "<Policy PolicyId=\"z\" RuleCombiningAlgId=\"first-applicable\">" +
      start_target() +
      R"(<Rule RuleId="r9" Effect="Permit"/><Rule RuleId="r1" Effect="Deny">)" +
      kSimpleCondition + R"(</Rule><Rule RuleId="r5" Effect="Permit">)" +
      kSimpleCondition + "</Rule></Policy>" +
      "<Policy PolicyId=\"a\" RuleCombiningAlgId=\"deny-overrides\">" +
      start_target() + "</Policy>");
  PolicySet ps = parse_policy_set(doc);
  REQUIRE(ps.policies.size() == 2);
  CHECK(ps.policies[0].policy_id == "z");
  CHECK(ps.policies[1].policy_id == "a");
  REQUIRE(ps.policies[0].rules.size() == 3);
  CHECK(ps.policies[0].rules[0].rule_id == "r9");
  CHECK(ps.policies[0].rules[1].rule_id == "r1");
  CHECK(ps.policies[0].rules[2].rule_id == "r5");

  PolicySet back = from_canonical_json(to_canonical_json(ps));
  CHECK(back.policies[0].rules[0].rule_id == "r9");
  CHECK(back.policies[1].policy_id == "a");
}
