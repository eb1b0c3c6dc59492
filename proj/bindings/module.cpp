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

// Python bindings for the engine's main operations. Everything crosses the
// boundary as plain strings (JSON payloads, enum names) so the module stays
// a thin shell over the C++ core.

#include <memory>
#include <optional>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "acoracle/oracle.hpp"
#include "actipol/activity.hpp"
#include "actipol/engine.hpp"
#include "actipol/errors.hpp"
#include "actipol/service.hpp"
#include "actipol/store.hpp"

namespace py = pybind11;

namespace {

/// Owns a store plus engine pair so Python sees one coherent object. All
/// results cross as JSON strings or primitive tuples.
class PolicyEngine {
 public:
  PolicyEngine(const std::string& policy_xml, const std::string& fixture_json,
               int repetitions, int interval_ms, int chain_depth_limit)
      : policy_set_(actipol::parse_policy_set(policy_xml)) {
    if (!fixture_json.empty()) store_.load_fixture_json(fixture_json);
    engine_ = std::make_unique<actipol::Engine>(
        store_, policy_set_,
        actipol::EngineConfig{{repetitions, interval_ms},
                              chain_depth_limit});
  }

  std::string handle_request(const std::string& subject,
                             const std::string& activity,
                             const std::string& action) {
    actipol::ActivityRequest req{subject, activity,
                                 actipol::action_id_from_string(action)};
    return actipol::to_wire_json(engine_->handle_request(req));
  }

  std::string run_continuity(const std::string& activity, int repetitions,
                             int interval_ms) {
    return actipol::to_json(engine_->run_continuity(
        activity, actipol::ContinuityConfig{repetitions, interval_ms}));
  }

  std::optional<std::string> continuity_report(
      const std::string& activity) const {
    std::optional<actipol::ContinuityReport> report =
        engine_->continuity_report(activity);
    if (!report) return std::nullopt;
    return actipol::to_json(*report);
  }

  void wait_for_continuity(const std::string& activity) {
    engine_->wait_for_continuity(activity);
  }

  py::tuple get_activity(const std::string& id) const {
    actipol::ActivityRecord rec = store_.get_activity(id);
    return py::make_tuple(std::string(actipol::to_string(rec.state)),
                          rec.is_mutable);
  }

  void admin_upsert_activity(const std::string& id, const std::string& state,
                             bool is_mutable) {
    store_.admin_upsert(actipol::ActivityRecord{
        id, actipol::activity_state_from_string(state), is_mutable});
  }

  void admin_upsert_dependency(const std::string& subject,
                               const std::string& phase,
                               const std::string& dependent,
                               const std::string& desired_state) {
    store_.admin_upsert(actipol::DependencySpec{
        subject, actipol::phase_from_string(phase), dependent,
        actipol::activity_state_from_string(desired_state)});
  }

  std::string snapshot() const { return store_.to_canonical_fixture_json(); }

 private:
  actipol::PolicySet policy_set_;
  actipol::Store store_;
  std::unique_ptr<actipol::Engine> engine_;  // destroyed before the store
};

}  // namespace

PYBIND11_MODULE(_actipol, m) {
  m.doc() = "Activity-dependency policy engine";
  m.attr("__version__") = "0.1.0";

  auto base = py::register_exception<actipol::Error>(m, "EngineError");
  py::register_exception<actipol::UnknownActivityError>(
      m, "UnknownActivityError", base);
  py::register_exception<actipol::IllegalTransitionError>(
      m, "IllegalTransitionError", base);
  py::register_exception<actipol::SchemaViolationError>(
      m, "SchemaViolationError", base);

  m.def(
      "oracle_decide",
      [](const std::string& world_json, const std::string& subject,
         const std::string& phase, int depth_limit) {
        acoracle::Outcome out = acoracle::oracle_decide(
            acoracle::world_from_json(world_json), subject, phase,
            depth_limit);
        return py::make_tuple(std::string(acoracle::verdict_name(out.verdict)),
                              acoracle::world_to_json(out.world));
      },
      py::arg("world_json"), py::arg("subject"), py::arg("phase"),
      py::arg("depth_limit") = 2,
      "Reference decision: returns (verdict, updated world JSON).");

  m.def(
      "apply_transition",
      [](const std::string& state, const std::string& action,
         const std::string& decision) {
        actipol::ActivityRecord rec{
            "x", actipol::activity_state_from_string(state), true};
        actipol::ActivityRecord out = actipol::apply_transition(
            rec, actipol::action_id_from_string(action),
            actipol::decision_from_string(decision));
        return std::string(actipol::to_string(out.state));
      },
      py::arg("state"), py::arg("action"), py::arg("decision"),
      "Next life-cycle state for (state, action, decision).");

  m.def(
      "canonicalize_fixture",
      [](const std::string& fixture_json) {
        actipol::Store store;
        store.load_fixture_json(fixture_json);
        return store.to_canonical_fixture_json();
      },
      py::arg("fixture_json"),
      "Validate a fixture document and return its canonical JSON form.");

  m.def(
      "policy_to_canonical_json",
      [](const std::string& policy_xml) {
        return actipol::to_canonical_json(
            actipol::parse_policy_set(policy_xml));
      },
      py::arg("policy_xml"),
      "Parse a policy set document and return its canonical JSON form.");

  m.def(
      "lint_policy",
      [](const std::string& policy_xml) {
        return actipol::validate_corpus(actipol::parse_policy_set(policy_xml));
      },
      py::arg("policy_xml"),
      "Parse a policy set document and return its lint diagnostics.");

  py::class_<PolicyEngine>(m, "PolicyEngine",
                           "Enforcement engine over an in-memory store.")
      .def(py::init<const std::string&, const std::string&, int, int, int>(),
           py::arg("policy_xml"), py::arg("fixture_json") = "",
           py::arg("repetitions") = 10, py::arg("interval_ms") = 5,
           py::arg("chain_depth_limit") = 2)
      .def("handle_request", &PolicyEngine::handle_request,
           py::arg("subject"), py::arg("activity"), py::arg("action"),
           py::call_guard<py::gil_scoped_release>(),
           "Run one external request; returns the wire response JSON.")
      .def("run_continuity", &PolicyEngine::run_continuity,
           py::arg("activity"), py::arg("repetitions") = 10,
           py::arg("interval_ms") = 5,
           py::call_guard<py::gil_scoped_release>(),
           "Run a continuity loop to completion; returns the report JSON.")
      .def("continuity_report", &PolicyEngine::continuity_report,
           py::arg("activity"),
           "Latest continuity report JSON, or None when no loop ran.")
      .def("wait_for_continuity", &PolicyEngine::wait_for_continuity,
           py::arg("activity"), py::call_guard<py::gil_scoped_release>(),
           "Block until the activity's scheduled loop ends.")
      .def("get_activity", &PolicyEngine::get_activity, py::arg("id"),
           "Committed (state, mutable) pair for an activity.")
      .def("admin_upsert_activity", &PolicyEngine::admin_upsert_activity,
           py::arg("id"), py::arg("state"), py::arg("mutable"))
      .def("admin_upsert_dependency", &PolicyEngine::admin_upsert_dependency,
           py::arg("subject"), py::arg("phase"), py::arg("dependent"),
           py::arg("desired_state"))
      .def("snapshot", &PolicyEngine::snapshot,
           "Canonical fixture JSON of the committed store.");
}
