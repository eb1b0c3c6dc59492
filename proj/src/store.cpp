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

#include "actipol/store.hpp"

#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace actipol {

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Pre: return "pre";
    case Phase::Ongoing: return "ongoing";
    case Phase::Post: return "post";
  }
  return "?";
}

Phase phase_from_string(std::string_view text) {
  if (text == "pre") return Phase::Pre;
  if (text == "ongoing") return Phase::Ongoing;
  if (text == "post") return Phase::Post;
  throw SchemaViolationError("not a phase: " + std::string(text));
}

// ---------------------------------------------------------------------------
// Txn

Txn::Txn(Store& store)
    : store_(&store), writer_lock_(store.writer_mutex_), open_(true) {
  std::lock_guard<std::mutex> lk(store.data_mutex_);
  store.txn_state_.emplace();
}

Txn::Txn(Txn&& other) noexcept
    : store_(other.store_),
      writer_lock_(std::move(other.writer_lock_)),
      open_(other.open_) {
  other.open_ = false;
  other.store_ = nullptr;
}

Txn::~Txn() {
  if (open_) rollback();
}

void Txn::commit() {
  if (!open_) throw TransactionMisuseError("commit on a closed transaction");
  store_->txn_commit();
  open_ = false;
  writer_lock_.unlock();
}

void Txn::rollback() {
  if (!open_) throw TransactionMisuseError("rollback on a closed transaction");
  store_->txn_rollback();
  open_ = false;
  writer_lock_.unlock();
}

void Txn::discard_provisional_writes() {
  if (!open_) throw NoOpenTransactionError();
  std::lock_guard<std::mutex> lk(store_->data_mutex_);
  auto& writes = store_->txn_state_->writes;
  std::erase_if(writes, [](const Store::PendingWrite& w) {
    return w.origin == WriteOrigin::Provisional;
  });
}

// ---------------------------------------------------------------------------
// queries

const ActivityRecord* Store::find_committed(const std::string& id) const {
  for (const ActivityRecord& a : activities_) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

ActivityRecord* Store::find_committed(const std::string& id) {
  for (ActivityRecord& a : activities_) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

ActivityRecord Store::get_activity(const std::string& id) const {
  std::lock_guard<std::mutex> lk(data_mutex_);
  const ActivityRecord* rec = find_committed(id);
  if (!rec) throw UnknownActivityError(id);
  return *rec;
}

ActivityRecord Store::get_activity(const std::string& id, Txn& txn) const {
  if (!txn.open()) throw NoOpenTransactionError();
  std::lock_guard<std::mutex> lk(data_mutex_);
  const ActivityRecord* rec = find_committed(id);
  if (!rec) throw UnknownActivityError(id);
  txn_state_->touched.insert(id);
  ActivityRecord out = *rec;
  for (const PendingWrite& w : txn_state_->writes) {
    if (w.activity == id) out.state = w.state;
  }
  return out;
}

bool Store::has_activity(const std::string& id) const {
  std::lock_guard<std::mutex> lk(data_mutex_);
  return find_committed(id) != nullptr;
}

std::vector<ActivityRecord> Store::list_activities() const {
  std::lock_guard<std::mutex> lk(data_mutex_);
  return activities_;
}

std::vector<DependencySpec> Store::get_dependencies(const std::string& subject,
                                                    Phase phase) const {
  std::lock_guard<std::mutex> lk(data_mutex_);
  if (!find_committed(subject)) throw UnknownActivityError(subject);
  std::vector<DependencySpec> out;
  for (const DependencySpec& d : dependencies_) {
    if (d.subject == subject && d.phase == phase) out.push_back(d);
  }
  return out;
}

std::vector<std::pair<std::string, ActivityState>>
Store::get_transition_dependencies(const std::string& activity,
                                   ActivityState target) const {
  std::lock_guard<std::mutex> lk(data_mutex_);
  if (!find_committed(activity)) throw UnknownActivityError(activity);
  for (const TransitionDependency& td : chains_) {
    if (td.activity == activity && td.target_state == target) {
      return td.requirements;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// transactions

Txn Store::begin_txn() { return Txn(*this); }

void Store::set_state(const std::string& id, ActivityState new_state, Txn& txn,
                      WriteOrigin origin) {
  if (!txn.open()) throw NoOpenTransactionError();
  WriteEvent event{};
  {
    std::lock_guard<std::mutex> lk(data_mutex_);
    const ActivityRecord* rec = find_committed(id);
    if (!rec) throw UnknownActivityError(id);
    ActivityState old_state = rec->state;
    for (const PendingWrite& w : txn_state_->writes) {
      if (w.activity == id) old_state = w.state;
    }
    txn_state_->writes.push_back({id, new_state, origin});
    txn_state_->touched.insert(id);
    event = {id, old_state, new_state, origin, true};
  }
  emit(event);
}

bool Store::activity_in_open_txn(const std::string& id) const {
  std::lock_guard<std::mutex> lk(data_mutex_);
  return txn_state_.has_value() && txn_state_->touched.contains(id);
}

void Store::txn_commit() {
  std::lock_guard<std::mutex> lk(data_mutex_);
  for (const PendingWrite& w : txn_state_->writes) {
    find_committed(w.activity)->state = w.state;
  }
  txn_state_.reset();
}

void Store::txn_rollback() {
  std::lock_guard<std::mutex> lk(data_mutex_);
  txn_state_.reset();
}

// ---------------------------------------------------------------------------
// administration

void Store::require_no_conflict(const std::vector<std::string>& ids) const {
  if (!txn_state_) return;
  for (const std::string& id : ids) {
    if (txn_state_->touched.contains(id)) throw TransactionBusyError(id);
  }
}

void Store::admin_upsert(const ActivityRecord& record) {
  if (record.id.empty()) {
    throw InvariantViolationError("activity id must be non-empty");
  }
  WriteEvent event{};
  bool state_changed = false;
  {
    std::lock_guard<std::mutex> lk(data_mutex_);
    require_no_conflict({record.id});
    if (ActivityRecord* existing = find_committed(record.id)) {
      state_changed = existing->state != record.state;
      event = {record.id, existing->state, record.state, WriteOrigin::Admin,
               false};
      *existing = record;
    } else {
      activities_.push_back(record);
    }
  }
  if (state_changed) emit(event);
}

void Store::admin_upsert(const DependencySpec& spec) {
  if (spec.subject == spec.dependent) {
    throw InvariantViolationError("activity cannot depend on itself: " +
                                  spec.subject);
  }
  std::lock_guard<std::mutex> lk(data_mutex_);
  if (!find_committed(spec.subject)) throw UnknownActivityError(spec.subject);
  if (!find_committed(spec.dependent)) {
    throw UnknownActivityError(spec.dependent);
  }
  require_no_conflict({spec.subject, spec.dependent});
  for (DependencySpec& d : dependencies_) {
    if (d.subject == spec.subject && d.phase == spec.phase &&
        d.dependent == spec.dependent) {
      d = spec;  // upsert keeps the original position
      return;
    }
  }
  dependencies_.push_back(spec);
}

void Store::admin_upsert(const TransitionDependency& td) {
  std::vector<std::string> affected{td.activity};
  for (const auto& [req_id, _] : td.requirements) {
    if (req_id == td.activity) {
      throw InvariantViolationError(
          "transition requirement cannot reference the transitioning "
          "activity: " +
          td.activity);
    }
    affected.push_back(req_id);
  }
  std::lock_guard<std::mutex> lk(data_mutex_);
  if (!find_committed(td.activity)) throw UnknownActivityError(td.activity);
  for (const auto& [req_id, _] : td.requirements) {
    if (!find_committed(req_id)) throw UnknownActivityError(req_id);
  }
  require_no_conflict(affected);
  for (TransitionDependency& existing : chains_) {
    if (existing.activity == td.activity &&
        existing.target_state == td.target_state) {
      existing = td;
      return;
    }
  }
  chains_.push_back(td);
}

void Store::set_audit_hook(AuditHook hook) {
  std::lock_guard<std::mutex> lk(data_mutex_);
  audit_ = std::move(hook);
}

void Store::emit(const WriteEvent& event) const {
  AuditHook hook;
  {
    std::lock_guard<std::mutex> lk(data_mutex_);
    hook = audit_;
  }
  if (hook) hook(event);
}

// ---------------------------------------------------------------------------
// fixtures and snapshots

namespace {

Store::Snapshot parse_fixture(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw JsonSyntaxError(std::string("fixture is not valid JSON: ") +
                          e.what());
  }
  Store::Snapshot snap;
  try {
    for (const auto& a : j.value("activities", nlohmann::json::array())) {
      ActivityRecord rec;
      rec.id = a.at("id").get<std::string>();
      rec.state = activity_state_from_string(a.at("state").get<std::string>());
      rec.is_mutable = a.value("mutable", true);
      snap.activities.push_back(std::move(rec));
    }
    for (const auto& d : j.value("dependencies", nlohmann::json::array())) {
      DependencySpec spec;
      spec.subject = d.at("subject").get<std::string>();
      spec.phase = phase_from_string(d.at("phase").get<std::string>());
      spec.dependent = d.at("dependent").get<std::string>();
      spec.desired_state =
          activity_state_from_string(d.at("desired_state").get<std::string>());
      snap.dependencies.push_back(std::move(spec));
    }
    for (const auto& c :
         j.value("transition_dependencies", nlohmann::json::array())) {
      TransitionDependency td;
      td.activity = c.at("activity").get<std::string>();
      td.target_state =
          activity_state_from_string(c.at("target_state").get<std::string>());
      for (const auto& r : c.value("requirements", nlohmann::json::array())) {
        td.requirements.emplace_back(
            r.at("activity").get<std::string>(),
            activity_state_from_string(r.at("state").get<std::string>()));
      }
      snap.chains.push_back(std::move(td));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaViolationError(std::string("malformed fixture: ") + e.what());
  }
  return snap;
}

void validate_snapshot(const Store::Snapshot& snap) {
  std::set<std::string> ids;
  for (const ActivityRecord& a : snap.activities) {
    if (a.id.empty()) {
      throw InvariantViolationError("activity id must be non-empty");
    }
    if (!ids.insert(a.id).second) {
      throw InvariantViolationError("duplicate activity id: " + a.id);
    }
  }
  std::set<std::tuple<std::string, Phase, std::string>> dep_keys;
  for (const DependencySpec& d : snap.dependencies) {
    if (d.subject == d.dependent) {
      throw InvariantViolationError("activity cannot depend on itself: " +
                                    d.subject);
    }
    if (!ids.contains(d.subject)) throw UnknownActivityError(d.subject);
    if (!ids.contains(d.dependent)) throw UnknownActivityError(d.dependent);
    if (!dep_keys.insert({d.subject, d.phase, d.dependent}).second) {
      throw InvariantViolationError("duplicate dependency for subject " +
                                    d.subject + " on " + d.dependent);
    }
  }
  std::set<std::pair<std::string, ActivityState>> chain_keys;
  for (const TransitionDependency& td : snap.chains) {
    if (!ids.contains(td.activity)) throw UnknownActivityError(td.activity);
    for (const auto& [req_id, _] : td.requirements) {
      if (req_id == td.activity) {
        throw InvariantViolationError(
            "transition requirement cannot reference the transitioning "
            "activity: " +
            td.activity);
      }
      if (!ids.contains(req_id)) throw UnknownActivityError(req_id);
    }
    if (!chain_keys.insert({td.activity, td.target_state}).second) {
      throw InvariantViolationError("duplicate transition dependency for " +
                                    td.activity);
    }
  }
}

}  // namespace

void Store::load_fixture_json(const std::string& text) {
  Snapshot snap = parse_fixture(text);
  validate_snapshot(snap);
  restore(snap);
}

void Store::load_fixture_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open fixture file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  load_fixture_json(buf.str());
}

std::string Store::to_canonical_fixture_json() const {
  Snapshot snap = snapshot();
  nlohmann::ordered_json j;
  j["activities"] = nlohmann::ordered_json::array();
  for (const ActivityRecord& a : snap.activities) {
    j["activities"].push_back({{"id", a.id},
                               {"state", std::string(to_string(a.state))},
                               {"mutable", a.is_mutable}});
  }
  j["dependencies"] = nlohmann::ordered_json::array();
  for (const DependencySpec& d : snap.dependencies) {
    j["dependencies"].push_back(
        {{"subject", d.subject},
         {"phase", std::string(to_string(d.phase))},
         {"dependent", d.dependent},
         {"desired_state", std::string(to_string(d.desired_state))}});
  }
  j["transition_dependencies"] = nlohmann::ordered_json::array();
  for (const TransitionDependency& td : snap.chains) {
    nlohmann::ordered_json reqs = nlohmann::ordered_json::array();
    for (const auto& [req_id, req_state] : td.requirements) {
      reqs.push_back({{"activity", req_id},
                      {"state", std::string(to_string(req_state))}});
    }
    j["transition_dependencies"].push_back(
        {{"activity", td.activity},
         {"target_state", std::string(to_string(td.target_state))},
         {"requirements", std::move(reqs)}});
  }
  return j.dump(2);
}

Store::Snapshot Store::snapshot() const {
  std::lock_guard<std::mutex> lk(data_mutex_);
  return {activities_, dependencies_, chains_};
}

void Store::restore(const Snapshot& snap) {
  // Blocks until any open transaction finishes, then swaps wholesale.
  std::lock_guard<std::mutex> writer(writer_mutex_);
  std::lock_guard<std::mutex> lk(data_mutex_);
  activities_ = snap.activities;
  dependencies_ = snap.dependencies;
  chains_ = snap.chains;
}

}  // namespace actipol
