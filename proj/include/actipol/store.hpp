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

#ifndef ACTIPOL_STORE_HPP
#define ACTIPOL_STORE_HPP

#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "actipol/activity.hpp"

namespace actipol {

/// Life-cycle phase a dependency is scoped to.
enum class Phase { Pre, Ongoing, Post };

inline constexpr int kPhaseCount = 3;

std::string_view to_string(Phase p);
Phase phase_from_string(std::string_view text);

/// A phase-scoped requirement: while `subject` is decided in `phase`, the
/// `dependent` activity must be in `desired_state`.
struct DependencySpec {
  std::string subject;
  Phase phase = Phase::Pre;
  std::string dependent;
  ActivityState desired_state = ActivityState::Finished;

  bool operator==(const DependencySpec&) const = default;
};

/// Requirements that must hold before `activity` may change its state to
/// `target_state` (the "dependent of dependent" level of the chain).
struct TransitionDependency {
  std::string activity;
  ActivityState target_state = ActivityState::Finished;
  std::vector<std::pair<std::string, ActivityState>> requirements;

  bool operator==(const TransitionDependency&) const = default;
};

/// Why a state write happened; carried on every audit event.
enum class WriteOrigin {
  Transition,   // life-cycle transition of a requested activity
  Provisional,  // dependency update issued during policy evaluation
  Admin,        // administrative upsert
};

struct WriteEvent {
  std::string activity;
  ActivityState old_state;
  ActivityState new_state;
  WriteOrigin origin;
  bool in_transaction;
};

class Store;

/// Single-writer evaluation transaction. Holding a Txn serializes all other
/// transactions; state writes stay in a private overlay until commit. The
/// destructor rolls back anything still open.
class Txn {
 public:
  Txn(Txn&& other) noexcept;
  Txn& operator=(Txn&&) = delete;
  Txn(const Txn&) = delete;
  Txn& operator=(const Txn&) = delete;
  ~Txn();

  void commit();
  void rollback();
  /// Drops pending Provisional writes, keeping Transition writes. Used when
  /// a denied evaluation must still commit the requested activity's own
  /// transition.
  void discard_provisional_writes();
  bool open() const { return open_; }

 private:
  friend class Store;
  explicit Txn(Store& store);

  Store* store_ = nullptr;
  std::unique_lock<std::mutex> writer_lock_;
  bool open_ = false;
};

/// The Policy Information Point: activity records, phase dependencies and
/// transition-dependency chains, plus the transactional state updates used
/// by provisional actions.
///
/// Concurrency: reads outside a transaction see the last committed snapshot;
/// all mutation happens inside serialized transactions (or admin upserts,
/// which are rejected while an open transaction touches the same activity).
class Store {
 public:
  using AuditHook = std::function<void(const WriteEvent&)>;

  Store() = default;
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  // -- queries ------------------------------------------------------------

  ActivityRecord get_activity(const std::string& id) const;
  ActivityRecord get_activity(const std::string& id, Txn& txn) const;
  bool has_activity(const std::string& id) const;
  std::vector<ActivityRecord> list_activities() const;

  /// Dependency specs for (subject, phase), in insertion order.
  /// Throws UnknownActivityError when the subject is not stored.
  std::vector<DependencySpec> get_dependencies(const std::string& subject,
                                               Phase phase) const;

  /// Requirements for `activity` to move to `target`, in insertion order;
  /// empty when no chain entry exists.
  std::vector<std::pair<std::string, ActivityState>>
  get_transition_dependencies(const std::string& activity,
                              ActivityState target) const;

  // -- transactions -------------------------------------------------------

  Txn begin_txn();

  /// Writes `new_state` for `id` into the transaction overlay. Visible to
  /// reads through the same transaction immediately and to everyone else
  /// after commit. Mutability is not checked here; that is policy business.
  void set_state(const std::string& id, ActivityState new_state, Txn& txn,
                 WriteOrigin origin);

  /// True when an open transaction has read or written this activity.
  bool activity_in_open_txn(const std::string& id) const;

  // -- administration -----------------------------------------------------

  void admin_upsert(const ActivityRecord& record);
  void admin_upsert(const DependencySpec& spec);
  void admin_upsert(const TransitionDependency& td);

  /// Every state write flows through one choke point; the hook observes each
  /// write when it is issued (admin writes included, bulk loads excluded).
  void set_audit_hook(AuditHook hook);

  // -- fixtures and snapshots ----------------------------------------------

  void load_fixture_json(const std::string& text);
  void load_fixture_file(const std::string& path);
  /// Canonical JSON image of the committed store, fixture-format. Two stores
  /// with identical contents produce byte-identical text.
  std::string to_canonical_fixture_json() const;

  struct Snapshot {
    std::vector<ActivityRecord> activities;
    std::vector<DependencySpec> dependencies;
    std::vector<TransitionDependency> chains;
  };
  Snapshot snapshot() const;
  void restore(const Snapshot& snap);

 private:
  friend class Txn;

  struct PendingWrite {
    std::string activity;
    ActivityState state;
    WriteOrigin origin;
  };
  struct TxnState {
    std::vector<PendingWrite> writes;
    std::set<std::string> touched;
  };

  const ActivityRecord* find_committed(const std::string& id) const;
  ActivityRecord* find_committed(const std::string& id);
  void emit(const WriteEvent& event) const;
  void txn_commit();
  void txn_rollback();
  void require_no_conflict(const std::vector<std::string>& ids) const;

  mutable std::mutex data_mutex_;
  std::mutex writer_mutex_;

  std::vector<ActivityRecord> activities_;
  std::vector<DependencySpec> dependencies_;
  std::vector<TransitionDependency> chains_;

  // State of the single open transaction; guarded by data_mutex_.
  mutable std::optional<TxnState> txn_state_;
  AuditHook audit_;
};

}  // namespace actipol

#endif  // ACTIPOL_STORE_HPP
