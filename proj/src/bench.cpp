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

#include "actipol/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "actipol/errors.hpp"

namespace actipol {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::ordered_json;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0)
      .count();
}

std::vector<ActivityRecord> baseline_from_fixture(const std::string& path) {
  Store probe;
  probe.load_fixture_file(path);
  std::vector<ActivityRecord> records = probe.list_activities();
  std::sort(records.begin(), records.end(),
            [](const ActivityRecord& a, const ActivityRecord& b) {
              return a.id < b.id;
            });
  return records;
}

std::vector<std::string> inactive_ids(
    const std::vector<ActivityRecord>& baseline) {
  std::vector<std::string> ids;
  for (const ActivityRecord& rec : baseline) {
    if (rec.state == ActivityState::Inactive) ids.push_back(rec.id);
  }
  return ids;
}

void require_permit(const ResponseContext& resp, const std::string& step) {
  if (resp.decision == Decision::Permit) return;
  std::string what = step + " denied for activity '" + resp.activity + "'";
  if (!resp.reason.empty()) what += " (" + resp.reason + ")";
  what += "; benchmarks measure the permit path";
  throw BenchAbortedError(what);
}

void fill_stats(BenchRow& row) {
  if (row.samples.empty()) return;
  std::vector<double> sorted = row.samples;
  std::sort(sorted.begin(), sorted.end());
  row.mean_ms = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                static_cast<double>(sorted.size());
  size_t n = sorted.size();
  row.median_ms = (n % 2 == 1)
                      ? sorted[n / 2]
                      : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  size_t rank = static_cast<size_t>(
      std::ceil(0.95 * static_cast<double>(n)));
  row.p95_ms = sorted[std::min(n - 1, rank == 0 ? 0 : rank - 1)];
}

void validate_spec(const BenchSpec& spec) {
  int previous = 0;
  for (int count : spec.request_counts) {
    if (count <= previous) {
      throw InvariantViolationError(
          "request counts must be positive and ascending");
    }
    previous = count;
  }
  if (spec.warmup_runs < 0) {
    throw InvariantViolationError("warmup_runs must be >= 0");
  }
  if (spec.mode == BenchMode::FullCycle && spec.continuity.empty()) {
    throw InvariantViolationError(
        "full-cycle mode needs at least one continuity configuration");
  }
}

/// One start (and for full cycles the wait plus finish) for one activity,
/// returning the request's wall-clock latency.
double run_one(const BenchSpec& spec, BenchTarget& target,
               const std::string& activity, const ContinuityConfig& cfg,
               std::map<std::string, int>* stop_reasons, std::mutex* mu) {
  Clock::time_point t0 = Clock::now();
  ResponseContext started = target.start(activity);
  if (spec.mode == BenchMode::StartOnly) {
    double elapsed = ms_since(t0);
    require_permit(started, "start");
    return elapsed;
  }

  require_permit(started, "start");
  ContinuityReport report = target.wait_continuity(activity);
  {
    std::lock_guard<std::mutex> lk(*mu);
    ++(*stop_reasons)[report.stop_reason];
  }
  if (report.stop_reason != "exhausted") {
    throw BenchAbortedError("continuity loop for '" + activity +
                            "' stopped early: " + report.stop_reason);
  }
  if (static_cast<int>(report.iterations.size()) != cfg.repetitions) {
    throw BenchAbortedError(
        "target ran " + std::to_string(report.iterations.size()) +
        " continuity iterations where " + continuity_label(cfg) +
        " was requested; the target's configuration does not match");
  }
  ResponseContext finished = target.finish(activity);
  double elapsed = ms_since(t0);
  require_permit(finished, "finish");
  return elapsed;
}

BenchRow run_pass(const BenchSpec& spec, BenchTarget& target,
                  const std::vector<std::string>& roster, int count,
                  const ContinuityConfig& cfg) {
  BenchRow row;
  row.mode = spec.mode == BenchMode::StartOnly ? "start" : "full";
  if (spec.concurrent) row.mode += "-concurrent";
  row.count = count;
  row.continuity =
      spec.mode == BenchMode::FullCycle ? continuity_label(cfg) : "-";
  row.samples.assign(static_cast<size_t>(count), 0.0);

  std::mutex mu;
  Clock::time_point wall0 = Clock::now();
  if (spec.concurrent) {
    std::exception_ptr first_error;
    {
      std::vector<std::jthread> workers;
      workers.reserve(static_cast<size_t>(count));
      for (int i = 0; i < count; ++i) {
        workers.emplace_back([&, i] {
          try {
            row.samples[static_cast<size_t>(i)] =
                run_one(spec, target, roster[static_cast<size_t>(i)], cfg,
                        &row.stop_reasons, &mu);
          } catch (...) {
            std::lock_guard<std::mutex> lk(mu);
            if (!first_error) first_error = std::current_exception();
          }
        });
      }
    }
    if (first_error) std::rethrow_exception(first_error);
  } else {
    for (int i = 0; i < count; ++i) {
      row.samples[static_cast<size_t>(i)] =
          run_one(spec, target, roster[static_cast<size_t>(i)], cfg,
                  &row.stop_reasons, &mu);
    }
  }
  row.total_ms = ms_since(wall0);
  fill_stats(row);
  return row;
}

void run_configuration(const BenchSpec& spec, BenchTarget& target,
                       const std::vector<std::string>& roster,
                       const ContinuityConfig& cfg, BenchReport& report) {
  for (int count : spec.request_counts) {
    for (int warmup = 0; warmup < spec.warmup_runs; ++warmup) {
      target.reset();
      run_pass(spec, target, roster, count, cfg);
    }
    target.reset();
    report.rows.push_back(run_pass(spec, target, roster, count, cfg));
  }
}

ordered_json row_json(const BenchRow& row) {
  ordered_json j;
  j["mode"] = row.mode;
  j["count"] = row.count;
  j["continuity"] = row.continuity;
  j["total_ms"] = row.total_ms;
  j["mean_ms"] = row.mean_ms;
  j["median_ms"] = row.median_ms;
  j["p95_ms"] = row.p95_ms;
  j["stop_reasons"] = ordered_json::object();
  for (const auto& [reason, n] : row.stop_reasons) {
    j["stop_reasons"][reason] = n;
  }
  j["samples"] = row.samples;
  return j;
}

}  // namespace

std::string continuity_label(const ContinuityConfig& cfg) {
  return std::to_string(cfg.repetitions) + "x" +
         std::to_string(cfg.interval_ms);
}

ContinuityConfig continuity_from_label(const std::string& label) {
  size_t x = label.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(label);
    size_t used_reps = 0;
    size_t used_interval = 0;
    ContinuityConfig cfg;
    cfg.repetitions = std::stoi(label.substr(0, x), &used_reps);
    std::string interval = label.substr(x + 1);
    cfg.interval_ms = std::stoi(interval, &used_interval);
    if (used_reps != x || used_interval != interval.size() ||
        cfg.repetitions < 1 || cfg.interval_ms < 0) {
      throw std::invalid_argument(label);
    }
    return cfg;
  } catch (const std::exception&) {
    throw InvariantViolationError(
        "continuity configuration must be REPSxINTERVAL_MS, got: " + label);
  }
}

BenchReport run_bench(const BenchSpec& spec, BenchTarget& target) {
  validate_spec(spec);
  BenchReport report;
  if (spec.request_counts.empty()) return report;

  std::vector<std::string> roster = target.startable();
  int needed = spec.request_counts.back();
  if (static_cast<int>(roster.size()) < needed) {
    throw FixtureTooSmallError(
        "fixture provides " + std::to_string(roster.size()) +
        " startable activities but the largest request count is " +
        std::to_string(needed));
  }

  if (spec.mode == BenchMode::StartOnly) {
    run_configuration(spec, target, roster, ContinuityConfig{}, report);
    return report;
  }
  for (const ContinuityConfig& cfg : spec.continuity) {
    target.configure(cfg);
    run_configuration(spec, target, roster, cfg, report);
  }
  return report;
}

std::string emit_report_json(const BenchReport& report) {
  ordered_json j;
  j["rows"] = ordered_json::array();
  for (const BenchRow& row : report.rows) j["rows"].push_back(row_json(row));
  return j.dump(2) + "\n";
}

std::string emit_report_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "mode,count,continuity,statistic,value\n";
  for (const BenchRow& row : report.rows) {
    const std::pair<const char*, double> stats[] = {
        {"total_ms", row.total_ms},
        {"mean_ms", row.mean_ms},
        {"median_ms", row.median_ms},
        {"p95_ms", row.p95_ms},
    };
    for (const auto& [name, value] : stats) {
      out << row.mode << ',' << row.count << ',' << row.continuity << ','
          << name << ',' << ordered_json(value).dump() << '\n';
    }
    for (const auto& [reason, n] : row.stop_reasons) {
      out << row.mode << ',' << row.count << ',' << row.continuity
          << ",stop_reason:" << reason << ',' << n << '\n';
    }
  }
  return out.str();
}

void write_report_file(const BenchReport& report, BenchFormat format,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open report file for writing: " + path);
  out << (format == BenchFormat::Csv ? emit_report_csv(report)
                                     : emit_report_json(report));
  if (!out) throw IoError("failed to write report file: " + path);
}

LocalBenchTarget::LocalBenchTarget(const std::string& fixture_file,
                                   PolicySet policy_set,
                                   int chain_depth_limit)
    : policy_set_(std::move(policy_set)),
      chain_depth_limit_(chain_depth_limit),
      baseline_(baseline_from_fixture(fixture_file)) {
  store_.load_fixture_file(fixture_file);
  rebuild_engine();
}

LocalBenchTarget::~LocalBenchTarget() = default;

void LocalBenchTarget::rebuild_engine() {
  engine_.reset();
  engine_ = std::make_unique<Engine>(
      store_, policy_set_, EngineConfig{continuity_, chain_depth_limit_});
}

std::vector<std::string> LocalBenchTarget::startable() const {
  return inactive_ids(baseline_);
}

void LocalBenchTarget::configure(const ContinuityConfig& cfg) {
  continuity_ = cfg;
  rebuild_engine();
}

void LocalBenchTarget::reset() {
  // Dropping the engine joins every continuity loop, so the admin writes
  // below cannot collide with an open evaluation.
  engine_.reset();
  for (const ActivityRecord& rec : baseline_) store_.admin_upsert(rec);
  rebuild_engine();
}

ResponseContext LocalBenchTarget::start(const std::string& activity) {
  return engine_->handle_request(
      ActivityRequest{"bench-driver", activity, ActionId::StartActivity});
}

ResponseContext LocalBenchTarget::finish(const std::string& activity) {
  return engine_->handle_request(
      ActivityRequest{"bench-driver", activity, ActionId::FinishActivity});
}

ContinuityReport LocalBenchTarget::wait_continuity(
    const std::string& activity) {
  engine_->wait_for_continuity(activity);
  std::optional<ContinuityReport> report = engine_->continuity_report(activity);
  if (!report || !report->complete) {
    throw BenchAbortedError("no completed continuity report for activity: " +
                            activity);
  }
  return *report;
}

HttpBenchTarget::HttpBenchTarget(const std::string& endpoint,
                                 const std::string& fixture_file)
    : endpoint_(endpoint),
      baseline_(baseline_from_fixture(fixture_file)),
      client_(std::make_unique<httplib::Client>(endpoint)) {
  client_->set_keep_alive(true);
  client_->set_tcp_nodelay(true);
  client_->set_read_timeout(60, 0);
}

HttpBenchTarget::~HttpBenchTarget() = default;

std::vector<std::string> HttpBenchTarget::startable() const {
  return inactive_ids(baseline_);
}

void HttpBenchTarget::configure(const ContinuityConfig&) {
  // The remote engine keeps its own continuity settings; run_one verifies
  // the reported iteration count against the requested configuration.
  httplib::Result res = client_->Get("/healthz");
  if (!res || res->status != 200) {
    throw BenchAbortedError("target is not reachable: " + endpoint_);
  }
}

void HttpBenchTarget::reset() {
  // Startable activities go first: once a subject is back to inactive its
  // continuity loop cannot write to its dependents anymore, so restoring
  // the dependents afterwards leaves a clean slate.
  std::vector<const ActivityRecord*> ordered;
  for (const ActivityRecord& rec : baseline_) {
    if (rec.state == ActivityState::Inactive) ordered.push_back(&rec);
  }
  for (const ActivityRecord& rec : baseline_) {
    if (rec.state != ActivityState::Inactive) ordered.push_back(&rec);
  }
  for (const ActivityRecord* rec : ordered) {
    ordered_json body{{"id", rec->id},
                      {"state", std::string(to_string(rec->state))},
                      {"mutable", rec->is_mutable}};
    for (int attempt = 0;; ++attempt) {
      httplib::Result res = client_->Put("/v1/admin/activities", body.dump(),
                                         "application/json");
      if (res && res->status == 200) break;
      // 409 means an evaluation transaction briefly holds the activity.
      if (res && res->status == 409 && attempt < 200) {
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
        continue;
      }
      throw BenchAbortedError(
          "reset failed for activity '" + rec->id + "': " +
          (res ? std::to_string(res->status) + " " + res->body
               : "transport error"));
    }
  }
}

ResponseContext HttpBenchTarget::decide(const std::string& activity,
                                        const std::string& action) {
  httplib::Result res = client_->Get(
      "/v1/decide?subject=bench-driver&activity=" + activity +
      "&action=" + action);
  if (!res) {
    throw BenchAbortedError("transport error while deciding for: " +
                            activity);
  }
  if (res->status != 200) {
    throw BenchAbortedError("decide returned HTTP " +
                            std::to_string(res->status) + ": " + res->body);
  }
  ordered_json body = ordered_json::parse(res->body);
  ResponseContext resp;
  resp.decision = decision_from_string(body.at("decision").get<std::string>());
  resp.activity = body.at("activity").get<std::string>();
  resp.final_state =
      activity_state_from_string(body.at("state").get<std::string>());
  resp.obligations_fulfilled =
      body.at("obligations").get<std::vector<std::string>>();
  if (body.contains("reason")) resp.reason = body.at("reason");
  resp.elapsed_ms = body.at("elapsed_ms").get<double>();
  return resp;
}

ResponseContext HttpBenchTarget::start(const std::string& activity) {
  return decide(activity, "startActivity");
}

ResponseContext HttpBenchTarget::finish(const std::string& activity) {
  return decide(activity, "finishActivity");
}

ContinuityReport HttpBenchTarget::wait_continuity(
    const std::string& activity) {
  Clock::time_point t0 = Clock::now();
  while (true) {
    httplib::Result res =
        client_->Get("/v1/reports/continuity/" + activity);
    if (res && res->status == 200) {
      ordered_json body = ordered_json::parse(res->body);
      if (body.at("complete").get<bool>()) {
        ContinuityReport report;
        report.activity = body.at("activity").get<std::string>();
        for (const ordered_json& it : body.at("iterations")) {
          ContinuityIteration iter;
          iter.n = it.at("n").get<int>();
          iter.decision =
              decision_from_string(it.at("decision").get<std::string>());
          iter.elapsed_ms = it.at("elapsed_ms").get<double>();
          report.iterations.push_back(iter);
        }
        report.final_state = activity_state_from_string(
            body.at("final_state").get<std::string>());
        report.stop_reason = body.at("stop_reason").get<std::string>();
        report.complete = true;
        return report;
      }
    } else if (!res) {
      throw BenchAbortedError(
          "transport error while polling the continuity report for: " +
          activity);
    }
    if (ms_since(t0) > 60000.0) {
      throw BenchAbortedError("continuity loop for '" + activity +
                              "' did not complete within 60s");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
}

}  // namespace actipol
