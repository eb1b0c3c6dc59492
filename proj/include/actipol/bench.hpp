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

#ifndef ACTIPOL_BENCH_HPP
#define ACTIPOL_BENCH_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "actipol/engine.hpp"

namespace httplib {
class Client;
}

namespace actipol {

enum class BenchMode { StartOnly, FullCycle };
enum class BenchFormat { Csv, Json };

/// Workload description. Latency runs issue requests sequentially; the
/// concurrent switch exists for exploration but its numbers are not
/// comparable to the sequential methodology.
struct BenchSpec {
  BenchMode mode = BenchMode::StartOnly;
  std::vector<int> request_counts{10, 20, 30, 40, 50};
  std::vector<ContinuityConfig> continuity{{10, 5}, {10, 10}, {20, 5},
                                           {20, 10}};
  int warmup_runs = 1;
  bool concurrent = false;
};

/// One measured configuration: a request count, and for full cycles the
/// continuity configuration that shaped it.
struct BenchRow {
  std::string mode;
  int count = 0;
  std::string continuity = "-";
  double total_ms = 0.0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  std::vector<double> samples;
  std::map<std::string, int> stop_reasons;
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

/// The system under measurement: either an in-process engine or a running
/// HTTP service. Both are driven through the same request vocabulary.
class BenchTarget {
 public:
  virtual ~BenchTarget() = default;

  /// Ids of fixture activities that can be started, in deterministic order.
  virtual std::vector<std::string> startable() const = 0;

  /// Applies a continuity configuration for the next passes.
  virtual void configure(const ContinuityConfig& cfg) = 0;

  /// Restores every fixture activity to its initial state.
  virtual void reset() = 0;

  virtual ResponseContext start(const std::string& activity) = 0;
  virtual ResponseContext finish(const std::string& activity) = 0;

  /// Blocks until the activity's continuity loop has completed.
  virtual ContinuityReport wait_continuity(const std::string& activity) = 0;
};

class LocalBenchTarget : public BenchTarget {
 public:
  LocalBenchTarget(const std::string& fixture_file, PolicySet policy_set,
                   int chain_depth_limit = 2);
  ~LocalBenchTarget() override;

  std::vector<std::string> startable() const override;
  void configure(const ContinuityConfig& cfg) override;
  void reset() override;
  ResponseContext start(const std::string& activity) override;
  ResponseContext finish(const std::string& activity) override;
  ContinuityReport wait_continuity(const std::string& activity) override;

 private:
  void rebuild_engine();

  Store store_;
  PolicySet policy_set_;
  int chain_depth_limit_;
  ContinuityConfig continuity_{10, 5};
  std::vector<ActivityRecord> baseline_;
  std::unique_ptr<Engine> engine_;
};

class HttpBenchTarget : public BenchTarget {
 public:
  /// `endpoint` is a scheme://host:port base, e.g. "http://127.0.0.1:8080".
  HttpBenchTarget(const std::string& endpoint,
                  const std::string& fixture_file);
  ~HttpBenchTarget() override;

  std::vector<std::string> startable() const override;
  void configure(const ContinuityConfig& cfg) override;
  void reset() override;
  ResponseContext start(const std::string& activity) override;
  ResponseContext finish(const std::string& activity) override;
  ContinuityReport wait_continuity(const std::string& activity) override;

 private:
  ResponseContext decide(const std::string& activity,
                         const std::string& action);

  std::string endpoint_;
  std::vector<ActivityRecord> baseline_;
  std::unique_ptr<httplib::Client> client_;
};

std::string continuity_label(const ContinuityConfig& cfg);

/// Parses "REPSxINTERVAL", e.g. "10x5".
ContinuityConfig continuity_from_label(const std::string& label);

/// Runs every requested configuration against the target. Throws
/// FixtureTooSmallError when the fixture cannot satisfy the largest count
/// and BenchAbortedError when any request on the measured path is denied.
BenchReport run_bench(const BenchSpec& spec, BenchTarget& target);

std::string emit_report_json(const BenchReport& report);
std::string emit_report_csv(const BenchReport& report);
void write_report_file(const BenchReport& report, BenchFormat format,
                       const std::string& path);

}  // namespace actipol

#endif  // ACTIPOL_BENCH_HPP
