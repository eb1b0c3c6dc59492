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

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "actipol/bench.hpp"
#include "actipol/config.hpp"
#include "actipol/engine.hpp"
#include "actipol/errors.hpp"
#include "actipol/service.hpp"

namespace {

using namespace actipol;

struct CommonOptions {
  std::string config_file;
  std::string policy_file;
  std::string fixture_file;
};

void add_common_options(CLI::App* cmd, CommonOptions* opts) {
  cmd->add_option("--config", opts->config_file,
                  "JSON config file (ACTIPOL_* env vars override it)");
  cmd->add_option("--policy", opts->policy_file, "policy set XML file");
  cmd->add_option("--fixture", opts->fixture_file,
                  "activity fixture JSON file");
}

ServiceConfig resolve_config(const CommonOptions& opts) {
  ServiceConfig cfg = load_service_config(opts.config_file);
  if (!opts.policy_file.empty()) cfg.policy_file = opts.policy_file;
  if (!opts.fixture_file.empty()) cfg.fixture_file = opts.fixture_file;
  return cfg;
}

int cmd_serve(const CommonOptions& opts, const std::string& listen) {
  ServiceConfig cfg = resolve_config(opts);
  if (!listen.empty()) cfg.listen_address = listen;

  PolicySet policy_set = parse_policy_file(cfg.policy_file);
  Store store;
  if (!cfg.fixture_file.empty()) store.load_fixture_file(cfg.fixture_file);
  Engine engine(store, policy_set, cfg.engine_config());
  Service service(store, engine);

  std::string host;
  int port = 0;
  split_listen_address(cfg.listen_address, host, port);
  std::cout << "actipol: serving " << policy_set.policies.size()
            << " policies on " << host << ":" << port << std::endl;
  if (!service.listen(host, port)) {
    std::cerr << "error: cannot listen on " << cfg.listen_address
              << std::endl;
    return 1;
  }
  return 0;
}

int cmd_decide(const CommonOptions& opts, const std::string& subject,
               const std::string& activity, const std::string& action) {
  ServiceConfig cfg = resolve_config(opts);
  PolicySet policy_set = parse_policy_file(cfg.policy_file);
  Store store;
  if (!cfg.fixture_file.empty()) store.load_fixture_file(cfg.fixture_file);
  Engine engine(store, policy_set, cfg.engine_config());

  ActivityRequest req{subject, activity, action_id_from_string(action)};
  ResponseContext resp = engine.handle_request(req);
  engine.wait_for_continuity(activity);
  std::cout << to_wire_json(resp) << std::endl;
  return 0;
}

int cmd_policy_lint(const std::string& file) {
  PolicySet ps;
  try {
    ps = parse_policy_file(file);
  } catch (const Error& e) {
    std::cerr << file << ": " << e.what() << std::endl;
    return 1;
  }
  std::vector<std::string> diagnostics = validate_corpus(ps);
  for (const std::string& d : diagnostics) {
    std::cout << file << ": " << d << std::endl;
  }
  if (diagnostics.empty()) {
    std::cout << file << ": ok (" << ps.policies.size() << " policies)"
              << std::endl;
    return 0;
  }
  return 2;
}

int cmd_policy_convert(const std::string& file, const std::string& out) {
  std::string json;
  if (file.size() > 5 && file.substr(file.size() - 5) == ".json") {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open policy file: " + file);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    json = to_canonical_json(from_canonical_json(text));
  } else {
    json = to_canonical_json(parse_policy_file(file));
  }
  if (out.empty()) {
    std::cout << json << std::endl;
  } else {
    std::ofstream os(out);
    if (!os) throw IoError("cannot open output file: " + out);
    os << json << '\n';
  }
  return 0;
}

int cmd_bench(const CommonOptions& opts, const BenchSpec& spec,
              const std::string& target_kind, const std::string& endpoint,
              const std::string& out, std::string format) {
  ServiceConfig cfg = resolve_config(opts);
  if (cfg.fixture_file.empty()) cfg.fixture_file = "fixtures/bench.json";

  std::unique_ptr<BenchTarget> target;
  if (target_kind == "local") {
    target = std::make_unique<LocalBenchTarget>(
        cfg.fixture_file, parse_policy_file(cfg.policy_file),
        cfg.chain_depth_limit);
  } else {
    target = std::make_unique<HttpBenchTarget>(endpoint, cfg.fixture_file);
  }

  if (spec.concurrent) {
    std::cerr << "note: concurrent results are not comparable to the "
                 "sequential methodology"
              << std::endl;
  }
  BenchReport report = run_bench(spec, *target);

  if (format.empty()) {
    format = (out.size() > 5 && out.substr(out.size() - 5) == ".json")
                 ? "json"
                 : "csv";
  }
  BenchFormat fmt = format == "json" ? BenchFormat::Json : BenchFormat::Csv;
  if (out.empty()) {
    std::cout << (fmt == BenchFormat::Csv ? emit_report_csv(report)
                                          : emit_report_json(report));
  } else {
    write_report_file(report, fmt, out);
    std::cout << "wrote " << report.rows.size() << " rows to " << out
              << std::endl;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"activity dependency policy engine"};
  app.require_subcommand(1);

  CommonOptions serve_opts;
  std::string listen;
  CLI::App* serve = app.add_subcommand("serve", "run the HTTP service");
  add_common_options(serve, &serve_opts);
  serve->add_option("--listen", listen, "host:port to bind");

  CommonOptions decide_opts;
  std::string subject = "cli";
  std::string activity;
  std::string action;
  CLI::App* decide =
      app.add_subcommand("decide", "one-shot local decision without HTTP");
  add_common_options(decide, &decide_opts);
  decide->add_option("--subject", subject, "requesting subject");
  decide->add_option("--activity", activity, "activity id")->required();
  decide
      ->add_option("--action", action,
                   "startActivity, holdActivity, or finishActivity")
      ->required();

  CLI::App* policy = app.add_subcommand("policy", "policy corpus tools");
  policy->require_subcommand(1);
  std::string lint_file;
  CLI::App* lint = policy->add_subcommand("lint", "parse and report");
  lint->add_option("file", lint_file, "policy set XML file")->required();
  std::string convert_file;
  std::string convert_out;
  CLI::App* convert =
      policy->add_subcommand("convert", "emit the canonical JSON form");
  convert->add_option("file", convert_file, "policy set XML or JSON file")
      ->required();
  convert->add_option("--out", convert_out, "output file (default stdout)");

  CommonOptions bench_opts;
  std::string mode = "start";
  std::string target_kind = "local";
  std::string endpoint = "http://127.0.0.1:8080";
  std::vector<int> counts{10, 20, 30, 40, 50};
  std::vector<std::string> continuity{"10x5", "10x10", "20x5", "20x10"};
  int warmup = 1;
  bool concurrent = false;
  std::string bench_out;
  std::string bench_format;
  CLI::App* bench = app.add_subcommand("bench", "latency measurements");
  add_common_options(bench, &bench_opts);
  bench->add_option("--mode", mode, "start or full")
      ->check(CLI::IsMember({"start", "full"}));
  bench->add_option("--target", target_kind, "local or http")
      ->check(CLI::IsMember({"local", "http"}));
  bench->add_option("--endpoint", endpoint, "base URL for --target http");
  bench->add_option("--counts", counts, "request counts")->delimiter(',');
  bench
      ->add_option("--continuity", continuity,
                   "continuity configs as REPSxINTERVAL_MS")
      ->delimiter(',');
  bench->add_option("--warmup", warmup, "unmeasured warmup passes");
  bench->add_flag("--concurrent", concurrent,
                  "issue requests concurrently (non-comparable)");
  bench->add_option("--out", bench_out, "report file (default stdout)");
  bench->add_option("--format", bench_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) return cmd_serve(serve_opts, listen);
    if (decide->parsed()) {
      return cmd_decide(decide_opts, subject, activity, action);
    }
    if (policy->parsed()) {
      if (lint->parsed()) return cmd_policy_lint(lint_file);
      return cmd_policy_convert(convert_file, convert_out);
    }
    if (bench->parsed()) {
      BenchSpec spec;
      spec.mode = mode == "full" ? BenchMode::FullCycle : BenchMode::StartOnly;
      spec.request_counts = counts;
      spec.continuity.clear();
      for (const std::string& label : continuity) {
        spec.continuity.push_back(continuity_from_label(label));
      }
      spec.warmup_runs = warmup;
      spec.concurrent = concurrent;
      return cmd_bench(bench_opts, spec, target_kind, endpoint, bench_out,
                       bench_format);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
