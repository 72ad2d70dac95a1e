// Copyright 2026 The safemetric Authors.
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

// Command-line front end.
//
//   safemetric evaluate --scenario a.scenario.jsonl --log a.log.jsonl
//                       [--config cfg.json] [--format table|jsonl] [--out FILE]
//   safemetric generate --archetype motorway [--fault drop:lead] [--seed 7]
//                       --out fixtures/motorway
//   safemetric compare  reports1.jsonl reports2.jsonl
//   safemetric import-kitti --tracklets tracklet_labels.xml --oxts oxts.txt
//                           --out drive.scenario.jsonl
//
// Exit codes: 0 success, 2 input error, 3 config error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "safemetric/safemetric.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw safemetric::InputError("cannot write file: " + path);
  out << text;
}

struct EvaluateArgs {
  std::vector<std::string> scenarios;
  std::vector<std::string> logs;
  std::string config;
  std::string out;
  std::string format = "table";
  std::optional<double> iou_threshold;
  std::optional<double> w_d;
  std::optional<double> w_t;
  std::optional<unsigned> threads;
};

int run_evaluate(const EvaluateArgs& args) {
  using namespace safemetric;
  if (args.scenarios.empty() || args.scenarios.size() != args.logs.size()) {
    throw InputError("evaluate: need one --log per --scenario (got " +
                     std::to_string(args.scenarios.size()) + " scenarios, " +
                     std::to_string(args.logs.size()) + " logs)");
  }
  EvaluationConfig cfg = args.config.empty() ? EvaluationConfig{} : load_config(args.config);
  if (args.iou_threshold) cfg.iou_threshold = *args.iou_threshold;
  if (args.w_d) cfg.weights.detection = *args.w_d;
  if (args.w_t) cfg.weights.tracking = *args.w_t;
  if (args.w_d && !args.w_t) cfg.weights.tracking = 1.0 - *args.w_d;
  if (args.w_t && !args.w_d) cfg.weights.detection = 1.0 - *args.w_t;
  if (args.threads) cfg.threads = *args.threads;
  validate(cfg);

  std::vector<Scenario> scenarios;
  std::vector<PerceptionLog> logs;
  for (std::size_t i = 0; i < args.scenarios.size(); ++i) {
    scenarios.push_back(load_scenario(args.scenarios[i]));
    if (scenarios.back().meta.name.empty()) scenarios.back().meta.name = args.scenarios[i];
    logs.push_back(load_perception_log(args.logs[i], scenarios.back()));
  }

  std::vector<SafetyReport> reports(scenarios.size());
  EvaluationConfig per_pair = cfg;
  if (scenarios.size() > 1) per_pair.threads = 1;
  parallel_for(scenarios.size(), cfg.threads, [&](std::size_t i) {
    reports[i] = evaluate_scenario(scenarios[i], logs[i], per_pair);
  });

  if (args.format == "jsonl") {
    write_output(args.out, emit_jsonl(reports));
  } else {
    std::string text = format_table(reports);
    for (const SafetyReport& r : reports) {
      for (const std::string& w : r.warnings) text += "warning [" + r.scenario + "]: " + w + "\n";
    }
    write_output(args.out, text);
  }
  return kExitOk;
}

int run_generate(const std::string& archetype_name, const std::vector<std::string>& fault_tokens,
                 std::uint64_t seed, const std::string& out) {
  using namespace safemetric;
  const auto archetype = parse_archetype(archetype_name);
  if (!archetype) throw ConfigError("unknown archetype '" + archetype_name + "'");
  FaultSpec faults;
  for (const std::string& token : fault_tokens) add_fault(faults, token);
  const Fixture fx = generate_fixture(*archetype, faults, seed);
  const std::string prefix = out.empty() ? std::string(to_string(*archetype)) : out;
  write_output(prefix + ".scenario.jsonl", serialize_scenario(fx.scenario));
  write_output(prefix + ".log.jsonl", serialize_perception_log(fx.log, fx.scenario));
  std::cout << "wrote " << prefix << ".scenario.jsonl and " << prefix << ".log.jsonl\n";
  return kExitOk;
}

int run_compare(const std::vector<std::string>& files, const std::string& out) {
  using namespace safemetric;
  std::vector<SafetyReport> reports;
  for (const std::string& f : files) {
    auto parsed = parse_jsonl(detail::read_file(f), f);
    reports.insert(reports.end(), parsed.begin(), parsed.end());
  }
  if (reports.size() < 2) throw InputError("compare: need >= 2 reports");
  write_output(out, format_comparison(reports));
  return kExitOk;
}

int run_import_kitti(const std::string& tracklets, const std::string& oxts, double rate,
                     const std::string& out) {
  using namespace safemetric;
  const Scenario sc = import_kitti_tracklets(tracklets, oxts, rate);
  for (const std::string& w : sc.warnings) std::cerr << "warning: " << w << "\n";
  write_output(out, serialize_scenario(sc));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safety-oriented evaluation of object detection and tracking"};
  app.require_subcommand(1);

  EvaluateArgs eval;
  auto* evaluate = app.add_subcommand("evaluate", "Score perception logs against scenarios");
  evaluate->add_option("--scenario", eval.scenarios, "Scenario file (repeatable)")->required();
  evaluate->add_option("--log", eval.logs, "Perception log, paired by position (repeatable)")
      ->required();
  evaluate->add_option("--config", eval.config, "JSON configuration file");
  evaluate->add_option("--out", eval.out, "Output file (default: stdout)");
  evaluate->add_option("--format", eval.format, "table or jsonl")
      ->check(CLI::IsMember({"table", "jsonl"}));
  evaluate->add_option("--iou-threshold", eval.iou_threshold, "Overrides matching.iou_threshold");
  evaluate->add_option("--w-d", eval.w_d, "Overrides weights.w_D");
  evaluate->add_option("--w-t", eval.w_t, "Overrides weights.w_T");
  evaluate->add_option("--threads", eval.threads, "Worker threads");

  std::string archetype;
  std::vector<std::string> faults;
  std::uint64_t seed = 1;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Write a synthetic scenario and perception log");
  generate->add_option("--archetype", archetype, "crossing, motorway or rural")->required();
  generate->add_option("--fault", faults,
                       "drop:<id> miss:<p> delay:<k> jitter:<sigma> fp:<p> swap:<a>,<b>@<frame>");
  generate->add_option("--seed", seed, "Random seed");
  generate->add_option("--out", gen_out, "Output path prefix");

  std::vector<std::string> report_files;
  std::string cmp_out;
  auto* compare = app.add_subcommand("compare", "Compare machine-readable reports");
  compare->add_option("reports", report_files, "Report files (jsonl)")->required();
  compare->add_option("--out", cmp_out, "Output file (default: stdout)");

  std::string tracklets, oxts, kitti_out;
  double rate = 10.0;
  auto* kitti = app.add_subcommand("import-kitti", "Convert KITTI raw annotations to a scenario");
  kitti->add_option("--tracklets", tracklets, "tracklet_labels.xml")->required();
  kitti->add_option("--oxts", oxts, "Concatenated OXTS rows, one per frame")->required();
  kitti->add_option("--rate", rate, "Frame rate in Hz");
  kitti->add_option("--out", kitti_out, "Output scenario file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*evaluate) return run_evaluate(eval);
    if (*generate) return run_generate(archetype, faults, seed, gen_out);
    if (*compare) return run_compare(report_files, cmp_out);
    if (*kitti) return run_import_kitti(tracklets, oxts, rate, kitti_out);
  } catch (const safemetric::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const safemetric::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
