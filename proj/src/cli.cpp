// Copyright 2026 The qtel Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qtel/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

namespace qtel {

namespace {

constexpr double kClaimTol = 1e-9;

int outcome_or_absent(const ProtocolTranscript& transcript, MessageTag tag) {
  return transcript.has_message(tag) ? transcript.message_value(tag) : -1;
}

ReportSummary summarize_trials(const std::vector<TrialRow>& rows) {
  ReportSummary s;
  if (rows.empty()) return s;
  double min_fid = 2.0, sum_a = 0.0, sum_b = 0.0;
  for (const TrialRow& row : rows) {
    min_fid = std::min({min_fid, row.fidelity_alpha, row.fidelity_beta});
    sum_a += row.fidelity_alpha;
    sum_b += row.fidelity_beta;
  }
  s.min_fidelity = min_fid;
  s.mean_fidelity_alpha = sum_a / static_cast<double>(rows.size());
  s.mean_fidelity_beta = sum_b / static_cast<double>(rows.size());
  return s;
}

RunReport run_sample(const RunConfig& rc, const ProtocolConfig& config) {
  RunReport report;
  report.mode = RunMode::sample;
  report.seed = rc.seed;
  report.has_config = true;
  report.d1 = config.d1();
  report.d2 = config.d2();
  report.d = config.d();

  for (std::int64_t t = 0; t < rc.trials; ++t) {
    Rng rng = Rng::split(rc.seed, static_cast<std::uint64_t>(t));
    const std::uint64_t trial_id = rng.next_u64();
    const Reg alpha = random_state(config.d1(), rng);
    const Reg beta = random_state(config.d2(), rng);
    const ProtocolResult result = run_protocol(config, alpha, beta, rng);

    TrialRow row;
    row.trial_id = trial_id;
    row.outcomes.k = outcome_or_absent(result.transcript, MessageTag::k);
    row.outcomes.k1 = result.transcript.message_value(MessageTag::k1);
    row.outcomes.k2 = result.transcript.message_value(MessageTag::k2);
    row.outcomes.m1 = result.transcript.message_value(MessageTag::m1);
    row.outcomes.m2 = result.transcript.message_value(MessageTag::m2);
    row.probability = -1;
    row.empirical = true;
    row.fidelity_alpha = result.fidelity_alpha;
    row.fidelity_beta = result.fidelity_beta;
    report.trials.push_back(row);
  }

  report.summary = summarize_trials(report.trials);
  report.summary.leaf_count = static_cast<std::int64_t>(report.trials.size());

  // Empirical frequency deviation from uniform, per exchanged outcome.
  double max_dev = 0;
  const auto tally = [&](auto get, Index range) {
    if (range < 1) return;
    std::vector<double> freq(static_cast<std::size_t>(range), 0.0);
    for (const TrialRow& row : report.trials) {
      const int v = get(row);
      if (v >= 0 && v < range) freq[static_cast<std::size_t>(v)] += 1.0;
    }
    for (double& f : freq) {
      f /= static_cast<double>(report.trials.size());
      max_dev = std::max(max_dev, std::abs(f - 1.0 / static_cast<double>(range)));
    }
  };
  if (config.needs_tailoring())
    tally([](const TrialRow& r) { return r.outcomes.k; }, config.d());
  tally([](const TrialRow& r) { return r.outcomes.k1; }, config.d1());
  tally([](const TrialRow& r) { return r.outcomes.k2; }, config.d2());
  tally([](const TrialRow& r) { return r.outcomes.m1; }, config.d1());
  tally([](const TrialRow& r) { return r.outcomes.m2; }, config.d2());
  report.summary.max_uniformity_deviation = max_dev;
  report.summary.pass = report.summary.min_fidelity >= 1.0 - kClaimTol;
  return report;
}

RunReport run_enumerate(const RunConfig& rc, const ProtocolConfig& config) {
  RunReport report;
  report.mode = RunMode::enumerate;
  report.seed = rc.seed;
  report.has_config = true;
  report.d1 = config.d1();
  report.d2 = config.d2();
  report.d = config.d();

  const VerificationCertificate cert = verify_identity_channel(config, rc.seed);

  // Rows come from the first seeded Haar input pair, the same pair the
  // certificate uses internally.
  const auto [alpha, beta] = haar_input_pair(config, rc.seed, 0);
  const std::vector<BranchLeaf> leaves = enumerate_branches(config, alpha, beta);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    TrialRow row;
    row.trial_id = static_cast<std::uint64_t>(i);
    row.outcomes = leaves[i].outcomes;
    row.probability = leaves[i].probability;
    row.empirical = false;
    row.fidelity_alpha = leaves[i].fidelity_alpha;
    row.fidelity_beta = leaves[i].fidelity_beta;
    report.trials.push_back(row);
  }

  report.summary = summarize_trials(report.trials);
  report.summary.min_fidelity = cert.min_fidelity;
  report.summary.max_uniformity_deviation = cert.max_uniformity_deviation;
  report.summary.max_probability_defect = cert.max_probability_defect;
  report.summary.identity_residual = cert.identity_residual;
  report.summary.leaf_count = cert.leaf_count;
  report.summary.pass = cert.pass;
  return report;
}

RunReport run_sweep(const RunConfig& rc) {
  RunReport report;
  report.mode = RunMode::sweep;
  report.seed = rc.seed;
  report.has_config = false;

  bool pass = true;
  double min_fid = 2.0, max_dev = 0.0, max_defect = 0.0, max_residual = 0.0;
  std::int64_t leaves = 0;
  for (const auto& [d1, d2, d] : acceptance_sweep()) {
    const VerificationCertificate cert =
        verify_identity_channel(ProtocolConfig(d1, d2, d), rc.seed);
    pass = pass && cert.pass;
    min_fid = std::min(min_fid, cert.min_fidelity);
    max_dev = std::max(max_dev, cert.max_uniformity_deviation);
    max_defect = std::max(max_defect, cert.max_probability_defect);
    max_residual = std::max(max_residual, cert.identity_residual);
    leaves += cert.leaf_count;
    report.sweep.push_back(cert);
  }

  report.summary.pass = pass;
  report.summary.min_fidelity = min_fid;
  report.summary.max_uniformity_deviation = max_dev;
  report.summary.max_probability_defect = max_defect;
  report.summary.identity_residual = max_residual;
  report.summary.leaf_count = leaves;
  return report;
}

}  // namespace

ParseOutcome parse_args(const std::vector<std::string>& args, std::ostream& out,
                        std::ostream& err) {
  RunConfig rc;
  std::string mode = "enumerate";
  std::string format = "json";

  CLI::App app{"two-way qudit teleportation simulator"};
  app.add_option("--d1", rc.d1, "dimension of the state Alice sends");
  app.add_option("--d2", rc.d2, "dimension of the state Bob sends");
  app.add_option("--d", rc.d, "dimension of each channel qudit");
  app.add_option("--mode", mode, "sample | enumerate | sweep")
      ->check(CLI::IsMember({"sample", "enumerate", "sweep"}));
  app.add_option("--trials", rc.trials, "number of sampled trials (sample mode)");
  app.add_option("--seed", rc.seed, "base seed for all randomness");
  app.add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", rc.out_path, "output path (default: standard output)");

  std::vector<const char*> argv;
  argv.push_back("qtel");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ParseOutcome{std::nullopt, 0};
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return ParseOutcome{std::nullopt, 2};
  }

  rc.mode = mode == "sample" ? RunMode::sample
                             : (mode == "sweep" ? RunMode::sweep : RunMode::enumerate);
  rc.format = format == "csv" ? OutputFormat::csv : OutputFormat::json;
  return ParseOutcome{rc, 0};
}

int run(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  RunReport report;
  try {
    if (rc.mode == RunMode::sweep) {
      report = run_sweep(rc);
    } else {
      if (rc.d1 < 1 || rc.d2 < 1 || rc.d < 1) {
        err << "error: --d1, --d2 and --d must be set to positive integers\n";
        return 2;
      }
      if (rc.d1 * rc.d2 > rc.d) {
        err << "error: invalid configuration: d1*d2 <= d is required, got "
            << rc.d1 << "*" << rc.d2 << " > " << rc.d << "\n";
        return 2;
      }
      if (rc.mode == RunMode::sample && rc.trials < 1) {
        err << "error: --trials must be >= 1 in sample mode\n";
        return 2;
      }
      const ProtocolConfig config(rc.d1, rc.d2, rc.d);
      report = rc.mode == RunMode::sample ? run_sample(rc, config) : run_enumerate(rc, config);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  const std::string text =
      rc.format == OutputFormat::json ? to_json(report) : to_csv(report);
  if (rc.out_path.empty()) {
    out << text;
    if (!out) {
      err << "error: failed to write report to standard output\n";
      return 1;
    }
  } else {
    std::ofstream file(rc.out_path, std::ios::binary);
    if (!file) {
      err << "error: cannot open output file: " << rc.out_path << "\n";
      return 1;
    }
    file << text;
    file.close();
    if (!file) {
      err << "error: failed to write output file: " << rc.out_path << "\n";
      return 1;
    }
  }
  return report.summary.pass ? 0 : 1;
}

}  // namespace qtel
