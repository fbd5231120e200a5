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
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qtel/oracle.hpp"

namespace qtel {

enum class RunMode { sample, enumerate, sweep };
enum class OutputFormat { json, csv };

std::string_view to_string(RunMode mode);
std::string_view to_string(OutputFormat format);

/// One reported row: an enumerated leaf (exact probability) or a sampled
/// trial (empirical flag set, probability -1). Absent outcomes are -1.
struct TrialRow {
  std::uint64_t trial_id = 0;
  OutcomeTuple outcomes;
  double probability = -1;
  bool empirical = false;
  double fidelity_alpha = 0;
  double fidelity_beta = 0;
};

struct ReportSummary {
  bool pass = false;
  double min_fidelity = -1;
  double mean_fidelity_alpha = -1;
  double mean_fidelity_beta = -1;
  double max_uniformity_deviation = -1;
  double max_probability_defect = -1;
  double identity_residual = -1;
  std::int64_t leaf_count = -1;
};

/// Everything one CLI invocation reports. Serialization is key-sorted,
/// locale-independent, and prints floating-point values with 17 significant
/// digits, so identical inputs and seed give byte-identical output.
struct RunReport {
  RunMode mode = RunMode::enumerate;
  std::uint64_t seed = 0;
  bool has_config = false;
  Index d1 = 0, d2 = 0, d = 0;
  std::vector<TrialRow> trials;
  std::vector<VerificationCertificate> sweep;  // sweep mode only
  ReportSummary summary;
};

std::string format_double(double value);

std::string to_json(const RunReport& report);
std::string to_json(const VerificationCertificate& cert);
std::string to_csv(const RunReport& report);

}  // namespace qtel
