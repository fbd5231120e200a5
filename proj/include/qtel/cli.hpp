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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qtel/report.hpp"

namespace qtel {

/// Parsed CLI configuration. d1/d2/d are required for sample and enumerate
/// runs and ignored by sweep runs.
struct RunConfig {
  Index d1 = 0;
  Index d2 = 0;
  Index d = 0;
  RunMode mode = RunMode::enumerate;
  std::int64_t trials = 100;
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::json;
  std::string out_path;  // empty: standard output
};

struct ParseOutcome {
  std::optional<RunConfig> config;  // set on success
  int exit_code = 0;                // meaningful when config is empty
};

/// Parses command-line arguments (program name excluded). Unknown flags and
/// unparsable values print usage to `err` and yield exit code 2; --help
/// prints usage to `out` and yields exit code 0.
ParseOutcome parse_args(const std::vector<std::string>& args, std::ostream& out,
                        std::ostream& err);

/// Executes a run and writes the report. Exit codes: 0 when every check
/// passes, 1 on verification or I/O failure, 2 on configuration errors
/// (d1*d2 > d, nonpositive dimensions, trials < 1).
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace qtel
