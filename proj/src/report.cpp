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
#include "qtel/report.hpp"

#include <charconv>

// Serialization is written by hand rather than through a JSON library so the
// byte-level guarantees hold: keys are emitted in sorted order and floats go
// through std::to_chars (locale-independent, 17 significant digits).

namespace qtel {

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::sample: return "sample";
    case RunMode::enumerate: return "enumerate";
    case RunMode::sweep: return "sweep";
  }
  return "?";
}

std::string_view to_string(OutputFormat format) {
  return format == OutputFormat::json ? "json" : "csv";
}

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value,
                                    std::chars_format::general, 17);
  return std::string(buf, result.ptr);
}

namespace {

std::string format_int(std::int64_t value) { return std::to_string(value); }
std::string format_uint(std::uint64_t value) { return std::to_string(value); }
std::string format_bool(bool value) { return value ? "true" : "false"; }

void append_trial(std::string& out, const TrialRow& row) {
  out += "{\"empirical\":";
  out += format_bool(row.empirical);
  out += ",\"fidelity_alpha\":";
  out += format_double(row.fidelity_alpha);
  out += ",\"fidelity_beta\":";
  out += format_double(row.fidelity_beta);
  out += ",\"k\":";
  out += format_int(row.outcomes.k);
  out += ",\"k1\":";
  out += format_int(row.outcomes.k1);
  out += ",\"k2\":";
  out += format_int(row.outcomes.k2);
  out += ",\"m1\":";
  out += format_int(row.outcomes.m1);
  out += ",\"m2\":";
  out += format_int(row.outcomes.m2);
  out += ",\"probability\":";
  out += format_double(row.probability);
  out += ",\"trial_id\":";
  out += format_uint(row.trial_id);
  out += "}";
}

void append_certificate(std::string& out, const VerificationCertificate& cert) {
  out += "{\"checks\":{\"fidelity\":";
  out += format_bool(cert.fidelity_ok);
  out += ",\"identity\":";
  out += format_bool(cert.identity_ok);
  out += ",\"probability\":";
  out += format_bool(cert.probability_ok);
  out += ",\"uniformity\":";
  out += format_bool(cert.uniformity_ok);
  out += "},\"config\":{\"d\":";
  out += format_int(cert.d);
  out += ",\"d1\":";
  out += format_int(cert.d1);
  out += ",\"d2\":";
  out += format_int(cert.d2);
  out += "},\"config_valid\":";
  out += format_bool(cert.config_valid);
  out += ",\"identity_residual\":";
  out += format_double(cert.identity_residual);
  out += ",\"input_pairs\":";
  out += format_int(cert.input_pairs);
  out += ",\"leaf_count\":";
  out += format_int(cert.leaf_count);
  out += ",\"max_probability_defect\":";
  out += format_double(cert.max_probability_defect);
  out += ",\"max_uniformity_deviation\":";
  out += format_double(cert.max_uniformity_deviation);
  out += ",\"min_fidelity\":";
  out += format_double(cert.min_fidelity);
  out += ",\"pass\":";
  out += format_bool(cert.pass);
  out += ",\"seed\":";
  out += format_uint(cert.seed);
  out += "}";
}

void append_summary(std::string& out, const ReportSummary& s) {
  out += "{\"identity_residual\":";
  out += format_double(s.identity_residual);
  out += ",\"leaf_count\":";
  out += format_int(s.leaf_count);
  out += ",\"max_probability_defect\":";
  out += format_double(s.max_probability_defect);
  out += ",\"max_uniformity_deviation\":";
  out += format_double(s.max_uniformity_deviation);
  out += ",\"mean_fidelity_alpha\":";
  out += format_double(s.mean_fidelity_alpha);
  out += ",\"mean_fidelity_beta\":";
  out += format_double(s.mean_fidelity_beta);
  out += ",\"min_fidelity\":";
  out += format_double(s.min_fidelity);
  out += ",\"pass\":";
  out += format_bool(s.pass);
  out += "}";
}

}  // namespace

std::string to_json(const VerificationCertificate& cert) {
  std::string out;
  append_certificate(out, cert);
  out += "\n";
  return out;
}

std::string to_json(const RunReport& report) {
  std::string out = "{\"config\":";
  if (report.has_config) {
    out += "{\"d\":" + format_int(report.d) + ",\"d1\":" + format_int(report.d1) +
           ",\"d2\":" + format_int(report.d2) + "}";
  } else {
    out += "null";
  }
  out += ",\"mode\":\"";
  out += to_string(report.mode);
  out += "\",\"seed\":";
  out += format_uint(report.seed);
  out += ",\"summary\":";
  append_summary(out, report.summary);
  out += ",\"trials\":[";
  if (report.mode == RunMode::sweep) {
    for (std::size_t i = 0; i < report.sweep.size(); ++i) {
      if (i > 0) out += ",";
      out += "\n";
      append_certificate(out, report.sweep[i]);
    }
  } else {
    for (std::size_t i = 0; i < report.trials.size(); ++i) {
      if (i > 0) out += ",";
      out += "\n";
      append_trial(out, report.trials[i]);
    }
  }
  out += "\n]}\n";
  return out;
}

std::string to_csv(const RunReport& report) {
  std::string out =
      "trial_id,k,k1,k2,m1,m2,probability,fidelity_alpha,fidelity_beta\n";
  if (report.mode == RunMode::sweep) {
    // One row per swept config; outcome columns do not apply, and the
    // fidelity columns carry the certificate's minimum fidelity.
    for (std::size_t i = 0; i < report.sweep.size(); ++i) {
      const VerificationCertificate& cert = report.sweep[i];
      out += format_uint(i);
      out += ",-1,-1,-1,-1,-1,-1,";
      out += format_double(cert.min_fidelity);
      out += ",";
      out += format_double(cert.min_fidelity);
      out += "\n";
    }
    return out;
  }
  for (const TrialRow& row : report.trials) {
    out += format_uint(row.trial_id);
    out += ",";
    out += format_int(row.outcomes.k);
    out += ",";
    out += format_int(row.outcomes.k1);
    out += ",";
    out += format_int(row.outcomes.k2);
    out += ",";
    out += format_int(row.outcomes.m1);
    out += ",";
    out += format_int(row.outcomes.m2);
    out += ",";
    out += format_double(row.probability);
    out += ",";
    out += format_double(row.fidelity_alpha);
    out += ",";
    out += format_double(row.fidelity_beta);
    out += "\n";
  }
  return out;
}

}  // namespace qtel
