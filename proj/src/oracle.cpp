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
#include "qtel/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace qtel {

namespace {

constexpr double kClaimTol = 1e-9;      // fidelity / uniformity / probability bounds
constexpr double kIdentityTol = 1e-8;   // assembled-map residual bound

std::string tuple_string(const OutcomeTuple& t) {
  std::string s = "(k=" + std::to_string(t.k) + ", k1=" + std::to_string(t.k1) +
                  ", k2=" + std::to_string(t.k2) + ", m1=" + std::to_string(t.m1) +
                  ", m2=" + std::to_string(t.m2) + ")";
  return s;
}

/// Calls fn(tuple) for every outcome tuple of the config, in lexicographic
/// (k, k1, k2, m1, m2) order. k stays -1 when tailoring is inactive.
template <typename Fn>
void for_each_outcome(const ProtocolConfig& config, Fn&& fn) {
  const Index k_range = config.needs_tailoring() ? config.d() : 1;
  for (Index k = 0; k < k_range; ++k)
    for (Index k1 = 0; k1 < config.d1(); ++k1)
      for (Index k2 = 0; k2 < config.d2(); ++k2)
        for (Index m1 = 0; m1 < config.d1(); ++m1)
          for (Index m2 = 0; m2 < config.d2(); ++m2) {
            OutcomeTuple t;
            t.k = config.needs_tailoring() ? static_cast<int>(k) : -1;
            t.k1 = static_cast<int>(k1);
            t.k2 = static_cast<int>(k2);
            t.m1 = static_cast<int>(m1);
            t.m2 = static_cast<int>(m2);
            fn(t);
          }
}

ForcedOutcomes to_forced(const OutcomeTuple& t) {
  ForcedOutcomes f;
  f.k = t.k < 0 ? 0 : t.k;
  f.k1 = t.k1;
  f.k2 = t.k2;
  f.m1 = t.m1;
  f.m2 = t.m2;
  return f;
}

void accumulate(std::map<std::string, std::map<long, double>>& marginals, std::string tag,
                long value, double p) {
  marginals[std::move(tag)][value] += p;
}

std::string joint_tag(MessageTag a, MessageTag b) {
  return std::string(to_string(a)) + std::string(to_string(b));
}

}  // namespace

std::pair<Reg, Reg> haar_input_pair(const ProtocolConfig& config, std::uint64_t seed,
                                    std::uint64_t index) {
  Rng rng = Rng::split(seed, index);
  Reg alpha = random_state(config.d1(), rng);
  Reg beta = random_state(config.d2(), rng);
  return {std::move(alpha), std::move(beta)};
}

std::vector<BranchLeaf> enumerate_branches(const ProtocolConfig& config, const Reg& alpha,
                                           const Reg& beta) {
  // Output references reconstructed here, not taken from the transcript:
  // the oracle only trusts the states the protocol returns.
  const Reg alpha_ref = embedded(alpha, config.d());
  const Reg beta_ref = embedded(beta, config.d());

  std::vector<BranchLeaf> leaves;
  for_each_outcome(config, [&](const OutcomeTuple& t) {
    BranchLeaf leaf;
    leaf.outcomes = t;
    try {
      const ProtocolResult result = run_protocol(config, alpha, beta, to_forced(t));
      leaf.probability = result.transcript.leaf_probability();
      leaf.fidelity_alpha = fidelity(result.bob_out, alpha_ref);
      leaf.fidelity_beta = fidelity(result.alice_out, beta_ref);
    } catch (const zero_probability_error&) {
      leaf.probability = 0;
      leaf.fidelity_alpha = -1;
      leaf.fidelity_beta = -1;
      leaf.flagged = true;
    } catch (const internal_error& e) {
      throw internal_error(e.stage(),
                           std::string(e.what()) + " at outcome " + tuple_string(t));
    }
    leaves.push_back(leaf);
  });
  return leaves;
}

UniformityReport uniformity_report(const std::vector<BranchLeaf>& leaves) {
  if (leaves.empty()) throw std::invalid_argument("uniformity_report: no leaves");

  std::map<std::string, std::map<long, double>> marginals;
  const bool has_k = leaves.front().outcomes.k >= 0;
  double total = 0;
  for (const BranchLeaf& leaf : leaves) {
    const OutcomeTuple& t = leaf.outcomes;
    const double p = leaf.probability;
    total += p;
    if (has_k) accumulate(marginals, std::string(to_string(MessageTag::k)), t.k, p);
    accumulate(marginals, std::string(to_string(MessageTag::k1)), t.k1, p);
    accumulate(marginals, std::string(to_string(MessageTag::k2)), t.k2, p);
    accumulate(marginals, std::string(to_string(MessageTag::m1)), t.m1, p);
    accumulate(marginals, std::string(to_string(MessageTag::m2)), t.m2, p);
    accumulate(marginals, joint_tag(MessageTag::k1, MessageTag::k2), t.k1 * 1000L + t.k2, p);
    accumulate(marginals, joint_tag(MessageTag::m1, MessageTag::m2), t.m1 * 1000L + t.m2, p);
  }
  if (total <= 0) throw std::invalid_argument("uniformity_report: zero total probability");

  // Marginal distributions, so each tag's masses are normalized by the
  // total; probability completeness is a separate check.
  UniformityReport report;
  for (const auto& [tag, dist] : marginals) {
    const double uniform = 1.0 / static_cast<double>(dist.size());
    double dev = 0;
    for (const auto& [value, p] : dist) dev = std::max(dev, std::abs(p / total - uniform));
    report.deviation[tag] = dev;
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  return report;
}

VerificationCertificate verify_identity_channel(const ProtocolConfig& config,
                                                std::uint64_t seed,
                                                std::int64_t random_pairs) {
  VerificationCertificate cert;
  cert.d1 = config.d1();
  cert.d2 = config.d2();
  cert.d = config.d();
  cert.config_valid = true;
  cert.seed = seed;

  // Basis pairs ordered so that pair_index equals the joint input index
  // i + j*d1, matching the assembled matrix's column convention.
  const Index dp = config.joint();
  std::vector<std::pair<Reg, Reg>> inputs;
  for (Index j = 0; j < config.d2(); ++j)
    for (Index i = 0; i < config.d1(); ++i)
      inputs.emplace_back(Reg::basis(Dims{config.d1()}, i), Reg::basis(Dims{config.d2()}, j));
  const std::size_t basis_pairs = inputs.size();
  for (std::int64_t r = 0; r < random_pairs; ++r)
    inputs.push_back(haar_input_pair(config, seed, static_cast<std::uint64_t>(r)));
  cert.input_pairs = static_cast<std::int64_t>(inputs.size());

  double min_fidelity = 2.0;
  double max_uniformity = 0;
  double max_probability_defect = 0;

  // Per-branch output columns over the basis pairs; column index is the
  // joint input index i + j*d1.
  std::vector<Matrix<double>> assembled;

  for (std::size_t pair_index = 0; pair_index < inputs.size(); ++pair_index) {
    const auto& [alpha, beta] = inputs[pair_index];

    double probability_sum = 0;
    std::vector<BranchLeaf> leaves;
    std::size_t branch = 0;
    for_each_outcome(config, [&](const OutcomeTuple& t) {
      BranchLeaf leaf;
      leaf.outcomes = t;
      const ProtocolResult result = run_protocol(config, alpha, beta, to_forced(t));
      leaf.probability = result.transcript.leaf_probability();
      leaf.fidelity_alpha = fidelity(result.bob_out, embedded(alpha, config.d()));
      leaf.fidelity_beta = fidelity(result.alice_out, embedded(beta, config.d()));
      leaves.push_back(leaf);
      probability_sum += leaf.probability;

      if (leaf.probability > numeric_traits<double>::support_tol) {
        min_fidelity = std::min({min_fidelity, leaf.fidelity_alpha, leaf.fidelity_beta});
      }

      if (pair_index < basis_pairs) {
        if (assembled.size() <= branch)
          assembled.push_back(Matrix<double>::Zero(dp, dp));
        const Reg out_alpha = truncated(result.bob_out, config.d1());
        const Reg out_beta = truncated(result.alice_out, config.d2());
        const Reg joint_out = tensor(out_alpha, out_beta);
        assembled[branch].col(static_cast<Index>(pair_index)) = joint_out.amplitudes();
      }
      ++branch;
    });

    cert.leaf_count = static_cast<std::int64_t>(leaves.size());
    max_probability_defect = std::max(max_probability_defect, std::abs(probability_sum - 1.0));
    max_uniformity = std::max(max_uniformity, uniformity_report(leaves).max_deviation);
  }

  // Identity-channel residual: each branch map must equal the identity on
  // the joint input space up to one global phase per branch.
  double identity_residual = 0;
  for (Matrix<double>& m : assembled) {
    Index r = 0, c = 0;
    m.cwiseAbs().maxCoeff(&r, &c);
    const Complex<double> top = m(r, c);
    const Complex<double> phase =
        std::abs(top) > 0 ? top / std::abs(top) : Complex<double>(1, 0);
    const Matrix<double> normalized = m / phase;
    identity_residual = std::max(
        identity_residual,
        (normalized - Matrix<double>::Identity(dp, dp)).cwiseAbs().maxCoeff());
  }

  cert.min_fidelity = min_fidelity;
  cert.max_uniformity_deviation = max_uniformity;
  cert.max_probability_defect = max_probability_defect;
  cert.identity_residual = identity_residual;

  cert.fidelity_ok = min_fidelity >= 1.0 - kClaimTol;
  cert.uniformity_ok = max_uniformity <= kClaimTol;
  cert.probability_ok = max_probability_defect <= kClaimTol;
  cert.identity_ok = identity_residual <= kIdentityTol;
  cert.pass = cert.fidelity_ok && cert.uniformity_ok && cert.probability_ok && cert.identity_ok;
  return cert;
}

VerificationCertificate verify_identity_channel(Index d1, Index d2, Index d, std::uint64_t seed,
                                                std::int64_t random_pairs) {
  try {
    const ProtocolConfig config(d1, d2, d);
    return verify_identity_channel(config, seed, random_pairs);
  } catch (const std::invalid_argument& e) {
    VerificationCertificate cert;
    cert.d1 = d1;
    cert.d2 = d2;
    cert.d = d;
    cert.config_valid = false;
    cert.config_error = e.what();
    cert.seed = seed;
    cert.pass = false;
    return cert;
  }
}

const std::vector<std::array<Index, 3>>& acceptance_sweep() {
  static const std::vector<std::array<Index, 3>> sweep = {
      {1, 1, 1}, {1, 2, 2}, {2, 1, 2}, {2, 2, 4}, {2, 3, 6}, {3, 2, 6},
      {2, 2, 5}, {2, 3, 7}, {3, 3, 9}, {2, 2, 6}, {4, 2, 8},
  };
  return sweep;
}

}  // namespace qtel
