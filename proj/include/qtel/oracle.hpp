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

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qtel/protocol.hpp"

namespace qtel {

/// Measurement outcomes of one exhaustively enumerated branch. k is -1 when
/// the configuration needs no tailoring.
struct OutcomeTuple {
  int k = -1;
  int k1 = 0;
  int k2 = 0;
  int m1 = 0;
  int m2 = 0;
};

/// One leaf of the branch tree: its outcomes, exact probability, and the
/// two teleportation fidelities recomputed from the returned output states.
struct BranchLeaf {
  OutcomeTuple outcomes;
  double probability = 0;
  double fidelity_alpha = 0;
  double fidelity_beta = 0;
  bool flagged = false;  // negligible-probability branch; fidelities are -1
};

/// Max absolute deviation from the uniform distribution, per outcome tag
/// and for the joint (k1,k2) / (m1,m2) pairs.
struct UniformityReport {
  std::map<std::string, double> deviation;
  double max_deviation = 0;
};

/// Aggregate result of exhaustive verification for one configuration.
struct VerificationCertificate {
  Index d1 = 0, d2 = 0, d = 0;
  bool config_valid = false;
  std::string config_error;

  std::int64_t leaf_count = 0;   // branches per input pair
  std::int64_t input_pairs = 0;  // basis pairs + seeded random pairs
  std::uint64_t seed = 0;

  double min_fidelity = -1;
  double max_uniformity_deviation = -1;
  double max_probability_defect = -1;  // max |sum of leaf probabilities - 1|
  double identity_residual = -1;       // max-entry distance from the identity map

  bool fidelity_ok = false;
  bool uniformity_ok = false;
  bool probability_ok = false;
  bool identity_ok = false;
  bool pass = false;
};

/// Seeded Haar-random input pair (alpha, beta) number `index` for a config.
/// CLI reports and certificates share this derivation.
std::pair<Reg, Reg> haar_input_pair(const ProtocolConfig& config, std::uint64_t seed,
                                    std::uint64_t index);

/// Runs every measurement branch of the protocol via forced outcomes:
/// d*d1*d2*d1*d2 leaves when tailoring is active, d1^2*d2^2 otherwise, in
/// lexicographic (k, k1, k2, m1, m2) order. Fidelities are recomputed here
/// from the returned output states; protocol-internal errors propagate with
/// the offending outcome tuple attached.
std::vector<BranchLeaf> enumerate_branches(const ProtocolConfig& config, const Reg& alpha,
                                           const Reg& beta);

/// Marginal (and joint-pair) distributions of the enumerated outcomes
/// against the uniform distribution.
UniformityReport uniformity_report(const std::vector<BranchLeaf>& leaves);

/// Certifies the identity-channel claim for one configuration: enumerates
/// every branch for all basis input pairs plus `random_pairs` seeded Haar
/// pairs, checks fidelities, uniformity, probability completeness, and the
/// branch-wise assembled input->output map against the identity.
VerificationCertificate verify_identity_channel(const ProtocolConfig& config,
                                                std::uint64_t seed = 0,
                                                std::int64_t random_pairs = 8);

/// Same, but records an invalid configuration (e.g. d1*d2 > d) in the
/// certificate instead of throwing.
VerificationCertificate verify_identity_channel(Index d1, Index d2, Index d,
                                                std::uint64_t seed = 0,
                                                std::int64_t random_pairs = 8);

/// The built-in verification sweep of (d1, d2, d) configurations.
const std::vector<std::array<Index, 3>>& acceptance_sweep();

}  // namespace qtel
