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

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qtel/measurement.hpp"
#include "qtel/schmidt.hpp"

namespace qtel {

// The protocol layer works at double precision.
using Reg = QuditRegister<double>;
using Unitary = LocalUnitary<double>;
using Family = ProjectorFamily<double>;

/// Dimensions of a two-way teleportation instance: Alice teleports a
/// d1-level state to Bob, Bob a d2-level state to Alice, through one shared
/// maximally entangled pair of d-level qudits. Requires d1*d2 <= d.
class ProtocolConfig {
 public:
  ProtocolConfig(Index d1, Index d2, Index d) : d1_(d1), d2_(d2), d_(d) {
    if (d1 < 1 || d2 < 1 || d < 1)
      throw std::invalid_argument("ProtocolConfig: dimensions must be >= 1");
    if (d1 * d2 > d)
      throw std::invalid_argument(
          "ProtocolConfig: teleportee dimensions must satisfy d1*d2 <= d");
  }

  Index d1() const noexcept { return d1_; }
  Index d2() const noexcept { return d2_; }
  Index d() const noexcept { return d_; }
  /// d' = d1*d2, the dimension the channel is tailored down to.
  Index joint() const noexcept { return d1_ * d2_; }
  bool needs_tailoring() const noexcept { return joint() < d_; }

  friend bool operator==(const ProtocolConfig& a, const ProtocolConfig& b) {
    return a.d1_ == b.d1_ && a.d2_ == b.d2_ && a.d_ == b.d_;
  }

 private:
  Index d1_, d2_, d_;
};

/// Fixed subsystem ordering of the protocol register:
/// [teleportee1, channel_c1, teleportee2, channel_c2], with an extra leading
/// ancilla of dimension d' while the tailoring stage is active.
class RegisterLayout {
 public:
  explicit RegisterLayout(const ProtocolConfig& config, bool with_ancilla = false)
      : config_(config), ancilla_(with_ancilla) {}

  Dims dims() const {
    std::vector<Index> d;
    if (ancilla_) d.push_back(config_.joint());
    d.insert(d.end(), {config_.d1(), config_.d(), config_.d2(), config_.d()});
    return Dims(std::move(d));
  }

  bool has_ancilla() const noexcept { return ancilla_; }
  Index subsystem_count() const noexcept { return ancilla_ ? 5 : 4; }

  Index ancilla() const {
    if (!ancilla_) throw std::invalid_argument("RegisterLayout: no ancilla in this phase");
    return 0;
  }
  Index teleportee1() const noexcept { return ancilla_ ? 1 : 0; }
  Index channel_c1() const noexcept { return ancilla_ ? 2 : 1; }
  Index teleportee2() const noexcept { return ancilla_ ? 3 : 2; }
  Index channel_c2() const noexcept { return ancilla_ ? 4 : 3; }

 private:
  ProtocolConfig config_;
  bool ancilla_;
};

enum class Party { alice, bob };

enum class MessageTag { k, k1, k2, m1, m2 };

std::string_view to_string(MessageTag tag);
std::string_view to_string(Party party);

/// Stage names as they appear in transcripts.
namespace stage {
inline constexpr std::string_view tailoring_measurement = "tailoring_measurement";
inline constexpr std::string_view tailoring_separation = "tailoring_separation";
inline constexpr std::string_view tailoring_subtraction = "tailoring_subtraction";
inline constexpr std::string_view tailoring_skipped = "tailoring_skipped";
inline constexpr std::string_view encoding_alice = "encoding_measurement_alice";
inline constexpr std::string_view encoding_bob = "encoding_measurement_bob";
inline constexpr std::string_view relabeling = "relabeling";
inline constexpr std::string_view disentangling = "disentangling";
inline constexpr std::string_view decoding_fourier = "decoding_fourier";
inline constexpr std::string_view decoding_alice = "decoding_measurement_alice";
inline constexpr std::string_view decoding_bob = "decoding_measurement_bob";
inline constexpr std::string_view correction = "correction";
inline constexpr std::string_view final_rotation_stage = "final_rotation";
inline constexpr std::string_view output_extraction = "output_extraction";
}  // namespace stage

/// A forced-outcome run asked for a branch whose Born probability is
/// negligible; the post-state does not exist.
class zero_probability_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

/// One classical message exchanged between the parties.
struct ClassicalMessage {
  Party sender;
  Party receiver;
  MessageTag tag;
  int value;
};

/// One recorded protocol step: measurement outcomes (if any) with their Born
/// probabilities, plus the joint state right after the step.
struct StageRecord {
  std::string stage;
  std::vector<int> outcomes;
  std::vector<double> probabilities;
  Reg snapshot;
};

/// Ordered record of stages and classical messages for a single run.
struct ProtocolTranscript {
  std::vector<StageRecord> stages;
  std::vector<ClassicalMessage> messages;

  /// Product of all recorded branch probabilities: the leaf probability.
  double leaf_probability() const {
    double p = 1.0;
    for (const auto& s : stages)
      for (double q : s.probabilities) p *= q;
    return p;
  }

  const StageRecord* find_stage(std::string_view name) const {
    for (const auto& s : stages)
      if (s.stage == name) return &s;
    return nullptr;
  }

  /// Value carried by the (unique) message with this tag.
  int message_value(MessageTag tag) const {
    for (const auto& m : messages)
      if (m.tag == tag) return m.value;
    throw std::invalid_argument("ProtocolTranscript: no message with requested tag");
  }

  bool has_message(MessageTag tag) const {
    for (const auto& m : messages)
      if (m.tag == tag) return true;
    return false;
  }
};

/// Final state of one protocol run. Outputs stay d-dimensional: Bob's qudit
/// carries Alice's input on its lowest d1 levels, Alice's carries Bob's
/// input on its lowest d2 levels.
struct ProtocolResult {
  Reg alice_out;
  Reg bob_out;
  double fidelity_alpha;
  double fidelity_beta;
  ProtocolTranscript transcript;
};

/// Injected measurement results, one per measurement in protocol order.
/// `k` is ignored when the configuration needs no tailoring.
struct ForcedOutcomes {
  int k = 0;
  int k1 = 0;
  int k2 = 0;
  int m1 = 0;
  int m2 = 0;
};

/// Result of the channel-tailoring stage run on a detached channel pair.
struct TailoringResult {
  Reg channel;
  std::optional<ClassicalMessage> message;
  std::vector<StageRecord> records;
};

/// Maximally entangled pair of d-level qudits, (1/sqrt(d)) sum_i |i>|i>.
Reg prepare_channel(Index d);

/// Uniform superposition over dp levels; equals the dp-dimensional Fourier
/// transform applied to |0>.
Reg prepare_ancilla(Index dp);

/// The d-outcome tailoring measurement on the (ancilla, channel_c1) pair:
/// projector k has rank dp and support on the pairs |n>|n+k mod d>. The
/// family is complete on the dp*d-level pair space without padding. Targets
/// default to (0, 1) = (ancilla, channel qudit); retarget as needed.
Family tailoring_projectors(Index dp, Index d);

/// Converts the d-level entangled channel into the d'-level one embedded on
/// the lowest levels, recording the measurement and Alice's k message. A
/// no-op (still recorded) when d' = d.
TailoringResult tailor_channel(const Reg& channel, const ProtocolConfig& config, Rng& rng);
TailoringResult tailor_channel(const Reg& channel, const ProtocolConfig& config, int forced_k);

/// Encoding measurements: Alice's d1-outcome family on (teleportee1,
/// channel_c1) and Bob's d2-outcome family on (teleportee2, channel_c2),
/// each padded with a residual projector when d' < d.
std::pair<Family, Family> encoding_projectors(const ProtocolConfig& config);

/// Outcome-relabeling permutation on one channel qudit: on the d' block it
/// subtracts (k1, k2) digit-wise under j = j1 + j2*d1; identity above.
/// Returned bound to channel_c1; retarget for c2.
Unitary relabel_unitary(const ProtocolConfig& config, int k1, int k2);

/// Controlled modular subtraction that resets the party's teleportee to |0>
/// given the channel digit it was encoded into.
Unitary disentangle_teleportee(Party party, const ProtocolConfig& config);

/// Party-local Fourier transform of the channel qudit's own digit:
/// F(d1) on the j1 factor for Alice, F(d2) on the j2 factor for Bob,
/// identity on levels >= d'.
Unitary decode_fourier(Party party, const ProtocolConfig& config);

/// Decoding measurements on the channel qudits alone: d1 outcomes of rank d2
/// for Alice, d2 outcomes of rank d1 for Bob, residual-padded when d' < d.
std::pair<Family, Family> decoding_projectors(const ProtocolConfig& config);

/// Phase-and-shift corrections keyed by the exchanged decoding outcomes:
/// U1 = X(d1)^-m1 (x) Z(d2)^-m2 on c1, U2 = Z(d1)^-m1 (x) X(d2)^-m2 on c2.
std::pair<Unitary, Unitary> correction_unitaries(const ProtocolConfig& config, int m1, int m2);

/// Alice's final basis rotation |j2*d1> -> |j2>, completed as the
/// mixed-radix factor swap on the d' block.
Unitary final_rotation(const ProtocolConfig& config);

/// Executes tailoring, encoding and decoding end to end. Measurement
/// outcomes are sampled (Rng overload) or injected (ForcedOutcomes
/// overload). Fidelities compare the outputs against the inputs embedded on
/// the lowest levels of a d-level qudit.
ProtocolResult run_protocol(const ProtocolConfig& config, const Reg& alpha, const Reg& beta,
                            Rng& rng);
ProtocolResult run_protocol(const ProtocolConfig& config, const Reg& alpha, const Reg& beta,
                            const ForcedOutcomes& forced);

}  // namespace qtel
