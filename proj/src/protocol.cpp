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
#include "qtel/protocol.hpp"

#include <array>

#include <Eigen/SVD>

namespace qtel {

std::string_view to_string(MessageTag tag) {
  switch (tag) {
    case MessageTag::k: return "k";
    case MessageTag::k1: return "k1";
    case MessageTag::k2: return "k2";
    case MessageTag::m1: return "m1";
    case MessageTag::m2: return "m2";
  }
  return "?";
}

std::string_view to_string(Party party) {
  return party == Party::alice ? "alice" : "bob";
}

namespace {

/// Either a sampling generator or an injected outcome set.
struct OutcomeSource {
  Rng* rng = nullptr;
  const ForcedOutcomes* forced = nullptr;
};

int forced_value(const ForcedOutcomes& f, MessageTag tag) {
  switch (tag) {
    case MessageTag::k: return f.k;
    case MessageTag::k1: return f.k1;
    case MessageTag::k2: return f.k2;
    case MessageTag::m1: return f.m1;
    case MessageTag::m2: return f.m2;
  }
  return 0;
}

MeasurementOutcome<double> perform(const Reg& state, const Family& family, MessageTag tag,
                                   const OutcomeSource& src, std::string_view stage_name) {
  if (src.forced != nullptr) {
    const int want = forced_value(*src.forced, tag);
    const auto idx = family.index_of_label(want);
    if (!idx)
      throw std::invalid_argument(std::string(stage_name) + ": forced outcome " +
                                  std::to_string(want) + " is not a valid label");
    MeasurementOutcome<double> out = project_branch(state, family, *idx);
    if (!out.post_state)
      throw zero_probability_error(std::string(stage_name) + ": forced branch " +
                                   std::to_string(want) + " has negligible probability");
    return out;
  }
  MeasurementOutcome<double> out = measure(state, family, *src.rng);
  if (out.label < 0)
    throw internal_error(std::string(stage_name),
                         "residual projector fired; state has weight outside the d' block");
  return out;
}

/// Identity on d levels with `block` replacing the top-left corner.
Matrix<double> embed_top_block(Index d, const Matrix<double>& block) {
  Matrix<double> u = Matrix<double>::Identity(d, d);
  u.topLeftCorner(block.rows(), block.cols()) = block;
  return u;
}

/// Ancilla separation after the tailoring measurement with outcome k:
/// |t>_0 |c>_c1 -> |t - g(c) mod dp>_0 |c>_c1 with g(c) = (c-k) mod d where
/// that value addresses an ancilla level, identity otherwise. Agrees with
/// |n>|n+k> -> |0>|n+k> on the measured support and is a permutation.
Matrix<double> separation_matrix(Index dp, Index d, Index k) {
  const Index n = dp * d;
  std::vector<Index> map(static_cast<std::size_t>(n));
  for (Index c = 0; c < d; ++c) {
    const Index g = mod_floor(c - k, d);
    const Index shift = g < dp ? g : 0;
    for (Index t = 0; t < dp; ++t)
      map[static_cast<std::size_t>(t + c * dp)] = mod_floor(t - shift, dp) + c * dp;
  }
  return permutation_unitary<double>(n, map);
}

struct TailoringRun {
  Reg state;
  int k;
  std::vector<StageRecord> records;
  ClassicalMessage message;
};

/// The three tailoring steps on any register holding (ancilla, c1, c2) at
/// the given subsystem indices. Leaves the ancilla in |0> (still attached).
TailoringRun tailoring_stage(const Reg& start, Index anc, Index c1, Index c2,
                             const ProtocolConfig& config, const OutcomeSource& src) {
  const Index dp = config.joint();
  const Index d = config.d();

  const Family rfam = tailoring_projectors(dp, d).retargeted({anc, c1});
  const MeasurementOutcome<double> got =
      perform(start, rfam, MessageTag::k, src, stage::tailoring_measurement);
  const int k = got.label;
  Reg state = *got.post_state;

  std::vector<StageRecord> records;
  records.push_back({std::string(stage::tailoring_measurement), {k}, {got.probability}, state});

  const Unitary sep({anc, c1}, separation_matrix(dp, d, k));
  state = apply_local(state, sep);
  records.push_back({std::string(stage::tailoring_separation), {}, {}, state});

  // Alice announces k; both parties then shift their channel qudits down.
  const ClassicalMessage message{Party::alice, Party::bob, MessageTag::k, k};
  const Unitary sub({c1}, pauli_x<double>(d, -k));
  state = apply_local(state, sub);
  state = apply_local(state, sub.retargeted({c2}));
  records.push_back({std::string(stage::tailoring_subtraction), {}, {}, state});

  return TailoringRun{std::move(state), k, std::move(records), message};
}

TailoringResult tailor_channel_impl(const Reg& channel, const ProtocolConfig& config,
                                    const OutcomeSource& src) {
  const Index d = config.d();
  if (channel.dims() != Dims{d, d})
    throw std::invalid_argument("tailor_channel: channel must be a [d, d] register");
  if (fidelity(channel, prepare_channel(d)) < 1.0 - numeric_traits<double>::norm_tol)
    throw std::invalid_argument("tailor_channel: channel is not the maximally entangled pair");

  if (!config.needs_tailoring()) {
    TailoringResult result{channel, std::nullopt, {}};
    result.records.push_back({std::string(stage::tailoring_skipped), {}, {}, channel});
    return result;
  }

  const Reg start = tensor(prepare_ancilla(config.joint()), channel);  // [d', d, d]
  TailoringRun run = tailoring_stage(start, 0, 1, 2, config, src);
  Reg out = drop_subsystem(run.state, 0, 0);
  return TailoringResult{std::move(out), run.message, std::move(run.records)};
}

ProtocolResult run_protocol_impl(const ProtocolConfig& config, const Reg& alpha, const Reg& beta,
                                 const OutcomeSource& src) {
  if (alpha.dims().count() != 1 || alpha.dims()[0] != config.d1())
    throw std::invalid_argument("run_protocol: alpha must be a single d1-level qudit");
  if (beta.dims().count() != 1 || beta.dims()[0] != config.d2())
    throw std::invalid_argument("run_protocol: beta must be a single d2-level qudit");

  const RegisterLayout layout(config, false);
  ProtocolTranscript transcript;

  // |alpha>_1 |Psi>_{c1,c2} |beta>_2 arranged as [t1, c1, t2, c2].
  Reg state = [&] {
    const Reg joined = tensor(alpha, tensor(prepare_channel(config.d()), beta));
    const std::array<Index, 4> order{0, 1, 3, 2};
    return permute_subsystems(joined, std::span<const Index>(order));
  }();

  // Stage 1: tailoring.
  if (config.needs_tailoring()) {
    const RegisterLayout tlayout(config, true);
    const Reg with_ancilla = tensor(prepare_ancilla(config.joint()), state);
    TailoringRun run = tailoring_stage(with_ancilla, tlayout.ancilla(), tlayout.channel_c1(),
                                       tlayout.channel_c2(), config, src);
    for (auto& r : run.records) transcript.stages.push_back(std::move(r));
    transcript.messages.push_back(run.message);
    try {
      state = drop_subsystem(run.state, tlayout.ancilla(), 0);
    } catch (const numeric_error& e) {
      throw internal_error(std::string(stage::tailoring_separation), e.what());
    }
  } else {
    transcript.stages.push_back({std::string(stage::tailoring_skipped), {}, {}, state});
  }

  // Stage 2: encoding.
  const auto [pfam_alice, pfam_bob] = encoding_projectors(config);
  {
    const MeasurementOutcome<double> got =
        perform(state, pfam_alice, MessageTag::k1, src, stage::encoding_alice);
    state = *got.post_state;
    transcript.stages.push_back(
        {std::string(stage::encoding_alice), {got.label}, {got.probability}, state});
    transcript.messages.push_back({Party::alice, Party::bob, MessageTag::k1, got.label});
  }
  {
    const MeasurementOutcome<double> got =
        perform(state, pfam_bob, MessageTag::k2, src, stage::encoding_bob);
    state = *got.post_state;
    transcript.stages.push_back(
        {std::string(stage::encoding_bob), {got.label}, {got.probability}, state});
    transcript.messages.push_back({Party::bob, Party::alice, MessageTag::k2, got.label});
  }

  // Both relabelings need both announced outcomes; read them back from the
  // transcript so the operators cannot be built before the messages exist.
  const Unitary relab =
      relabel_unitary(config, transcript.message_value(MessageTag::k1),
                      transcript.message_value(MessageTag::k2));
  state = apply_local(state, relab);
  state = apply_local(state, relab.retargeted({layout.channel_c2()}));
  transcript.stages.push_back({std::string(stage::relabeling), {}, {}, state});

  state = apply_local(state, disentangle_teleportee(Party::alice, config));
  state = apply_local(state, disentangle_teleportee(Party::bob, config));
  transcript.stages.push_back({std::string(stage::disentangling), {}, {}, state});

  // Stage 3: decoding.
  state = apply_local(state, decode_fourier(Party::alice, config));
  state = apply_local(state, decode_fourier(Party::bob, config));
  transcript.stages.push_back({std::string(stage::decoding_fourier), {}, {}, state});

  const auto [qfam_alice, qfam_bob] = decoding_projectors(config);
  {
    const MeasurementOutcome<double> got =
        perform(state, qfam_alice, MessageTag::m1, src, stage::decoding_alice);
    state = *got.post_state;
    transcript.stages.push_back(
        {std::string(stage::decoding_alice), {got.label}, {got.probability}, state});
    transcript.messages.push_back({Party::alice, Party::bob, MessageTag::m1, got.label});
  }
  {
    const MeasurementOutcome<double> got =
        perform(state, qfam_bob, MessageTag::m2, src, stage::decoding_bob);
    state = *got.post_state;
    transcript.stages.push_back(
        {std::string(stage::decoding_bob), {got.label}, {got.probability}, state});
    transcript.messages.push_back({Party::bob, Party::alice, MessageTag::m2, got.label});
  }

  const auto [u1, u2] =
      correction_unitaries(config, transcript.message_value(MessageTag::m1),
                           transcript.message_value(MessageTag::m2));
  state = apply_local(state, u1);
  state = apply_local(state, u2);
  transcript.stages.push_back({std::string(stage::correction), {}, {}, state});

  state = apply_local(state, final_rotation(config));
  transcript.stages.push_back({std::string(stage::final_rotation_stage), {}, {}, state});

  // Output extraction: both teleportees must sit in |0>, and the channel
  // pair must be a product across the Alice | Bob cut.
  Reg pair = [&] {
    try {
      const Reg without_t2 = drop_subsystem(state, layout.teleportee2(), 0);
      return drop_subsystem(without_t2, layout.teleportee1(), 0);
    } catch (const numeric_error& e) {
      throw internal_error(std::string(stage::output_extraction), e.what());
    }
  }();

  const Index d = config.d();
  const Eigen::Map<const Matrix<double>> joint(pair.amplitudes().data(), d, d);
  Eigen::JacobiSVD<Matrix<double>> svd(joint, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (d > 1 && svd.singularValues()(1) > numeric_traits<double>::schmidt_tol)
    throw internal_error(std::string(stage::output_extraction),
                         "channel qudits are still entangled after decoding");

  const Reg alice_out(Dims{d}, svd.matrixU().col(0));
  const Reg bob_out(Dims{d}, svd.matrixV().col(0).conjugate());
  const double fidelity_alpha = fidelity(bob_out, embedded(alpha, d));
  const double fidelity_beta = fidelity(alice_out, embedded(beta, d));

  return ProtocolResult{alice_out, bob_out, fidelity_alpha, fidelity_beta,
                        std::move(transcript)};
}

}  // namespace

Reg prepare_channel(Index d) {
  if (d < 1) throw std::invalid_argument("prepare_channel: dimension must be >= 1");
  Vector<double> amps = Vector<double>::Zero(d * d);
  const double a = 1.0 / std::sqrt(static_cast<double>(d));
  for (Index i = 0; i < d; ++i) amps[i + i * d] = Complex<double>(a, 0);
  return Reg(Dims{d, d}, amps);
}

Reg prepare_ancilla(Index dp) {
  if (dp < 1) throw std::invalid_argument("prepare_ancilla: dimension must be >= 1");
  const Reg zero = Reg::basis(Dims{dp}, 0);
  return apply_local(zero, Unitary({0}, fourier_matrix<double>(dp)));
}

Family tailoring_projectors(Index dp, Index d) {
  if (dp < 1 || d < 1)
    throw std::invalid_argument("tailoring_projectors: dimensions must be >= 1");
  if (dp > d) throw std::invalid_argument("tailoring_projectors: requires dp <= d");
  const Index n = dp * d;
  std::vector<int> labels;
  std::vector<Matrix<double>> projectors;
  for (Index k = 0; k < d; ++k) {
    Matrix<double> p = Matrix<double>::Zero(n, n);
    for (Index a = 0; a < dp; ++a) {
      const Index l = a + ((a + k) % d) * dp;  // |a>_0 |a+k mod d>_c1
      p(l, l) = Complex<double>(1, 0);
    }
    labels.push_back(static_cast<int>(k));
    projectors.push_back(std::move(p));
  }
  // The d projectors of rank dp partition all dp*d basis states, so the
  // family is complete as-is.
  return Family({0, 1}, std::move(labels), std::move(projectors));
}

TailoringResult tailor_channel(const Reg& channel, const ProtocolConfig& config, Rng& rng) {
  OutcomeSource src;
  src.rng = &rng;
  return tailor_channel_impl(channel, config, src);
}

TailoringResult tailor_channel(const Reg& channel, const ProtocolConfig& config, int forced_k) {
  if (config.needs_tailoring() && (forced_k < 0 || forced_k >= config.d()))
    throw std::invalid_argument("tailor_channel: forced outcome out of range");
  ForcedOutcomes forced;
  forced.k = forced_k;
  OutcomeSource src;
  src.forced = &forced;
  return tailor_channel_impl(channel, config, src);
}

std::pair<Family, Family> encoding_projectors(const ProtocolConfig& config) {
  const Index d1 = config.d1(), d2 = config.d2(), d = config.d();

  // Alice measures (teleportee1, channel_c1); local index is j + c*d1.
  const Index na = d1 * d;
  std::vector<int> labels_a;
  std::vector<Matrix<double>> projs_a;
  Matrix<double> sum_a = Matrix<double>::Zero(na, na);
  for (Index k1 = 0; k1 < d1; ++k1) {
    Matrix<double> p = Matrix<double>::Zero(na, na);
    for (Index j1 = 0; j1 < d1; ++j1)
      for (Index j2 = 0; j2 < d2; ++j2) {
        const Index c = (j1 + k1) % d1 + j2 * d1;
        const Index l = j1 + c * d1;
        p(l, l) = Complex<double>(1, 0);
      }
    sum_a += p;
    labels_a.push_back(static_cast<int>(k1));
    projs_a.push_back(std::move(p));
  }
  if (config.needs_tailoring()) {
    labels_a.push_back(-1);
    projs_a.push_back(Matrix<double>::Identity(na, na) - sum_a);
  }

  // Bob measures (teleportee2, channel_c2); local index is j + c*d2.
  const Index nb = d2 * d;
  std::vector<int> labels_b;
  std::vector<Matrix<double>> projs_b;
  Matrix<double> sum_b = Matrix<double>::Zero(nb, nb);
  for (Index k2 = 0; k2 < d2; ++k2) {
    Matrix<double> p = Matrix<double>::Zero(nb, nb);
    for (Index j1 = 0; j1 < d1; ++j1)
      for (Index j2 = 0; j2 < d2; ++j2) {
        const Index c = j1 + ((j2 + k2) % d2) * d1;
        const Index l = j2 + c * d2;
        p(l, l) = Complex<double>(1, 0);
      }
    sum_b += p;
    labels_b.push_back(static_cast<int>(k2));
    projs_b.push_back(std::move(p));
  }
  if (config.needs_tailoring()) {
    labels_b.push_back(-1);
    projs_b.push_back(Matrix<double>::Identity(nb, nb) - sum_b);
  }

  return {Family({0, 1}, std::move(labels_a), std::move(projs_a)),
          Family({2, 3}, std::move(labels_b), std::move(projs_b))};
}

Unitary relabel_unitary(const ProtocolConfig& config, int k1, int k2) {
  const Index d1 = config.d1(), d2 = config.d2(), d = config.d();
  if (k1 < 0 || k1 >= d1 || k2 < 0 || k2 >= d2)
    throw std::invalid_argument("relabel_unitary: outcome out of range");
  std::vector<Index> map(static_cast<std::size_t>(d));
  for (Index s = 0; s < d; ++s) {
    if (s < config.joint()) {
      const auto [a, b] = split_index(s, d1, d2);
      map[static_cast<std::size_t>(s)] =
          merge_index(mod_floor(a - k1, d1), mod_floor(b - k2, d2), d1, d2);
    } else {
      map[static_cast<std::size_t>(s)] = s;
    }
  }
  return Unitary({1}, permutation_unitary<double>(d, map));
}

Unitary disentangle_teleportee(Party party, const ProtocolConfig& config) {
  const Index d1 = config.d1(), d2 = config.d2(), d = config.d();
  if (party == Party::alice) {
    // |t>_1 |c>_c1 -> |t - (c mod d1) mod d1>_1 |c>_c1
    const Index n = d1 * d;
    std::vector<Index> map(static_cast<std::size_t>(n));
    for (Index c = 0; c < d; ++c)
      for (Index t = 0; t < d1; ++t)
        map[static_cast<std::size_t>(t + c * d1)] = mod_floor(t - c % d1, d1) + c * d1;
    return Unitary({0, 1}, permutation_unitary<double>(n, map));
  }
  // |t>_2 |c>_c2 -> |t - f(c) mod d2>_2 |c>_c2, f(c) = c div d1 on the d'
  // block, identity above it.
  const Index n = d2 * d;
  std::vector<Index> map(static_cast<std::size_t>(n));
  for (Index c = 0; c < d; ++c) {
    const Index f = c < config.joint() ? c / d1 : 0;
    for (Index t = 0; t < d2; ++t)
      map[static_cast<std::size_t>(t + c * d2)] = mod_floor(t - f, d2) + c * d2;
  }
  return Unitary({2, 3}, permutation_unitary<double>(n, map));
}

Unitary decode_fourier(Party party, const ProtocolConfig& config) {
  const Index d1 = config.d1(), d2 = config.d2(), d = config.d();
  if (party == Party::alice) {
    const Matrix<double> block = factored_unitary<double>(
        d1, d2, fourier_matrix<double>(d1), Matrix<double>::Identity(d2, d2));
    return Unitary({1}, embed_top_block(d, block));
  }
  const Matrix<double> block = factored_unitary<double>(
      d1, d2, Matrix<double>::Identity(d1, d1), fourier_matrix<double>(d2));
  return Unitary({3}, embed_top_block(d, block));
}

std::pair<Family, Family> decoding_projectors(const ProtocolConfig& config) {
  const Index d1 = config.d1(), d2 = config.d2(), d = config.d();

  std::vector<int> labels_a;
  std::vector<Matrix<double>> projs_a;
  for (Index m1 = 0; m1 < d1; ++m1) {
    Matrix<double> p = Matrix<double>::Zero(d, d);
    for (Index j2 = 0; j2 < d2; ++j2) {
      const Index c = m1 + j2 * d1;
      p(c, c) = Complex<double>(1, 0);
    }
    labels_a.push_back(static_cast<int>(m1));
    projs_a.push_back(std::move(p));
  }

  std::vector<int> labels_b;
  std::vector<Matrix<double>> projs_b;
  for (Index m2 = 0; m2 < d2; ++m2) {
    Matrix<double> p = Matrix<double>::Zero(d, d);
    for (Index j1 = 0; j1 < d1; ++j1) {
      const Index c = j1 + m2 * d1;
      p(c, c) = Complex<double>(1, 0);
    }
    labels_b.push_back(static_cast<int>(m2));
    projs_b.push_back(std::move(p));
  }

  if (config.needs_tailoring()) {
    Matrix<double> tail = Matrix<double>::Zero(d, d);
    for (Index c = config.joint(); c < d; ++c) tail(c, c) = Complex<double>(1, 0);
    labels_a.push_back(-1);
    projs_a.push_back(tail);
    labels_b.push_back(-1);
    projs_b.push_back(std::move(tail));
  }

  return {Family({1}, std::move(labels_a), std::move(projs_a)),
          Family({3}, std::move(labels_b), std::move(projs_b))};
}

std::pair<Unitary, Unitary> correction_unitaries(const ProtocolConfig& config, int m1, int m2) {
  const Index d1 = config.d1(), d2 = config.d2(), d = config.d();
  if (m1 < 0 || m1 >= d1 || m2 < 0 || m2 >= d2)
    throw std::invalid_argument("correction_unitaries: outcome out of range");
  const Matrix<double> u1 =
      factored_unitary<double>(d1, d2, pauli_x<double>(d1, -m1), pauli_z<double>(d2, -m2));
  const Matrix<double> u2 =
      factored_unitary<double>(d1, d2, pauli_z<double>(d1, -m1), pauli_x<double>(d2, -m2));
  return {Unitary({1}, embed_top_block(d, u1)), Unitary({3}, embed_top_block(d, u2))};
}

Unitary final_rotation(const ProtocolConfig& config) {
  const Index d1 = config.d1(), d2 = config.d2(), d = config.d();
  // |j2*d1> -> |j2>, completed as the factor swap j1 + j2*d1 -> j2 + j1*d2.
  std::vector<Index> map(static_cast<std::size_t>(d));
  for (Index s = 0; s < d; ++s) {
    if (s < config.joint()) {
      const auto [a, b] = split_index(s, d1, d2);
      map[static_cast<std::size_t>(s)] = merge_index(b, a, d2, d1);
    } else {
      map[static_cast<std::size_t>(s)] = s;
    }
  }
  return Unitary({1}, permutation_unitary<double>(d, map));
}

ProtocolResult run_protocol(const ProtocolConfig& config, const Reg& alpha, const Reg& beta,
                            Rng& rng) {
  OutcomeSource src;
  src.rng = &rng;
  return run_protocol_impl(config, alpha, beta, src);
}

ProtocolResult run_protocol(const ProtocolConfig& config, const Reg& alpha, const Reg& beta,
                            const ForcedOutcomes& forced) {
  OutcomeSource src;
  src.forced = &forced;
  return run_protocol_impl(config, alpha, beta, src);
}

}  // namespace qtel
