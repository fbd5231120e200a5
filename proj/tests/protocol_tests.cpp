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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>

#include "helpers.hpp"
#include "qtel/protocol.hpp"

using namespace qtel;
using qtest::Cx;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Reg plus_state() {
  Vector<double> v(2);
  v << Cx(kInvSqrt2, 0), Cx(kInvSqrt2, 0);
  return Reg(Dims{2}, v);
}

bool near(Cx a, Cx b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

/// The full 4-subsystem input state [t1, c1, t2, c2].
Reg initial_state(const ProtocolConfig& config, const Reg& alpha, const Reg& beta) {
  const Reg joined = tensor(alpha, tensor(prepare_channel(config.d()), beta));
  const std::array<Index, 4> order{0, 1, 3, 2};
  return permute_subsystems(joined, std::span<const Index>(order));
}

}  // namespace

TEST_CASE("ProtocolConfig enforces the dimension gate") {
  CHECK_NOTHROW(ProtocolConfig(2, 2, 4));
  CHECK_NOTHROW(ProtocolConfig(2, 3, 7));
  CHECK_NOTHROW(ProtocolConfig(1, 1, 1));
  CHECK_THROWS_AS(ProtocolConfig(2, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(ProtocolConfig(3, 3, 8), std::invalid_argument);
  CHECK_THROWS_AS(ProtocolConfig(2, 4, 7), std::invalid_argument);
  CHECK_THROWS_AS(ProtocolConfig(0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(ProtocolConfig(1, 1, 0), std::invalid_argument);
  CHECK(ProtocolConfig(2, 3, 7).joint() == 6);
  CHECK(ProtocolConfig(2, 3, 7).needs_tailoring());
  CHECK_FALSE(ProtocolConfig(2, 3, 6).needs_tailoring());
}

TEST_CASE("RegisterLayout orders subsystems with an optional ancilla") {
  const ProtocolConfig config(2, 3, 7);
  const RegisterLayout plain(config, false);
  CHECK(plain.subsystem_count() == 4);
  CHECK(plain.dims() == Dims{2, 7, 3, 7});
  CHECK(plain.teleportee1() == 0);
  CHECK(plain.channel_c1() == 1);
  CHECK(plain.teleportee2() == 2);
  CHECK(plain.channel_c2() == 3);
  CHECK_THROWS_AS(plain.ancilla(), std::invalid_argument);

  const RegisterLayout tailoring(config, true);
  CHECK(tailoring.subsystem_count() == 5);
  CHECK(tailoring.dims() == Dims{6, 2, 7, 3, 7});
  CHECK(tailoring.ancilla() == 0);
  CHECK(tailoring.channel_c1() == 2);
  CHECK(tailoring.channel_c2() == 4);
}

TEST_CASE("prepare_channel builds the maximally entangled pair") {
  const Reg c1 = prepare_channel(1);
  CHECK(near(c1.amplitudes()[0], Cx(1, 0)));

  const Reg c2 = prepare_channel(2);
  CHECK(near(c2.amplitudes()[0], Cx(kInvSqrt2, 0)));
  CHECK(near(c2.amplitudes()[1], Cx(0, 0)));
  CHECK(near(c2.amplitudes()[2], Cx(0, 0)));
  CHECK(near(c2.amplitudes()[3], Cx(kInvSqrt2, 0)));

  const Reg c3 = prepare_channel(3);
  const double third = 1.0 / std::sqrt(3.0);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      CHECK(near(c3.amplitudes()[i + j * 3], i == j ? Cx(third, 0) : Cx(0, 0)));

  CHECK_THROWS_AS(prepare_channel(0), std::invalid_argument);
}

TEST_CASE("prepare_ancilla is the Fourier image of |0>") {
  CHECK(near(prepare_ancilla(1).amplitudes()[0], Cx(1, 0)));
  const Reg a2 = prepare_ancilla(2);
  CHECK(near(a2.amplitudes()[0], Cx(kInvSqrt2, 0)));
  CHECK(near(a2.amplitudes()[1], Cx(kInvSqrt2, 0)));
  const Reg a4 = prepare_ancilla(4);
  for (Index i = 0; i < 4; ++i) CHECK(near(a4.amplitudes()[i], Cx(0.5, 0)));

  const Reg direct =
      apply_local(Reg::basis(Dims{5}, 0), LocalUnitary<double>({0}, fourier_matrix(5)));
  CHECK(fidelity(prepare_ancilla(5), direct) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(prepare_ancilla(0), std::invalid_argument);
}

TEST_CASE("tailoring_projectors pair the ancilla with shifted channel levels") {
  const Family trivial = tailoring_projectors(1, 1);
  CHECK(trivial.size() == 1);
  CHECK(near(trivial.projector(0)(0, 0), Cx(1, 0)));

  // dp=1, d=2: rank-one projectors on |0,0> and |0,1>.
  const Family f12 = tailoring_projectors(1, 2);
  CHECK(f12.size() == 2);
  CHECK(near(f12.projector(0)(0, 0), Cx(1, 0)));
  CHECK(near(f12.projector(1)(1, 1), Cx(1, 0)));
  CHECK_NOTHROW(f12.check());

  // dp=2, d=3: each projector has rank 2; the ranks partition the space,
  // so the family is complete without any padding.
  const Family f23 = tailoring_projectors(2, 3);
  CHECK(f23.size() == 3);
  Index total_rank = 0;
  for (Index k = 0; k < 3; ++k) {
    const double rank = f23.projector(k).trace().real();
    CHECK(rank == doctest::Approx(2.0));
    total_rank += static_cast<Index>(std::lround(rank));
  }
  CHECK(total_rank == 6);
  CHECK_NOTHROW(f23.check());

  CHECK_THROWS_AS(tailoring_projectors(3, 2), std::invalid_argument);
}

TEST_CASE("tailoring measurement outcomes are uniform at 1/d") {
  // d'=2, d=3: |phi>|Psi> over [2, 3, 3], measured by the R family.
  const Reg joint = tensor(prepare_ancilla(2), prepare_channel(3));
  const Family family = tailoring_projectors(2, 3);
  const auto outs = branches(joint, family);
  REQUIRE(outs.size() == 3);
  for (const auto& o : outs) CHECK(o.probability == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // Cross-check one branch with the naive Born-rule oracle.
  const double p0 = qtest::naive_expectation(joint, {0, 1}, family.projector(0));
  CHECK(p0 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // d'=2, d=2: two outcomes, each 1/2.
  const Reg joint22 = tensor(prepare_ancilla(2), prepare_channel(2));
  const auto outs22 = branches(joint22, tailoring_projectors(2, 2));
  REQUIRE(outs22.size() == 2);
  CHECK(outs22[0].probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(outs22[1].probability == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("tailor_channel is a recorded no-op when d' = d") {
  const ProtocolConfig config(2, 1, 2);
  const Reg channel = prepare_channel(2);
  const TailoringResult result = tailor_channel(channel, config, 0);
  CHECK((result.channel.amplitudes() - channel.amplitudes()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_FALSE(result.message.has_value());
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].stage == stage::tailoring_skipped);
  CHECK(result.records[0].outcomes.empty());
}

TEST_CASE("tailor_channel reproduces the tailored channel for every outcome") {
  // d'=2, d=3, forced k=1, checked against states built from the defining
  // sums: post-measurement (1/sqrt 2) sum_n |n>|n+1>|n+1>, then the ancilla
  // separated, then both channel qudits shifted down by k.
  const ProtocolConfig config(2, 1, 3);
  const Reg channel = prepare_channel(3);

  const TailoringResult result = tailor_channel(channel, config, 1);
  REQUIRE(result.records.size() == 3);
  CHECK(result.records[0].probabilities[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  REQUIRE(result.message.has_value());
  CHECK(result.message->tag == MessageTag::k);
  CHECK(result.message->value == 1);
  CHECK(result.message->sender == Party::alice);

  Vector<double> v = Vector<double>::Zero(2 * 3 * 3);
  for (Index n = 0; n < 2; ++n) {
    const Index c = (n + 1) % 3;
    v[n + c * 2 + c * 6] = Cx(kInvSqrt2, 0);  // |n>_0 |n+1>_c1 |n+1>_c2
  }
  const Reg post_measurement(Dims{2, 3, 3}, v);
  CHECK(fidelity(result.records[0].snapshot, post_measurement) ==
        doctest::Approx(1.0).epsilon(1e-12));

  Vector<double> w = Vector<double>::Zero(2 * 3 * 3);
  for (Index n = 0; n < 2; ++n) {
    const Index c = (n + 1) % 3;
    w[c * 2 + c * 6] = Cx(kInvSqrt2, 0);  // |0>_0 |n+1>_c1 |n+1>_c2
  }
  const Reg post_separation(Dims{2, 3, 3}, w);
  CHECK(fidelity(result.records[1].snapshot, post_separation) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // Final channel: the d'=2 entangled pair embedded in the 3-level qudits.
  Vector<double> bell = Vector<double>::Zero(9);
  bell[0] = Cx(kInvSqrt2, 0);
  bell[4] = Cx(kInvSqrt2, 0);
  const Reg tailored(Dims{3, 3}, bell);
  CHECK(fidelity(result.channel, tailored) == doctest::Approx(1.0).epsilon(1e-11));

  // Every outcome k leads to the same tailored channel.
  for (int k = 0; k < 3; ++k) {
    const TailoringResult r = tailor_channel(channel, config, k);
    CHECK(fidelity(r.channel, tailored) == doctest::Approx(1.0).epsilon(1e-11));
  }

  // d'=2, d=4: every k occurs with probability 1/4.
  const ProtocolConfig config24(2, 1, 4);
  const Reg channel4 = prepare_channel(4);
  for (int k = 0; k < 4; ++k) {
    const TailoringResult r = tailor_channel(channel4, config24, k);
    CHECK(r.records[0].probabilities[0] == doctest::Approx(0.25).epsilon(1e-12));
  }

  CHECK_THROWS_AS(tailor_channel(channel, config, 3), std::invalid_argument);
  CHECK_THROWS_AS(tailor_channel(prepare_channel(2), config, 0), std::invalid_argument);
  CHECK_THROWS_AS(tailor_channel(Reg::basis(Dims{3, 3}, 0), config, 0), std::invalid_argument);
}

TEST_CASE("encoding_projectors match their defining supports") {
  // d1=1: a single deterministic outcome.
  const auto [pa1, pb1] = encoding_projectors(ProtocolConfig(1, 2, 2));
  CHECK(pa1.size() == 1);
  CHECK_NOTHROW(pa1.check());
  CHECK_NOTHROW(pb1.check());

  // (2,2,4): P_0 supports exactly the (j1, c) pairs (0,0),(0,2),(1,1),(1,3).
  const auto [pa, pb] = encoding_projectors(ProtocolConfig(2, 2, 4));
  CHECK(pa.size() == 2);
  const Matrix<double>& p0 = pa.projector(0);
  const std::array<std::pair<Index, Index>, 4> support{{{0, 0}, {0, 2}, {1, 1}, {1, 3}}};
  Matrix<double> expected = Matrix<double>::Zero(8, 8);
  for (const auto& [j, c] : support) expected(j + c * 2, j + c * 2) = Cx(1, 0);
  CHECK((p0 - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p0.trace().real() == doctest::Approx(4.0));
  CHECK_NOTHROW(pa.check());
  CHECK_NOTHROW(pb.check());

  // Padded families when d' < d carry one residual projector labeled -1.
  const auto [par, pbr] = encoding_projectors(ProtocolConfig(2, 2, 5));
  CHECK(par.size() == 3);
  CHECK(par.label(2) == -1);
  CHECK_NOTHROW(par.check());
  CHECK_NOTHROW(pbr.check());
}

TEST_CASE("encoding outcome probabilities are 1/d1 for any input") {
  const ProtocolConfig config(2, 2, 4);
  Rng rng(31);
  for (int rep = 0; rep < 4; ++rep) {
    const Reg alpha = random_state(2, rng);
    const Reg state = tensor(alpha, prepare_channel(4));  // [2, 4, 4]
    const auto [pa, pb] = encoding_projectors(config);
    const auto outs = branches(state, pa);
    REQUIRE(outs.size() == 2);
    CHECK(outs[0].probability == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(outs[1].probability == doctest::Approx(0.5).epsilon(1e-10));
    // Independent Born-rule oracle agrees.
    CHECK(qtest::naive_expectation(state, {0, 1}, pa.projector(0)) ==
          doctest::Approx(0.5).epsilon(1e-10));
  }
}

TEST_CASE("relabel_unitary is the outcome-shift permutation") {
  const ProtocolConfig config(2, 2, 4);
  CHECK((relabel_unitary(config, 0, 0).matrix() - Matrix<double>::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  const Matrix<double> u10 = relabel_unitary(config, 1, 0).matrix();
  CHECK(near(u10(1, 0), Cx(1, 0)));
  CHECK(near(u10(0, 1), Cx(1, 0)));
  CHECK(near(u10(3, 2), Cx(1, 0)));
  CHECK(near(u10(2, 3), Cx(1, 0)));

  const Matrix<double> u11 = relabel_unitary(config, 1, 1).matrix();
  CHECK(near(u11(3, 0), Cx(1, 0)));
  CHECK(near(u11(2, 1), Cx(1, 0)));
  CHECK(near(u11(1, 2), Cx(1, 0)));
  CHECK(near(u11(0, 3), Cx(1, 0)));

  CHECK_THROWS_AS(relabel_unitary(config, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(relabel_unitary(config, 0, -1), std::invalid_argument);

  // Identity above the d' block when d' < d.
  const Matrix<double> padded = relabel_unitary(ProtocolConfig(2, 2, 6), 1, 1).matrix();
  CHECK(near(padded(4, 4), Cx(1, 0)));
  CHECK(near(padded(5, 5), Cx(1, 0)));
}

TEST_CASE("disentangle_teleportee resets the teleportee on the support") {
  // Degenerate teleportee dimension: identity.
  const Unitary trivial = disentangle_teleportee(Party::alice, ProtocolConfig(1, 2, 2));
  CHECK((trivial.matrix() - Matrix<double>::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);

  const ProtocolConfig config(2, 2, 4);
  const Unitary ua = disentangle_teleportee(Party::alice, config);
  CHECK(ua.targets() == std::vector<Index>{0, 1});
  // On-support: |1>_1 |1>_c1 -> |0>_1 |1>_c1 (local index t + c*d1).
  CHECK(near(ua.matrix()(0 + 1 * 2, 1 + 1 * 2), Cx(1, 0)));
  // Off-support completion: |0>_1 |1>_c1 -> |1>_1 |1>_c1.
  CHECK(near(ua.matrix()(1 + 1 * 2, 0 + 1 * 2), Cx(1, 0)));
  CHECK_NOTHROW(ua.check());
  CHECK_NOTHROW(disentangle_teleportee(Party::bob, config).check());

  // Bob's control digit is clamped above the d' block: for (2,1,3) the
  // channel level 2 must leave his (one-level) teleportee alone.
  const Unitary ub = disentangle_teleportee(Party::bob, ProtocolConfig(2, 1, 3));
  CHECK((ub.matrix() - Matrix<double>::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("decode_fourier acts on the party's own digit") {
  const Unitary trivial = decode_fourier(Party::alice, ProtocolConfig(1, 2, 2));
  CHECK((trivial.matrix() - Matrix<double>::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);

  const Unitary had = decode_fourier(Party::alice, ProtocolConfig(2, 1, 2));
  CHECK((had.matrix() - fourier_matrix(2)).cwiseAbs().maxCoeff() <= 1e-15);

  // (2,2,4): column j1 + 2*j2 holds (1/sqrt d1) sum_m1 w^(m1 j1) e_{m1+2 j2}.
  const Unitary ua = decode_fourier(Party::alice, ProtocolConfig(2, 2, 4));
  for (Index j1 = 0; j1 < 2; ++j1)
    for (Index j2 = 0; j2 < 2; ++j2) {
      Vector<double> expected = Vector<double>::Zero(4);
      for (Index m1 = 0; m1 < 2; ++m1)
        expected[m1 + 2 * j2] = qtest::omega_power(2, m1 * j1) * kInvSqrt2;
      CHECK((ua.matrix().col(j1 + 2 * j2) - expected).cwiseAbs().maxCoeff() <= 1e-15);
    }
  CHECK_NOTHROW(ua.check());
  CHECK_NOTHROW(decode_fourier(Party::bob, ProtocolConfig(2, 3, 7)).check());
}

TEST_CASE("decoding_projectors select one digit of the channel qudit") {
  const auto [qa, qb] = decoding_projectors(ProtocolConfig(2, 2, 4));
  CHECK(qa.size() == 2);
  Matrix<double> expected = Matrix<double>::Zero(4, 4);
  expected(0, 0) = Cx(1, 0);
  expected(2, 2) = Cx(1, 0);
  CHECK((qa.projector(0) - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK_NOTHROW(qa.check());
  CHECK_NOTHROW(qb.check());

  const auto [qa1, qb1] = decoding_projectors(ProtocolConfig(1, 2, 2));
  CHECK(qa1.size() == 1);
  CHECK((qa1.projector(0) - Matrix<double>::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);

  const auto [qar, qbr] = decoding_projectors(ProtocolConfig(2, 3, 7));
  CHECK(qar.size() == 3);  // 2 outcomes + residual
  CHECK(qbr.size() == 4);  // 3 outcomes + residual
  CHECK(qar.label(2) == -1);
  CHECK_NOTHROW(qar.check());
  CHECK_NOTHROW(qbr.check());
}

TEST_CASE("decoding outcomes on the Fourier-transformed state are uniform") {
  const ProtocolConfig config(2, 2, 4);
  Rng rng(5);
  const Reg alpha = random_state(2, rng);
  const Reg beta = random_state(2, rng);
  const qtest::StageRefs refs{config, alpha, beta};
  const Reg psi5 = refs.post_fourier();

  const auto [qa, qb] = decoding_projectors(config);
  const auto outs = branches(psi5, qa);
  for (const auto& o : outs) CHECK(o.probability == doctest::Approx(0.5).epsilon(1e-10));
  // Joint (m1, m2): measure Bob's family on each of Alice's post-states.
  for (const auto& oa : outs) {
    const auto outs_b = branches(*oa.post_state, qb);
    for (const auto& ob : outs_b)
      CHECK(oa.probability * ob.probability == doctest::Approx(0.25).epsilon(1e-10));
  }
}

TEST_CASE("correction_unitaries undo the Fourier phases and shifts") {
  const ProtocolConfig config(2, 2, 4);
  const auto [id1, id2] = correction_unitaries(config, 0, 0);
  CHECK((id1.matrix() - Matrix<double>::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((id2.matrix() - Matrix<double>::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-15);

  // m1=1, m2=0: U1 is the pure shift {0<->1, 2<->3}.
  const auto [u1s, u2s] = correction_unitaries(config, 1, 0);
  CHECK(near(u1s.matrix()(0, 1), Cx(1, 0)));
  CHECK(near(u1s.matrix()(1, 0), Cx(1, 0)));
  CHECK(near(u1s.matrix()(2, 3), Cx(1, 0)));
  CHECK(near(u1s.matrix()(3, 2), Cx(1, 0)));

  // m1=0, m2=1: U1 is the pure phase diag(1, 1, -1, -1).
  const auto [u1p, u2p] = correction_unitaries(config, 0, 1);
  Matrix<double> diag = Matrix<double>::Zero(4, 4);
  diag(0, 0) = Cx(1, 0);
  diag(1, 1) = Cx(1, 0);
  diag(2, 2) = Cx(-1, 0);
  diag(3, 3) = Cx(-1, 0);
  CHECK((u1p.matrix() - diag).cwiseAbs().maxCoeff() <= 1e-15);

  CHECK_THROWS_AS(correction_unitaries(config, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(correction_unitaries(config, 0, 2), std::invalid_argument);
  CHECK_NOTHROW(u1s.check());
  CHECK_NOTHROW(u2s.check());
}

TEST_CASE("final_rotation compresses the stretched levels") {
  const Unitary t1 = final_rotation(ProtocolConfig(1, 2, 2));
  CHECK((t1.matrix() - Matrix<double>::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  const Unitary t2 = final_rotation(ProtocolConfig(2, 1, 2));
  CHECK((t2.matrix() - Matrix<double>::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);

  // (2,2,4): factor swap 0->0, 1->2, 2->1, 3->3.
  const Matrix<double> v = final_rotation(ProtocolConfig(2, 2, 4)).matrix();
  CHECK(near(v(0, 0), Cx(1, 0)));
  CHECK(near(v(2, 1), Cx(1, 0)));
  CHECK(near(v(1, 2), Cx(1, 0)));
  CHECK(near(v(3, 3), Cx(1, 0)));

  // (2,3,6): |2> -> |1> and |4> -> |2>.
  const Matrix<double> v23 = final_rotation(ProtocolConfig(2, 3, 6)).matrix();
  CHECK(near(v23(1, 2), Cx(1, 0)));
  CHECK(near(v23(2, 4), Cx(1, 0)));
  CHECK_NOTHROW(final_rotation(ProtocolConfig(2, 3, 7)).check());
}

TEST_CASE("run_protocol on the trivial configuration") {
  const ProtocolConfig config(1, 1, 1);
  const Reg one = Reg::basis(Dims{1}, 0);
  const ProtocolResult result = run_protocol(config, one, one, ForcedOutcomes{});
  CHECK(result.fidelity_alpha == doctest::Approx(1.0));
  CHECK(result.fidelity_beta == doctest::Approx(1.0));
  CHECK(result.transcript.leaf_probability() == doctest::Approx(1.0));
}

TEST_CASE("run_protocol reduces to one-way teleportation at d2 = 1") {
  const ProtocolConfig config(2, 1, 2);
  const Reg beta = Reg::basis(Dims{1}, 0);
  for (int k1 = 0; k1 < 2; ++k1)
    for (int m1 = 0; m1 < 2; ++m1) {
      ForcedOutcomes forced;
      forced.k1 = k1;
      forced.m1 = m1;
      const ProtocolResult result = run_protocol(config, plus_state(), beta, forced);
      CHECK(result.fidelity_alpha == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(result.fidelity_beta == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(result.transcript.leaf_probability() == doctest::Approx(0.25).epsilon(1e-10));
    }
}

TEST_CASE("run_protocol succeeds on every branch of (2,2,4)") {
  const ProtocolConfig config(2, 2, 4);
  Rng rng(71);
  const Reg alpha = random_state(2, rng);
  const Reg beta = random_state(2, rng);
  for (int k1 = 0; k1 < 2; ++k1)
    for (int k2 = 0; k2 < 2; ++k2)
      for (int m1 = 0; m1 < 2; ++m1)
        for (int m2 = 0; m2 < 2; ++m2) {
          const ForcedOutcomes forced{0, k1, k2, m1, m2};
          const ProtocolResult result = run_protocol(config, alpha, beta, forced);
          CHECK(result.fidelity_alpha >= 1.0 - 1e-9);
          CHECK(result.fidelity_beta >= 1.0 - 1e-9);
          CHECK(result.transcript.leaf_probability() ==
                doctest::Approx(1.0 / 16.0).epsilon(1e-10));
        }
}

TEST_CASE("stage snapshots match the directly constructed states") {
  const ProtocolConfig config(2, 2, 4);
  Rng rng(13);
  const Reg alpha = random_state(2, rng);
  const Reg beta = random_state(2, rng);
  const qtest::StageRefs refs{config, alpha, beta};

  const ForcedOutcomes forced{0, 1, 0, 1, 1};
  const ProtocolResult result = run_protocol(config, alpha, beta, forced);
  const ProtocolTranscript& t = result.transcript;

  const auto snap = [&](std::string_view name) -> const Reg& {
    const StageRecord* record = t.find_stage(name);
    REQUIRE(record != nullptr);
    return record->snapshot;
  };

  CHECK(fidelity(snap(stage::encoding_bob), refs.post_encoding(1, 0)) >= 1.0 - 1e-10);
  CHECK(fidelity(snap(stage::relabeling), refs.post_relabel()) >= 1.0 - 1e-10);
  CHECK(fidelity(snap(stage::disentangling), refs.post_disentangle()) >= 1.0 - 1e-10);
  CHECK(fidelity(snap(stage::decoding_fourier), refs.post_fourier()) >= 1.0 - 1e-10);
  CHECK(fidelity(snap(stage::decoding_bob), refs.post_decoding(1, 1)) >= 1.0 - 1e-10);
  CHECK(fidelity(snap(stage::correction), refs.post_correction()) >= 1.0 - 1e-10);
  CHECK(fidelity(snap(stage::final_rotation_stage), refs.final_state()) >= 1.0 - 1e-10);

  // After encoding, the teleportees split off as |0>|0> and the channel
  // pair stays entangled; after both decoding measurements the channel pair
  // is a product across the Alice | Bob cut.
  const std::array<Index, 2> teleportees{0, 2};
  CHECK(is_product(snap(stage::disentangling), teleportees).product);
  const std::array<Index, 2> alice_side{0, 1};
  CHECK_FALSE(is_product(snap(stage::disentangling), alice_side).product);
  CHECK(is_product(snap(stage::decoding_bob), alice_side).product);
  CHECK(is_product(snap(stage::final_rotation_stage), alice_side).product);
}

TEST_CASE("transcripts order messages after their stages") {
  const ProtocolConfig config(2, 3, 7);
  Rng rng(3);
  const Reg alpha = random_state(2, rng);
  const Reg beta = random_state(3, rng);
  const ProtocolResult result = run_protocol(config, alpha, beta, rng);
  const ProtocolTranscript& t = result.transcript;

  REQUIRE(t.messages.size() == 5);
  CHECK(t.messages[0].tag == MessageTag::k);
  CHECK(t.messages[1].tag == MessageTag::k1);
  CHECK(t.messages[2].tag == MessageTag::k2);
  CHECK(t.messages[3].tag == MessageTag::m1);
  CHECK(t.messages[4].tag == MessageTag::m2);
  CHECK(t.messages[0].sender == Party::alice);
  CHECK(t.messages[2].sender == Party::bob);

  // Message values sit inside their tag ranges.
  CHECK(t.messages[0].value >= 0);
  CHECK(t.messages[0].value < 7);
  CHECK(t.messages[1].value < 2);
  CHECK(t.messages[2].value < 3);
  CHECK(t.messages[3].value < 2);
  CHECK(t.messages[4].value < 3);

  // Operators keyed by remote outcomes appear strictly after the
  // measurements they depend on.
  const auto stage_index = [&](std::string_view name) {
    for (std::size_t i = 0; i < t.stages.size(); ++i)
      if (t.stages[i].stage == name) return static_cast<long>(i);
    return -1L;
  };
  CHECK(stage_index(stage::relabeling) > stage_index(stage::encoding_bob));
  CHECK(stage_index(stage::encoding_bob) > stage_index(stage::encoding_alice));
  CHECK(stage_index(stage::correction) > stage_index(stage::decoding_bob));
  CHECK(stage_index(stage::tailoring_subtraction) < stage_index(stage::encoding_alice));

  // Tailoring snapshots carry the 5-subsystem register.
  CHECK(t.stages[0].snapshot.dims().count() == 5);
  CHECK(t.find_stage(stage::encoding_alice)->snapshot.dims().count() == 4);

  // The leaf probability multiplies the recorded branch probabilities.
  double product = 1.0;
  for (const auto& s : t.stages)
    for (double p : s.probabilities) product *= p;
  CHECK(t.leaf_probability() == doctest::Approx(product));
  CHECK(t.leaf_probability() == doctest::Approx(1.0 / (7.0 * 6.0 * 6.0)).epsilon(1e-9));
}

TEST_CASE("run_protocol rejects malformed inputs") {
  const ProtocolConfig config(2, 2, 4);
  const Reg wrong = Reg::basis(Dims{3}, 0);
  const Reg ok = Reg::basis(Dims{2}, 0);
  CHECK_THROWS_AS(run_protocol(config, wrong, ok, ForcedOutcomes{}), std::invalid_argument);
  CHECK_THROWS_AS(run_protocol(config, ok, wrong, ForcedOutcomes{}), std::invalid_argument);

  ForcedOutcomes bad;
  bad.k1 = 5;
  CHECK_THROWS_AS(run_protocol(config, ok, ok, bad), std::invalid_argument);
}

TEST_CASE("initial-state assembly keeps the advertised layout") {
  const ProtocolConfig config(2, 3, 6);
  Rng rng(8);
  const Reg alpha = random_state(2, rng);
  const Reg beta = random_state(3, rng);
  const Reg state = initial_state(config, alpha, beta);
  CHECK(state.dims() == RegisterLayout(config).dims());
  // Amplitude spot check: joint index (t1, c1, t2, c2) = (1, 2, 2, 2).
  const Dims dims = state.dims();
  const std::array<Index, 4> digits{1, 2, 2, 2};
  const Cx expected = alpha.amplitudes()[1] * beta.amplitudes()[2] *
                      prepare_channel(6).amplitudes()[2 + 2 * 6];
  CHECK(near(state.amplitudes()[dims.index_of(digits)], expected));
}
