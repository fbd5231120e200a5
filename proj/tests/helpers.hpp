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
//
// Test-only reference implementations. Everything here is deliberately
// naive (digit-by-digit loops, no shared address arithmetic with the
// library) so it can serve as an independent check of the fast paths.
#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/QR>

#include "qtel/oracle.hpp"
#include "qtel/protocol.hpp"

namespace qtest {

using qtel::Dims;
using qtel::Index;
using Cx = std::complex<double>;

inline Cx omega_power(Index n, Index exponent) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(exponent) /
                       static_cast<double>(n);
  return std::polar(1.0, angle);
}

/// Born probability <psi|P|psi> by direct double summation over the full
/// index space. Independent of the library's gather/scatter machinery.
inline double naive_expectation(const qtel::Reg& state, const std::vector<Index>& targets,
                                const qtel::Matrix<double>& projector) {
  const Dims& dims = state.dims();
  Cx acc = 0;
  for (Index bra = 0; bra < state.dim(); ++bra) {
    const std::vector<Index> bd = dims.digits_of(bra);
    for (Index ket = 0; ket < state.dim(); ++ket) {
      const std::vector<Index> kd = dims.digits_of(ket);
      bool same_rest = true;
      for (Index s = 0; s < dims.count(); ++s) {
        if (std::find(targets.begin(), targets.end(), s) != targets.end()) continue;
        if (bd[static_cast<std::size_t>(s)] != kd[static_cast<std::size_t>(s)]) {
          same_rest = false;
          break;
        }
      }
      if (!same_rest) continue;
      Index lb = 0, lk = 0, radix = 1;
      for (Index t : targets) {
        lb += bd[static_cast<std::size_t>(t)] * radix;
        lk += kd[static_cast<std::size_t>(t)] * radix;
        radix *= dims[t];
      }
      acc += std::conj(state.amplitudes()[bra]) * projector(lb, lk) * state.amplitudes()[ket];
    }
  }
  return acc.real();
}

/// Applies a local operator by direct summation, same conventions as above.
inline qtel::Vector<double> naive_apply(const qtel::Reg& state, const std::vector<Index>& targets,
                                        const qtel::Matrix<double>& op) {
  const Dims& dims = state.dims();
  qtel::Vector<double> out = qtel::Vector<double>::Zero(state.dim());
  for (Index row = 0; row < state.dim(); ++row) {
    const std::vector<Index> rd = dims.digits_of(row);
    for (Index col = 0; col < state.dim(); ++col) {
      const std::vector<Index> cd = dims.digits_of(col);
      bool same_rest = true;
      for (Index s = 0; s < dims.count(); ++s) {
        if (std::find(targets.begin(), targets.end(), s) != targets.end()) continue;
        if (rd[static_cast<std::size_t>(s)] != cd[static_cast<std::size_t>(s)]) {
          same_rest = false;
          break;
        }
      }
      if (!same_rest) continue;
      Index lr = 0, lc = 0, radix = 1;
      for (Index t : targets) {
        lr += rd[static_cast<std::size_t>(t)] * radix;
        lc += cd[static_cast<std::size_t>(t)] * radix;
        radix *= dims[t];
      }
      out[row] += op(lr, lc) * state.amplitudes()[col];
    }
  }
  return out;
}

/// Haar-ish random unitary via QR of a complex Gaussian matrix.
inline qtel::Matrix<double> random_unitary(Index n, qtel::Rng& rng) {
  qtel::Matrix<double> a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const auto [re, im] = rng.next_gaussian_pair();
      a(i, j) = Cx(re, im);
    }
  Eigen::HouseholderQR<qtel::Matrix<double>> qr(a);
  qtel::Matrix<double> q = qr.householderQ();
  return q;
}

// ---------------------------------------------------------------------------
// Reference protocol states, built digit by digit from their defining
// formulas over the [teleportee1, channel_c1, teleportee2, channel_c2]
// register. These are the conformance targets for the stage snapshots.

struct StageRefs {
  const qtel::ProtocolConfig& config;
  const qtel::Reg& alpha;
  const qtel::Reg& beta;

  Index joint_index(Index t1, Index c1, Index t2, Index c2) const {
    const Index d1 = config.d1(), d2 = config.d2(), d = config.d();
    return t1 + c1 * d1 + t2 * (d1 * d) + c2 * (d1 * d * d2);
  }

  qtel::Reg make(const qtel::Vector<double>& amps) const {
    const Index d1 = config.d1(), d2 = config.d2(), d = config.d();
    qtel::Vector<double> v = amps;
    v.normalize();
    return qtel::Reg(Dims{d1, d, d2, d}, v);
  }

  Cx a(Index j1) const { return alpha.amplitudes()[j1]; }
  Cx b(Index j2) const { return beta.amplitudes()[j2]; }

  /// Post-encoding state: both teleportees correlated with the channel
  /// digits shifted by (k1, k2).
  qtel::Reg post_encoding(Index k1, Index k2) const {
    const Index d1 = config.d1(), d2 = config.d2();
    qtel::Vector<double> v = qtel::Vector<double>::Zero(config.d1() * config.d() *
                                                        config.d2() * config.d());
    for (Index j1 = 0; j1 < d1; ++j1)
      for (Index j2 = 0; j2 < d2; ++j2) {
        const Index c = (j1 + k1) % d1 + ((j2 + k2) % d2) * d1;
        v[joint_index(j1, c, j2, c)] = a(j1) * b(j2);
      }
    return make(v);
  }

  /// After both parties undo the (k1, k2) shifts.
  qtel::Reg post_relabel() const {
    const Index d1 = config.d1(), d2 = config.d2();
    qtel::Vector<double> v = qtel::Vector<double>::Zero(config.d1() * config.d() *
                                                        config.d2() * config.d());
    for (Index j1 = 0; j1 < d1; ++j1)
      for (Index j2 = 0; j2 < d2; ++j2) {
        const Index c = j1 + j2 * d1;
        v[joint_index(j1, c, j2, c)] = a(j1) * b(j2);
      }
    return make(v);
  }

  /// Teleportees reset to |0>, all information in the channel pair.
  qtel::Reg post_disentangle() const {
    const Index d1 = config.d1(), d2 = config.d2();
    qtel::Vector<double> v = qtel::Vector<double>::Zero(config.d1() * config.d() *
                                                        config.d2() * config.d());
    for (Index j1 = 0; j1 < d1; ++j1)
      for (Index j2 = 0; j2 < d2; ++j2) {
        const Index c = j1 + j2 * d1;
        v[joint_index(0, c, 0, c)] = a(j1) * b(j2);
      }
    return make(v);
  }

  /// After the two subspace Fourier transforms.
  qtel::Reg post_fourier() const {
    const Index d1 = config.d1(), d2 = config.d2();
    qtel::Vector<double> v = qtel::Vector<double>::Zero(config.d1() * config.d() *
                                                        config.d2() * config.d());
    for (Index m1 = 0; m1 < d1; ++m1)
      for (Index j1 = 0; j1 < d1; ++j1)
        for (Index m2 = 0; m2 < d2; ++m2)
          for (Index j2 = 0; j2 < d2; ++j2) {
            const Index c1 = m1 + j2 * d1;
            const Index c2 = j1 + m2 * d1;
            v[joint_index(0, c1, 0, c2)] +=
                a(j1) * b(j2) * omega_power(d1, m1 * j1) * omega_power(d2, m2 * j2);
          }
    return make(v);
  }

  /// After both decoding measurements with results (m1, m2).
  qtel::Reg post_decoding(Index m1, Index m2) const {
    const Index d1 = config.d1(), d2 = config.d2();
    qtel::Vector<double> v = qtel::Vector<double>::Zero(config.d1() * config.d() *
                                                        config.d2() * config.d());
    for (Index j1 = 0; j1 < d1; ++j1)
      for (Index j2 = 0; j2 < d2; ++j2) {
        const Index c1 = m1 + j2 * d1;
        const Index c2 = j1 + m2 * d1;
        v[joint_index(0, c1, 0, c2)] +=
            a(j1) * b(j2) * omega_power(d1, m1 * j1) * omega_power(d2, m2 * j2);
      }
    return make(v);
  }

  /// After the corrections: c1 holds Bob's state on the stretched levels
  /// j2*d1, c2 holds Alice's state on its lowest levels.
  qtel::Reg post_correction() const {
    const Index d1 = config.d1(), d2 = config.d2();
    qtel::Vector<double> v = qtel::Vector<double>::Zero(config.d1() * config.d() *
                                                        config.d2() * config.d());
    for (Index j1 = 0; j1 < d1; ++j1)
      for (Index j2 = 0; j2 < d2; ++j2)
        v[joint_index(0, j2 * d1, 0, j1)] = a(j1) * b(j2);
    return make(v);
  }

  /// After the final rotation: both payloads on the lowest levels.
  qtel::Reg final_state() const {
    const Index d1 = config.d1(), d2 = config.d2();
    qtel::Vector<double> v = qtel::Vector<double>::Zero(config.d1() * config.d() *
                                                        config.d2() * config.d());
    for (Index j1 = 0; j1 < d1; ++j1)
      for (Index j2 = 0; j2 < d2; ++j2)
        v[joint_index(0, j2, 0, j1)] = a(j1) * b(j2);
    return make(v);
  }
};

}  // namespace qtest
