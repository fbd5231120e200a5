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

#include <algorithm>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "qtel/register.hpp"

namespace qtel {

namespace detail {

/// Address arithmetic for acting on a subset of subsystems.
///
/// The local (matrix) index over the targets is mixed-radix with the FIRST
/// listed target least significant: for targets (t0, t1) of dims (n0, n1)
/// the local index is l = i_{t0} + i_{t1} * n0. `target_offsets[l]` is the
/// global offset contributed by local index l; `base_offsets` enumerates all
/// assignments of the remaining subsystems.
struct TargetMap {
  Index block = 1;                    // product of target dims
  std::vector<Index> target_offsets;  // size block
  std::vector<Index> base_offsets;    // size total/block
};

inline TargetMap make_target_map(const Dims& dims, std::span<const Index> targets) {
  TargetMap map;
  std::vector<bool> is_target(static_cast<std::size_t>(dims.count()), false);
  for (Index t : targets) {
    if (t < 0 || t >= dims.count())
      throw std::invalid_argument("target subsystem index out of range");
    if (is_target[static_cast<std::size_t>(t)])
      throw std::invalid_argument("duplicate target subsystem");
    is_target[static_cast<std::size_t>(t)] = true;
    map.block *= dims[t];
  }

  map.target_offsets.assign(static_cast<std::size_t>(map.block), 0);
  Index radix = 1;
  for (Index t : targets) {
    const Index d = dims[t];
    const Index stride = dims.stride(t);
    for (Index l = 0; l < map.block; ++l)
      map.target_offsets[static_cast<std::size_t>(l)] += ((l / radix) % d) * stride;
    radix *= d;
  }

  map.base_offsets.assign(static_cast<std::size_t>(dims.total() / map.block), 0);
  Index written = 1;
  map.base_offsets[0] = 0;
  for (Index s = 0; s < dims.count(); ++s) {
    if (is_target[static_cast<std::size_t>(s)]) continue;
    const Index d = dims[s];
    const Index stride = dims.stride(s);
    for (Index rep = 1; rep < d; ++rep)
      for (Index i = 0; i < written; ++i)
        map.base_offsets[static_cast<std::size_t>(rep * written + i)] =
            map.base_offsets[static_cast<std::size_t>(i)] + rep * stride;
    written *= d;
  }
  return map;
}

/// Collects the state into a (block x bases) matrix whose columns are the
/// local vectors over the targets, one per assignment of the rest.
template <typename Scalar>
Matrix<Scalar> gather(const Vector<Scalar>& amps, const TargetMap& map) {
  Matrix<Scalar> block(map.block, static_cast<Index>(map.base_offsets.size()));
  for (std::size_t b = 0; b < map.base_offsets.size(); ++b)
    for (std::size_t l = 0; l < map.target_offsets.size(); ++l)
      block(static_cast<Index>(l), static_cast<Index>(b)) =
          amps[map.base_offsets[b] + map.target_offsets[l]];
  return block;
}

template <typename Scalar>
Vector<Scalar> scatter(const Matrix<Scalar>& block, const TargetMap& map, Index total) {
  Vector<Scalar> amps(total);
  for (std::size_t b = 0; b < map.base_offsets.size(); ++b)
    for (std::size_t l = 0; l < map.target_offsets.size(); ++l)
      amps[map.base_offsets[b] + map.target_offsets[l]] =
          block(static_cast<Index>(l), static_cast<Index>(b));
  return amps;
}

}  // namespace detail

/// Max-entry deviation of U†U from the identity.
template <typename Derived>
auto unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
  const auto gram = (u.adjoint() * u).eval();
  return (gram - decltype(gram)::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if (u.rows() != u.cols()) return false;
  return unitarity_defect(u) <= numeric_traits<Real>::algebra_tol * static_cast<Real>(u.cols());
}

/// A square matrix bound to an ordered subset of subsystems. Construction
/// checks shape and target distinctness; the unitarity bound itself is
/// enforced by check() (every builder below produces exact unitaries, and
/// the test suite checks them wholesale).
template <typename Scalar = double>
class LocalUnitary {
 public:
  LocalUnitary(std::vector<Index> targets, Matrix<Scalar> matrix)
      : targets_(std::move(targets)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1)
      throw std::invalid_argument("LocalUnitary: matrix must be square and nonempty");
    std::vector<Index> sorted = targets_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("LocalUnitary: duplicate target subsystem");
  }

  const std::vector<Index>& targets() const noexcept { return targets_; }
  const Matrix<Scalar>& matrix() const noexcept { return matrix_; }
  Index dim() const noexcept { return matrix_.rows(); }

  /// Same matrix bound to a different subsystem subset.
  LocalUnitary retargeted(std::vector<Index> targets) const {
    return LocalUnitary(std::move(targets), matrix_);
  }

  void check() const {
    const Scalar bound = numeric_traits<Scalar>::algebra_tol * static_cast<Scalar>(dim());
    if (unitarity_defect(matrix_) > bound)
      throw std::invalid_argument("LocalUnitary: matrix is not unitary");
  }

 private:
  std::vector<Index> targets_;
  Matrix<Scalar> matrix_;
};

/// Discrete Fourier transform: F[m][j] = w^(m*j)/sqrt(n), w = exp(i*2*pi/n).
template <typename Scalar = double>
Matrix<Scalar> fourier_matrix(Index n) {
  if (n < 1) throw std::invalid_argument("fourier_matrix: dimension must be >= 1");
  Matrix<Scalar> f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index m = 0; m < n; ++m)
    for (Index j = 0; j < n; ++j) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((m * j) % n) /
                           static_cast<double>(n);
      f(m, j) = Complex<Scalar>(static_cast<Scalar>(scale * std::cos(angle)),
                                static_cast<Scalar>(scale * std::sin(angle)));
    }
  return f;
}

/// Cyclic shift |j> -> |j + shift mod n>. Shift may be negative.
template <typename Scalar = double>
Matrix<Scalar> pauli_x(Index n, Index shift) {
  if (n < 1) throw std::invalid_argument("pauli_x: dimension must be >= 1");
  const Index s = mod_floor(shift, n);
  Matrix<Scalar> x = Matrix<Scalar>::Zero(n, n);
  for (Index j = 0; j < n; ++j) x((j + s) % n, j) = Complex<Scalar>(1, 0);
  return x;
}

/// Clock phase |j> -> w^(power*j) |j>. Power may be negative.
template <typename Scalar = double>
Matrix<Scalar> pauli_z(Index n, Index power) {
  if (n < 1) throw std::invalid_argument("pauli_z: dimension must be >= 1");
  const Index p = mod_floor(power, n);
  Matrix<Scalar> z = Matrix<Scalar>::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>((p * j) % n) /
                         static_cast<double>(n);
    z(j, j) = Complex<Scalar>(static_cast<Scalar>(std::cos(angle)),
                              static_cast<Scalar>(std::sin(angle)));
  }
  return z;
}

/// Lifts a pair of unitaries onto one d1*d2-level qudit under the
/// factorization j = j1 + j2*d1: `a` acts on the j1 digit, `b` on j2.
template <typename Scalar = double>
Matrix<Scalar> factored_unitary(Index d1, Index d2, const Matrix<Scalar>& a,
                                const Matrix<Scalar>& b) {
  if (a.rows() != d1 || a.cols() != d1 || b.rows() != d2 || b.cols() != d2)
    throw std::invalid_argument("factored_unitary: factor shape mismatch");
  if (!is_unitary(a) || !is_unitary(b))
    throw std::invalid_argument("factored_unitary: factors must be unitary");
  Matrix<Scalar> u(d1 * d2, d1 * d2);
  for (Index m2 = 0; m2 < d2; ++m2)
    for (Index m1 = 0; m1 < d1; ++m1)
      for (Index j2 = 0; j2 < d2; ++j2)
        for (Index j1 = 0; j1 < d1; ++j1)
          u(m1 + m2 * d1, j1 + j2 * d1) = a(m1, j1) * b(m2, j2);
  return u;
}

/// Basis permutation with optional per-source phases: U|s> = phase[s]|map[s]>.
template <typename Scalar = double>
Matrix<Scalar> permutation_unitary(
    Index n, std::span<const Index> map,
    std::optional<std::span<const Complex<Scalar>>> phases = std::nullopt) {
  if (n < 1) throw std::invalid_argument("permutation_unitary: dimension must be >= 1");
  if (static_cast<Index>(map.size()) != n)
    throw std::invalid_argument("permutation_unitary: map size mismatch");
  std::vector<bool> hit(static_cast<std::size_t>(n), false);
  for (Index s = 0; s < n; ++s) {
    const Index t = map[static_cast<std::size_t>(s)];
    if (t < 0 || t >= n || hit[static_cast<std::size_t>(t)])
      throw std::invalid_argument("permutation_unitary: map is not a bijection");
    hit[static_cast<std::size_t>(t)] = true;
  }
  if (phases && static_cast<Index>(phases->size()) != n)
    throw std::invalid_argument("permutation_unitary: phase count mismatch");
  Matrix<Scalar> u = Matrix<Scalar>::Zero(n, n);
  for (Index s = 0; s < n; ++s) {
    Complex<Scalar> phase(1, 0);
    if (phases) {
      phase = (*phases)[static_cast<std::size_t>(s)];
      if (std::abs(std::abs(phase) - Scalar(1)) >
          numeric_traits<Scalar>::algebra_tol * static_cast<Scalar>(n))
        throw std::invalid_argument("permutation_unitary: phases must have unit modulus");
    }
    u(map[static_cast<std::size_t>(s)], s) = phase;
  }
  return u;
}

/// Applies `u` on its target subsystems and the identity elsewhere.
template <typename Scalar>
QuditRegister<Scalar> apply_local(const QuditRegister<Scalar>& state,
                                  const LocalUnitary<Scalar>& u) {
  const detail::TargetMap map = detail::make_target_map(state.dims(), u.targets());
  if (map.block != u.dim())
    throw std::invalid_argument("apply_local: operator dimension does not match targets");
  Matrix<Scalar> block = detail::gather(state.amplitudes(), map);
  block = u.matrix() * block;
  return QuditRegister<Scalar>(state.dims(), detail::scatter(block, map, state.dim()));
}

}  // namespace qtel
