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

#include <cmath>
#include <utility>

#include "qtel/indexing.hpp"
#include "qtel/types.hpp"

namespace qtel {

/// Normalized pure state of a heterogeneous-dimension qudit register.
///
/// Immutable after construction; every operation on registers returns a new
/// value, so registers can be shared freely across threads.
template <typename Scalar = double>
class QuditRegister {
 public:
  template <typename Derived>
  QuditRegister(Dims dims, const Eigen::MatrixBase<Derived>& amplitudes)
      : dims_(std::move(dims)), amps_(amplitudes) {
    if (amps_.size() != dims_.total())
      throw std::invalid_argument("QuditRegister: amplitude count does not match dimensions");
    const Scalar defect = std::abs(amps_.squaredNorm() - Scalar(1));
    if (defect > numeric_traits<Scalar>::norm_tol)
      throw std::invalid_argument("QuditRegister: state is not normalized");
  }

  /// Computational basis state |index> over the given dims.
  static QuditRegister basis(Dims dims, Index index) {
    Vector<Scalar> amps = Vector<Scalar>::Zero(dims.total());
    if (index < 0 || index >= dims.total())
      throw std::invalid_argument("QuditRegister::basis: index out of range");
    amps[index] = Complex<Scalar>(1, 0);
    return QuditRegister(std::move(dims), amps);
  }

  const Dims& dims() const noexcept { return dims_; }
  const Vector<Scalar>& amplitudes() const noexcept { return amps_; }
  Index dim() const noexcept { return amps_.size(); }

 private:
  Dims dims_;
  Vector<Scalar> amps_;
};

/// Kronecker join: dims are concatenated, subsystem 0 of `a` stays least
/// significant, so amp(i, j) = a[i] * b[j] at composite index i + j*a.dim().
template <typename Scalar>
QuditRegister<Scalar> tensor(const QuditRegister<Scalar>& a, const QuditRegister<Scalar>& b) {
  std::vector<Index> dims = a.dims().values();
  dims.insert(dims.end(), b.dims().values().begin(), b.dims().values().end());
  Vector<Scalar> amps(a.dim() * b.dim());
  for (Index j = 0; j < b.dim(); ++j)
    amps.segment(j * a.dim(), a.dim()) = b.amplitudes()[j] * a.amplitudes();
  return QuditRegister<Scalar>(Dims(std::move(dims)), amps);
}

template <typename Scalar>
Complex<Scalar> inner_product(const QuditRegister<Scalar>& a, const QuditRegister<Scalar>& b) {
  if (a.dims() != b.dims())
    throw std::invalid_argument("inner_product: register dimensions differ");
  return a.amplitudes().dot(b.amplitudes());
}

/// |<a|b>|^2. Global-phase invariant by construction.
template <typename Scalar>
Scalar fidelity(const QuditRegister<Scalar>& a, const QuditRegister<Scalar>& b) {
  return std::norm(inner_product(a, b));
}

/// Reorders subsystems: subsystem order[i] of `state` becomes subsystem i.
template <typename Scalar>
QuditRegister<Scalar> permute_subsystems(const QuditRegister<Scalar>& state,
                                         std::span<const Index> order) {
  const Dims& dims = state.dims();
  if (static_cast<Index>(order.size()) != dims.count())
    throw std::invalid_argument("permute_subsystems: order size mismatch");
  std::vector<bool> seen(order.size(), false);
  std::vector<Index> new_dims(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] < 0 || order[i] >= dims.count() || seen[static_cast<std::size_t>(order[i])])
      throw std::invalid_argument("permute_subsystems: order is not a permutation");
    seen[static_cast<std::size_t>(order[i])] = true;
    new_dims[i] = dims[order[i]];
  }
  Dims out_dims{std::move(new_dims)};
  Vector<Scalar> amps(state.dim());
  std::vector<Index> digits(order.size());
  for (Index src = 0; src < state.dim(); ++src) {
    const std::vector<Index> d = dims.digits_of(src);
    for (std::size_t i = 0; i < order.size(); ++i) digits[i] = d[static_cast<std::size_t>(order[i])];
    amps[out_dims.index_of(digits)] = state.amplitudes()[src];
  }
  return QuditRegister<Scalar>(std::move(out_dims), amps);
}

/// Pads a single-subsystem state onto the lowest levels of a larger qudit.
template <typename Scalar>
QuditRegister<Scalar> embedded(const QuditRegister<Scalar>& state, Index dim) {
  if (state.dims().count() != 1)
    throw std::invalid_argument("embedded: expects a single-subsystem register");
  if (dim < state.dim()) throw std::invalid_argument("embedded: target dimension too small");
  Vector<Scalar> amps = Vector<Scalar>::Zero(dim);
  amps.head(state.dim()) = state.amplitudes();
  return QuditRegister<Scalar>(Dims{dim}, amps);
}

/// Restricts a single-subsystem state to its lowest levels. The discarded
/// tail must carry negligible weight.
template <typename Scalar>
QuditRegister<Scalar> truncated(const QuditRegister<Scalar>& state, Index dim) {
  if (state.dims().count() != 1)
    throw std::invalid_argument("truncated: expects a single-subsystem register");
  if (dim < 1 || dim > state.dim())
    throw std::invalid_argument("truncated: target dimension out of range");
  const Scalar residual = state.amplitudes().tail(state.dim() - dim).squaredNorm();
  if (residual > numeric_traits<Scalar>::support_tol)
    throw numeric_error("truncated: discarded levels carry non-negligible weight");
  Vector<Scalar> amps = state.amplitudes().head(dim);
  amps.normalize();
  return QuditRegister<Scalar>(Dims{dim}, amps);
}

/// Removes a subsystem that sits in the given basis state exactly (up to
/// negligible residual weight elsewhere).
template <typename Scalar>
QuditRegister<Scalar> drop_subsystem(const QuditRegister<Scalar>& state, Index subsystem,
                                     Index basis_value) {
  const Dims& dims = state.dims();
  if (subsystem < 0 || subsystem >= dims.count())
    throw std::invalid_argument("drop_subsystem: subsystem out of range");
  if (dims.count() < 2)
    throw std::invalid_argument("drop_subsystem: register has a single subsystem");
  if (basis_value < 0 || basis_value >= dims[subsystem])
    throw std::invalid_argument("drop_subsystem: basis value out of range");

  std::vector<Index> rest_dims;
  for (Index s = 0; s < dims.count(); ++s)
    if (s != subsystem) rest_dims.push_back(dims[s]);
  Dims out_dims{std::move(rest_dims)};

  Vector<Scalar> amps(out_dims.total());
  Scalar residual = 0;
  std::vector<Index> rest_digits(static_cast<std::size_t>(out_dims.count()));
  for (Index src = 0; src < state.dim(); ++src) {
    const std::vector<Index> d = dims.digits_of(src);
    if (d[static_cast<std::size_t>(subsystem)] != basis_value) {
      residual += std::norm(state.amplitudes()[src]);
      continue;
    }
    std::size_t w = 0;
    for (Index s = 0; s < dims.count(); ++s)
      if (s != subsystem) rest_digits[w++] = d[static_cast<std::size_t>(s)];
    amps[out_dims.index_of(rest_digits)] = state.amplitudes()[src];
  }
  if (residual > numeric_traits<Scalar>::support_tol)
    throw numeric_error("drop_subsystem: subsystem is not in the requested basis state");
  amps.normalize();
  return QuditRegister<Scalar>(std::move(out_dims), amps);
}

}  // namespace qtel
