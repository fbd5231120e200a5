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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace qtel {

using Index = Eigen::Index;

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using Vector = Eigen::VectorX<std::complex<Scalar>>;

template <typename Scalar>
using Matrix = Eigen::MatrixX<std::complex<Scalar>>;

template <typename Scalar>
using RealVector = Eigen::VectorX<Scalar>;

/// Precision-dependent tolerances. The double values are the contract the
/// rest of the library (and its tests) are written against; the float ones
/// exist so the core types stay usable at reduced precision.
template <typename Scalar>
struct numeric_traits;

template <>
struct numeric_traits<double> {
  static constexpr double norm_tol = 1e-10;     // state norms, probability sums
  static constexpr double algebra_tol = 1e-12;  // unitarity / projector algebra, scaled by n
  static constexpr double schmidt_tol = 1e-8;   // product-state singular-value threshold
  static constexpr double support_tol = 1e-12;  // negligible-weight cutoff
};

template <>
struct numeric_traits<float> {
  static constexpr float norm_tol = 1e-4f;
  static constexpr float algebra_tol = 1e-5f;
  static constexpr float schmidt_tol = 1e-3f;
  static constexpr float support_tol = 1e-7f;
};

/// A numerical postcondition failed (degenerate measurement, broken
/// probability bookkeeping, ...). Distinct from std::invalid_argument,
/// which is reserved for caller errors.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal protocol invariant broke mid-run. Carries the stage name.
class internal_error : public std::runtime_error {
 public:
  internal_error(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace qtel
