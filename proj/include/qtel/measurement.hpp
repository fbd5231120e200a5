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
#include <vector>

#include "qtel/operators.hpp"
#include "qtel/random.hpp"

namespace qtel {

/// One projective-measurement branch. Branches below the support cutoff keep
/// a null post_state so enumeration can still account for them.
template <typename Scalar = double>
struct MeasurementOutcome {
  int label = 0;
  Scalar probability = 0;
  std::optional<QuditRegister<Scalar>> post_state;
};

/// A complete orthogonal set of projectors on a subsystem subset: one
/// projective measurement. Labels identify outcomes; a label of -1 marks a
/// residual completion projector that a well-formed protocol state never
/// populates. Construction checks shape only; check() enforces the
/// Hermitian/idempotent/orthogonal/complete bounds.
template <typename Scalar = double>
class ProjectorFamily {
 public:
  ProjectorFamily(std::vector<Index> targets, std::vector<int> labels,
                  std::vector<Matrix<Scalar>> projectors)
      : targets_(std::move(targets)), labels_(std::move(labels)),
        projectors_(std::move(projectors)) {
    if (projectors_.empty()) throw std::invalid_argument("ProjectorFamily: empty family");
    if (labels_.size() != projectors_.size())
      throw std::invalid_argument("ProjectorFamily: label/projector count mismatch");
    const Index n = projectors_.front().rows();
    for (const auto& p : projectors_)
      if (p.rows() != n || p.cols() != n)
        throw std::invalid_argument("ProjectorFamily: projectors must share a square shape");
    std::vector<int> sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("ProjectorFamily: duplicate outcome label");
  }

  const std::vector<Index>& targets() const noexcept { return targets_; }
  Index size() const noexcept { return static_cast<Index>(projectors_.size()); }
  Index dim() const noexcept { return projectors_.front().rows(); }
  int label(Index i) const { return labels_.at(static_cast<std::size_t>(i)); }
  const Matrix<Scalar>& projector(Index i) const {
    return projectors_.at(static_cast<std::size_t>(i));
  }

  std::optional<Index> index_of_label(int label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) return static_cast<Index>(i);
    return std::nullopt;
  }

  ProjectorFamily retargeted(std::vector<Index> targets) const {
    return ProjectorFamily(std::move(targets), labels_, projectors_);
  }

  /// Full algebraic validation: each member Hermitian and idempotent,
  /// members mutually orthogonal, family complete.
  void check() const {
    const Index n = dim();
    const Scalar bound = numeric_traits<Scalar>::algebra_tol * static_cast<Scalar>(n);
    Matrix<Scalar> sum = Matrix<Scalar>::Zero(n, n);
    for (Index a = 0; a < size(); ++a) {
      const Matrix<Scalar>& p = projector(a);
      if ((p - p.adjoint()).cwiseAbs().maxCoeff() > bound)
        throw std::invalid_argument("ProjectorFamily: member is not Hermitian");
      if ((p * p - p).cwiseAbs().maxCoeff() > bound)
        throw std::invalid_argument("ProjectorFamily: member is not idempotent");
      for (Index b = a + 1; b < size(); ++b)
        if ((p * projector(b)).cwiseAbs().maxCoeff() > bound)
          throw std::invalid_argument("ProjectorFamily: members are not orthogonal");
      sum += p;
    }
    if ((sum - Matrix<Scalar>::Identity(n, n)).cwiseAbs().maxCoeff() > bound)
      throw std::invalid_argument("ProjectorFamily: family is not complete");
  }

 private:
  std::vector<Index> targets_;
  std::vector<int> labels_;
  std::vector<Matrix<Scalar>> projectors_;
};

/// Computational-basis measurement of one n-level subsystem.
template <typename Scalar = double>
ProjectorFamily<Scalar> basis_projectors(Index n, Index target = 0) {
  if (n < 1) throw std::invalid_argument("basis_projectors: dimension must be >= 1");
  std::vector<int> labels(static_cast<std::size_t>(n));
  std::vector<Matrix<Scalar>> projectors;
  projectors.reserve(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    labels[static_cast<std::size_t>(j)] = static_cast<int>(j);
    Matrix<Scalar> p = Matrix<Scalar>::Zero(n, n);
    p(j, j) = Complex<Scalar>(1, 0);
    projectors.push_back(std::move(p));
  }
  return ProjectorFamily<Scalar>({target}, std::move(labels), std::move(projectors));
}

/// Born rule for one chosen branch: probability <psi|P|psi> and the
/// renormalized post-state (null when the probability is negligible).
template <typename Scalar>
MeasurementOutcome<Scalar> project_branch(const QuditRegister<Scalar>& state,
                                          const ProjectorFamily<Scalar>& family, Index which) {
  const detail::TargetMap map = detail::make_target_map(state.dims(), family.targets());
  if (map.block != family.dim())
    throw std::invalid_argument("project_branch: family dimension does not match targets");
  const Matrix<Scalar> block = detail::gather(state.amplitudes(), map);
  Matrix<Scalar> projected = family.projector(which) * block;
  const Scalar p = projected.squaredNorm();
  MeasurementOutcome<Scalar> outcome{family.label(which), p, std::nullopt};
  if (p >= numeric_traits<Scalar>::support_tol) {
    projected /= std::sqrt(p);
    outcome.post_state.emplace(state.dims(), detail::scatter(projected, map, state.dim()));
  }
  return outcome;
}

/// Every branch of the measurement, in family order, with exact Born
/// probabilities. Probabilities must sum to one.
template <typename Scalar>
std::vector<MeasurementOutcome<Scalar>> branches(const QuditRegister<Scalar>& state,
                                                 const ProjectorFamily<Scalar>& family) {
  std::vector<MeasurementOutcome<Scalar>> out;
  out.reserve(static_cast<std::size_t>(family.size()));
  Scalar total = 0;
  for (Index i = 0; i < family.size(); ++i) {
    out.push_back(project_branch(state, family, i));
    total += out.back().probability;
  }
  if (std::abs(total - Scalar(1)) > numeric_traits<Scalar>::norm_tol)
    throw numeric_error("branches: probabilities do not sum to one");
  return out;
}

/// Samples one branch by the Born rule. Branches below the support cutoff
/// are never returned; if nothing is above it the measurement is degenerate.
template <typename Scalar>
MeasurementOutcome<Scalar> measure(const QuditRegister<Scalar>& state,
                                   const ProjectorFamily<Scalar>& family, Rng& rng) {
  const detail::TargetMap map = detail::make_target_map(state.dims(), family.targets());
  if (map.block != family.dim())
    throw std::invalid_argument("measure: family dimension does not match targets");
  const Matrix<Scalar> block = detail::gather(state.amplitudes(), map);

  std::vector<Scalar> probs(static_cast<std::size_t>(family.size()));
  Scalar total = 0;
  Scalar eligible = 0;
  for (Index i = 0; i < family.size(); ++i) {
    probs[static_cast<std::size_t>(i)] = (family.projector(i) * block).squaredNorm();
    total += probs[static_cast<std::size_t>(i)];
    if (probs[static_cast<std::size_t>(i)] >= numeric_traits<Scalar>::support_tol)
      eligible += probs[static_cast<std::size_t>(i)];
  }
  if (std::abs(total - Scalar(1)) > numeric_traits<Scalar>::norm_tol)
    throw numeric_error("measure: probabilities do not sum to one");
  if (eligible < numeric_traits<Scalar>::support_tol)
    throw numeric_error("measure: all branch probabilities are negligible");

  const Scalar r = static_cast<Scalar>(rng.next_double()) * eligible;
  Scalar acc = 0;
  Index chosen = -1;
  for (Index i = 0; i < family.size(); ++i) {
    const Scalar p = probs[static_cast<std::size_t>(i)];
    if (p < numeric_traits<Scalar>::support_tol) continue;
    acc += p;
    chosen = i;
    if (r < acc) break;
  }
  return project_branch(state, family, chosen);
}

}  // namespace qtel
