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

#include <span>
#include <vector>

#include <Eigen/SVD>

#include "qtel/register.hpp"

namespace qtel {

template <typename Scalar = double>
struct SchmidtReport {
  bool product = false;
  RealVector<Scalar> values;  // singular values, descending
};

/// Reshapes the amplitudes along the cut (first_group | rest) and returns
/// the singular values. The state is a product across the cut iff exactly
/// one singular value exceeds the Schmidt threshold.
template <typename Scalar>
SchmidtReport<Scalar> is_product(const QuditRegister<Scalar>& state,
                                 std::span<const Index> first_group) {
  const Dims& dims = state.dims();
  if (first_group.empty()) throw std::invalid_argument("is_product: empty cut group");
  std::vector<bool> in_first(static_cast<std::size_t>(dims.count()), false);
  for (Index s : first_group) {
    if (s < 0 || s >= dims.count())
      throw std::invalid_argument("is_product: subsystem out of range");
    if (in_first[static_cast<std::size_t>(s)])
      throw std::invalid_argument("is_product: duplicate subsystem in cut");
    in_first[static_cast<std::size_t>(s)] = true;
  }
  if (static_cast<Index>(first_group.size()) == dims.count())
    throw std::invalid_argument("is_product: cut must leave both sides nonempty");

  Index rows = 1;
  for (Index s : first_group) rows *= dims[s];
  const Index cols = dims.total() / rows;

  std::vector<Index> rest;
  for (Index s = 0; s < dims.count(); ++s)
    if (!in_first[static_cast<std::size_t>(s)]) rest.push_back(s);

  Matrix<Scalar> m(rows, cols);
  for (Index i = 0; i < state.dim(); ++i) {
    const std::vector<Index> digits = dims.digits_of(i);
    Index row = 0, rstride = 1;
    for (Index s : first_group) {
      row += digits[static_cast<std::size_t>(s)] * rstride;
      rstride *= dims[s];
    }
    Index col = 0, cstride = 1;
    for (Index s : rest) {
      col += digits[static_cast<std::size_t>(s)] * cstride;
      cstride *= dims[s];
    }
    m(row, col) = state.amplitudes()[i];
  }

  Eigen::JacobiSVD<Matrix<Scalar>> svd(m);
  SchmidtReport<Scalar> report;
  report.values = svd.singularValues();
  Index above = 0;
  for (Index i = 0; i < report.values.size(); ++i)
    if (report.values[i] > numeric_traits<Scalar>::schmidt_tol) ++above;
  report.product = (above == 1);
  return report;
}

}  // namespace qtel
