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

#include <initializer_list>
#include <numeric>
#include <span>
#include <vector>

#include "qtel/types.hpp"

namespace qtel {

/// Ordered subsystem dimensions of a mixed-radix register.
///
/// Index convention used throughout: subsystem 0 is the least significant
/// digit, so a composite index decomposes as
///   I = i_0 + i_1 * dims[0] + i_2 * dims[0] * dims[1] + ...
/// Within a single qudit of dimension d1*d2 the same rule reads
/// j = j1 + j2 * d1, which is the factorization all subspace operators in
/// this library are built on.
class Dims {
 public:
  Dims(std::initializer_list<Index> dims) : Dims(std::vector<Index>(dims)) {}

  explicit Dims(std::vector<Index> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("Dims: empty dimension list");
    strides_.resize(dims_.size());
    Index acc = 1;
    for (std::size_t s = 0; s < dims_.size(); ++s) {
      if (dims_[s] < 1) throw std::invalid_argument("Dims: dimensions must be >= 1");
      strides_[s] = acc;
      acc *= dims_[s];
    }
    total_ = acc;
  }

  Index count() const noexcept { return static_cast<Index>(dims_.size()); }
  Index operator[](Index s) const { return dims_.at(static_cast<std::size_t>(s)); }
  Index total() const noexcept { return total_; }
  Index stride(Index s) const { return strides_.at(static_cast<std::size_t>(s)); }
  const std::vector<Index>& values() const noexcept { return dims_; }

  std::vector<Index> digits_of(Index composite) const {
    if (composite < 0 || composite >= total_)
      throw std::invalid_argument("Dims::digits_of: index out of range");
    std::vector<Index> digits(dims_.size());
    for (std::size_t s = 0; s < dims_.size(); ++s) {
      digits[s] = composite % dims_[s];
      composite /= dims_[s];
    }
    return digits;
  }

  Index index_of(std::span<const Index> digits) const {
    if (static_cast<Index>(digits.size()) != count())
      throw std::invalid_argument("Dims::index_of: digit count mismatch");
    Index composite = 0;
    for (std::size_t s = 0; s < dims_.size(); ++s) {
      if (digits[s] < 0 || digits[s] >= dims_[s])
        throw std::invalid_argument("Dims::index_of: digit out of range");
      composite += digits[s] * strides_[s];
    }
    return composite;
  }

  friend bool operator==(const Dims& a, const Dims& b) { return a.dims_ == b.dims_; }
  friend bool operator!=(const Dims& a, const Dims& b) { return !(a == b); }

 private:
  std::vector<Index> dims_;
  std::vector<Index> strides_;
  Index total_ = 1;
};

/// Two-factor split of j in [0, d1*d2): j = j1 + j2*d1.
inline std::pair<Index, Index> split_index(Index j, Index d1, Index d2) {
  if (d1 < 1 || d2 < 1) throw std::invalid_argument("split_index: factors must be >= 1");
  if (j < 0 || j >= d1 * d2) throw std::invalid_argument("split_index: index out of range");
  return {j % d1, j / d1};
}

/// Inverse of split_index.
inline Index merge_index(Index j1, Index j2, Index d1, Index d2) {
  if (d1 < 1 || d2 < 1) throw std::invalid_argument("merge_index: factors must be >= 1");
  if (j1 < 0 || j1 >= d1 || j2 < 0 || j2 >= d2)
    throw std::invalid_argument("merge_index: digit out of range");
  return j1 + j2 * d1;
}

/// Nonnegative remainder of a modulo n, for possibly negative a.
inline Index mod_floor(Index a, Index n) {
  Index r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace qtel
