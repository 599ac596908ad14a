// Copyright 2026 The MoVAE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "movae/error.hpp"

namespace movae {

/// Row-major 2-D tensor: rows are batch entries, columns are features.
/// The shape is (rows, cols) and the storage is contiguous row-major.
template <class T>
using Tensor = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Tensorf = Tensor<float>;
using Tensord = Tensor<double>;

template <class T>
std::vector<std::size_t> shape_of(const Tensor<T>& t) {
  return {static_cast<std::size_t>(t.rows()), static_cast<std::size_t>(t.cols())};
}

template <class T>
bool all_finite(const Tensor<T>& t) {
  return t.allFinite();
}

inline std::string shape_string(Eigen::Index rows, Eigen::Index cols) {
  return "(" + std::to_string(rows) + ", " + std::to_string(cols) + ")";
}

template <class T>
void require_width(const Tensor<T>& t, Eigen::Index width, const char* what) {
  if (t.cols() != width) {
    throw DimensionError(std::string(what) + ": expected width " + std::to_string(width) +
                         ", got shape " + shape_string(t.rows(), t.cols()));
  }
}

template <class T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape " + shape_string(a.rows(), a.cols()) +
                         " vs " + shape_string(b.rows(), b.cols()));
  }
}

/// Copy rows `indices` of `src` into a new tensor.
template <class T, class IndexRange>
Tensor<T> gather_rows(const Tensor<T>& src, const IndexRange& indices) {
  Tensor<T> out(static_cast<Eigen::Index>(std::size(indices)), src.cols());
  Eigen::Index r = 0;
  for (auto i : indices) out.row(r++) = src.row(static_cast<Eigen::Index>(i));
  return out;
}

template <class T>
void append_rows(Tensor<T>& dst, const Tensor<T>& extra) {
  if (extra.rows() == 0) return;
  if (dst.rows() == 0 && dst.cols() == 0) {
    dst = extra;
    return;
  }
  require_width(extra, dst.cols(), "append_rows");
  const Eigen::Index old_rows = dst.rows();
  dst.conservativeResize(old_rows + extra.rows(), Eigen::NoChange);
  dst.bottomRows(extra.rows()) = extra;
}

}  // namespace movae
