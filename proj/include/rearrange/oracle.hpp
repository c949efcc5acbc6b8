// SPDX-License-Identifier: Apache-2.0
#pragma once

/**
 * @file oracle.hpp
 * @brief Untiled, single-threaded reference implementations of every kernel.
 *
 * Each function walks the output element by element through delinearize/linearize
 * (or a plain double loop for stencils). Nothing here may include the tiled kernels:
 * the tests compare the two and the comparison is only meaningful while they share no code.
 */

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "rearrange/error.hpp"
#include "rearrange/layout.hpp"
#include "rearrange/stencil_spec.hpp"
#include "rearrange/tensor.hpp"

namespace rearrange::oracle {

template <Element T>
Tensor<T> naive_copy(const Tensor<T>& src) {
  Tensor<T> out(src.shape());
  for (index_t i = 0; i < src.size(); ++i) out[i] = src[i];
  return out;
}

template <Element T>
Tensor<T> naive_reorder(const Tensor<T>& src, const OrderVec& order) {
  const Shape& in_shape = src.shape();
  if (order.size() != in_shape.ndim()) throw Error(ErrorCode::permutation, "order length does not match rank");
  std::vector<index_t> sizes(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) sizes[k] = in_shape[order[k]];
  Tensor<T> out{Shape(sizes)};
  MultiIndex i(order.size());
  for (index_t o = 0; o < out.size(); ++o) {
    const auto j = delinearize(o, out.shape());
    for (std::size_t k = 0; k < order.size(); ++k) i[order[k]] = j[k];
    out[o] = src[linearize(i, in_shape)];
  }
  return out;
}

template <Element T>
Tensor<T> naive_slice(const Tensor<T>& src, std::span<const std::size_t> keep, const SliceSpec& slice) {
  slice.validate(src.shape(), keep);
  std::vector<index_t> sizes;
  for (auto d : keep) sizes.push_back(slice.range[d]);
  Tensor<T> out{Shape(sizes)};
  for (index_t o = 0; o < out.size(); ++o) {
    const auto j = delinearize(o, out.shape());
    MultiIndex i(slice.base.begin(), slice.base.end());
    for (std::size_t k = 0; k < keep.size(); ++k) i[keep[k]] += j[k];
    out[o] = src[linearize(i, src.shape())];
  }
  return out;
}

template <Element T>
std::vector<T> naive_interlace(const std::vector<std::vector<T>>& arrays) {
  if (arrays.empty() || arrays.front().empty()) throw Error(ErrorCode::spec, "interlace needs non-empty arrays");
  const std::size_t n = arrays.size();
  const std::size_t len = arrays.front().size();
  for (const auto& a : arrays) {
    if (a.size() != len) throw Error(ErrorCode::spec, "interlace arrays must have equal length");
  }
  std::vector<T> out(n * len);
  for (std::size_t k = 0; k < len; ++k) {
    for (std::size_t a = 0; a < n; ++a) out[k * n + a] = arrays[a][k];
  }
  return out;
}

template <Element T>
std::vector<std::vector<T>> naive_deinterlace(std::span<const T> buffer, std::size_t n) {
  if (n == 0 || buffer.empty() || buffer.size() % n != 0) {
    throw Error(ErrorCode::spec, "buffer cannot be split into equal arrays");
  }
  const std::size_t len = buffer.size() / n;
  std::vector<std::vector<T>> out(n, std::vector<T>(len));
  for (std::size_t k = 0; k < len; ++k) {
    for (std::size_t a = 0; a < n; ++a) out[a][k] = buffer[k * n + a];
  }
  return out;
}

template <Element T>
Grid2D<T> naive_stencil(const Grid2D<T>& grid, const StencilSpec& stencil, BoundaryPolicy boundary) {
  const auto rows = static_cast<std::int64_t>(grid.rows());
  const auto cols = static_cast<std::int64_t>(grid.cols());
  check_stencil_domain(grid.rows(), grid.cols(), stencil, boundary);
  const std::int64_t radius = stencil.radius();

  auto read = [&](std::int64_t r, std::int64_t c) -> T {
    if (r >= 0 && r < rows && c >= 0 && c < cols) return grid(r, c);
    if (boundary == BoundaryPolicy::clamp_to_edge) {
      return grid(std::clamp<std::int64_t>(r, 0, rows - 1), std::clamp<std::int64_t>(c, 0, cols - 1));
    }
    return T{};
  };

  Grid2D<T> out(grid.rows(), grid.cols());
  for (std::int64_t r = 0; r < rows; ++r) {
    for (std::int64_t c = 0; c < cols; ++c) {
      const bool border = r < radius || r >= rows - radius || c < radius || c >= cols - radius;
      if (boundary == BoundaryPolicy::skip_border && border) {
        out(r, c) = grid(r, c);
        continue;
      }
      T acc{};
      for (const auto& tap : stencil.taps()) acc += static_cast<T>(tap.weight) * read(r + tap.drow, c + tap.dcol);
      out(r, c) = acc;
    }
  }
  return out;
}

}  // namespace rearrange::oracle
