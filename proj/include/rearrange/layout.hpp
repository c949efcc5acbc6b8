// SPDX-License-Identifier: Apache-2.0
#pragma once

/**
 * @file layout.hpp
 * @brief Shapes, storage orders and stride arithmetic shared by every kernel.
 *
 * Storage convention: a multi-dimensional array is linearized with dimension 0
 * changing fastest. For a tensor of sizes [s0, s1, ..., s(N-1)] the canonical
 * strides are [1, s0, s0*s1, ...]. An order vector lists dimensions from the
 * fastest to the slowest changing one, so the identity order [0, 1, ..., N-1]
 * is the canonical storage order.
 */

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rearrange {

using index_t = std::uint64_t;
using MultiIndex = std::vector<index_t>;
using Strides = std::vector<index_t>;

/// Per-dimension element counts. Every size is >= 1 and the product fits in index_t.
class Shape {
 public:
  explicit Shape(std::vector<index_t> sizes);
  Shape(std::initializer_list<index_t> sizes) : Shape(std::vector<index_t>(sizes)) {}

  /// Parses "128x256x512" (dimension 0 first).
  static Shape parse(std::string_view text);

  [[nodiscard]] std::size_t ndim() const noexcept { return sizes_.size(); }
  [[nodiscard]] index_t operator[](std::size_t dim) const { return sizes_.at(dim); }
  [[nodiscard]] std::span<const index_t> sizes() const noexcept { return sizes_; }
  [[nodiscard]] index_t element_count() const noexcept { return count_; }
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Shape& a, const Shape& b) noexcept { return a.sizes_ == b.sizes_; }

 private:
  std::vector<index_t> sizes_;
  index_t count_ = 1;
};

/// A permutation of {0, ..., N-1}; entry 0 names the fastest-changing dimension.
class OrderVec {
 public:
  explicit OrderVec(std::vector<std::size_t> order);
  OrderVec(std::initializer_list<std::size_t> order) : OrderVec(std::vector<std::size_t>(order)) {}

  static OrderVec identity(std::size_t n);
  /// Parses "1,0,2".
  static OrderVec parse(std::string_view text);

  [[nodiscard]] std::size_t size() const noexcept { return order_.size(); }
  [[nodiscard]] std::size_t operator[](std::size_t k) const { return order_.at(k); }
  [[nodiscard]] std::span<const std::size_t> values() const noexcept { return order_; }
  [[nodiscard]] bool is_identity() const noexcept;

  /// The order q with compose(*this, q) == identity.
  [[nodiscard]] OrderVec inverse() const;

  /// Order equivalent to reordering by *this and then by `then`:
  /// reorder(reorder(x, p), q) == reorder(x, p.compose(q)), with result[m] = p[q[m]].
  [[nodiscard]] OrderVec compose(const OrderVec& then) const;

  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const OrderVec& a, const OrderVec& b) noexcept { return a.order_ == b.order_; }

 private:
  std::vector<std::size_t> order_;
};

/// Base index and extent per dimension for N-to-M extraction.
struct SliceSpec {
  std::vector<index_t> base;
  std::vector<index_t> range;

  /// Full-range slice with zero base.
  static SliceSpec full(const Shape& shape);

  /// Throws ErrorCode::spec unless base/range fit the shape and every dimension
  /// outside `keep` has range 1.
  void validate(const Shape& shape, std::span<const std::size_t> keep) const;
};

/// Canonical strides for dimension-0-fastest storage.
Strides compute_strides(const Shape& shape);

/// Offset of `index` under `strides`; bounds are checked against `shape`.
index_t linearize(std::span<const index_t> index, std::span<const index_t> strides, const Shape& shape);
/// Offset of `index` under the canonical strides of `shape`.
index_t linearize(std::span<const index_t> index, const Shape& shape);

MultiIndex delinearize(index_t offset, const Shape& shape);

struct PermutedView {
  Shape shape;
  /// Input-space stride of each output dimension: out[j] = in[sum_k j[k] * gather_strides[k]].
  Strides gather_strides;
};

PermutedView permuted_view_strides(const Shape& shape, const OrderVec& order);

/// Parses a comma separated list of non-negative integers ("0,1,0").
std::vector<index_t> parse_index_list(std::string_view text);

}  // namespace rearrange
