// SPDX-License-Identifier: Apache-2.0
#include "rearrange/layout.hpp"

#include <algorithm>
#include <charconv>

#include "rearrange/error.hpp"

namespace rearrange {

namespace {

index_t parse_uint(std::string_view token, std::string_view what) {
  index_t value = 0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (token.empty() || ec != std::errc{} || ptr != last) {
    throw Error(ErrorCode::invalid_argument,
                "cannot parse '" + std::string(token) + "' in " + std::string(what));
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <class Seq>
std::string join(const Seq& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

Shape::Shape(std::vector<index_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw Error(ErrorCode::shape, "shape must have at least one dimension");
  for (auto s : sizes_) {
    if (s == 0) throw Error(ErrorCode::shape, "shape sizes must be >= 1");
    if (__builtin_mul_overflow(count_, s, &count_)) {
      throw Error(ErrorCode::size_overflow, "element count of shape overflows 64-bit index space");
    }
  }
}

Shape Shape::parse(std::string_view text) {
  std::vector<index_t> sizes;
  for (auto part : split(text, 'x')) sizes.push_back(parse_uint(part, "shape"));
  return Shape(std::move(sizes));
}

std::string Shape::to_string() const { return join(sizes_, 'x'); }

OrderVec::OrderVec(std::vector<std::size_t> order) : order_(std::move(order)) {
  if (order_.empty()) throw Error(ErrorCode::permutation, "order vector must not be empty");
  std::vector<bool> seen(order_.size(), false);
  for (auto d : order_) {
    if (d >= order_.size()) {
      throw Error(ErrorCode::permutation, "order entry " + std::to_string(d) + " out of range for " +
                                              std::to_string(order_.size()) + " dimensions");
    }
    if (seen[d]) throw Error(ErrorCode::permutation, "order entry " + std::to_string(d) + " repeated");
    seen[d] = true;
  }
}

OrderVec OrderVec::identity(std::size_t n) {
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  return OrderVec(std::move(order));
}

OrderVec OrderVec::parse(std::string_view text) {
  std::vector<std::size_t> order;
  for (auto v : parse_index_list(text)) order.push_back(static_cast<std::size_t>(v));
  return OrderVec(std::move(order));
}

bool OrderVec::is_identity() const noexcept {
  for (std::size_t k = 0; k < order_.size(); ++k) {
    if (order_[k] != k) return false;
  }
  return true;
}

OrderVec OrderVec::inverse() const {
  std::vector<std::size_t> inv(order_.size());
  for (std::size_t k = 0; k < order_.size(); ++k) inv[order_[k]] = k;
  return OrderVec(std::move(inv));
}

OrderVec OrderVec::compose(const OrderVec& then) const {
  if (then.size() != size()) throw Error(ErrorCode::permutation, "cannot compose orders of different length");
  std::vector<std::size_t> out(size());
  for (std::size_t m = 0; m < size(); ++m) out[m] = order_[then.order_[m]];
  return OrderVec(std::move(out));
}

std::string OrderVec::to_string() const { return join(order_, ','); }

SliceSpec SliceSpec::full(const Shape& shape) {
  SliceSpec s;
  s.base.assign(shape.ndim(), 0);
  s.range.assign(shape.sizes().begin(), shape.sizes().end());
  return s;
}

void SliceSpec::validate(const Shape& shape, std::span<const std::size_t> keep) const {
  const auto n = shape.ndim();
  if (base.size() != n || range.size() != n) {
    throw Error(ErrorCode::spec, "slice base/range must have " + std::to_string(n) + " entries");
  }
  if (keep.empty() || keep.size() > n) {
    throw Error(ErrorCode::spec, "keep list must name between 1 and " + std::to_string(n) + " dimensions");
  }
  std::vector<bool> kept(n, false);
  for (auto d : keep) {
    if (d >= n) throw Error(ErrorCode::spec, "keep entry " + std::to_string(d) + " out of range");
    if (kept[d]) throw Error(ErrorCode::spec, "keep entry " + std::to_string(d) + " repeated");
    kept[d] = true;
  }
  for (std::size_t d = 0; d < n; ++d) {
    if (range[d] == 0) throw Error(ErrorCode::spec, "slice range must be >= 1 in every dimension");
    if (base[d] >= shape[d] || range[d] > shape[d] - base[d]) {
      throw Error(ErrorCode::spec, "slice exceeds dimension " + std::to_string(d) + " of size " +
                                       std::to_string(shape[d]));
    }
    if (!kept[d] && range[d] != 1) {
      throw Error(ErrorCode::spec, "dropped dimension " + std::to_string(d) + " must have range 1");
    }
  }
}

Strides compute_strides(const Shape& shape) {
  Strides strides(shape.ndim());
  index_t s = 1;
  for (std::size_t k = 0; k < shape.ndim(); ++k) {
    strides[k] = s;
    // Cannot overflow: the Shape constructor already bounded the full product.
    s *= shape[k];
  }
  return strides;
}

index_t linearize(std::span<const index_t> index, std::span<const index_t> strides, const Shape& shape) {
  if (index.size() != shape.ndim() || strides.size() != shape.ndim()) {
    throw Error(ErrorCode::shape, "index/stride rank does not match shape rank");
  }
  index_t offset = 0;
  for (std::size_t d = 0; d < index.size(); ++d) {
    if (index[d] >= shape[d]) {
      throw Error(ErrorCode::bounds, "index " + std::to_string(index[d]) + " out of bounds in dimension " +
                                         std::to_string(d) + " of size " + std::to_string(shape[d]));
    }
    offset += index[d] * strides[d];
  }
  return offset;
}

index_t linearize(std::span<const index_t> index, const Shape& shape) {
  return linearize(index, compute_strides(shape), shape);
}

MultiIndex delinearize(index_t offset, const Shape& shape) {
  if (offset >= shape.element_count()) {
    throw Error(ErrorCode::bounds, "offset " + std::to_string(offset) + " out of range for " +
                                       std::to_string(shape.element_count()) + " elements");
  }
  MultiIndex index(shape.ndim());
  for (std::size_t d = 0; d < shape.ndim(); ++d) {
    index[d] = offset % shape[d];
    offset /= shape[d];
  }
  return index;
}

PermutedView permuted_view_strides(const Shape& shape, const OrderVec& order) {
  if (order.size() != shape.ndim()) {
    throw Error(ErrorCode::shape, "order has " + std::to_string(order.size()) + " entries, shape has " +
                                      std::to_string(shape.ndim()) + " dimensions");
  }
  const auto canonical = compute_strides(shape);
  std::vector<index_t> sizes(order.size());
  Strides gather(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    sizes[k] = shape[order[k]];
    gather[k] = canonical[order[k]];
  }
  return {Shape(std::move(sizes)), std::move(gather)};
}

std::vector<index_t> parse_index_list(std::string_view text) {
  std::vector<index_t> values;
  for (auto part : split(text, ',')) values.push_back(parse_uint(part, "index list"));
  return values;
}

}  // namespace rearrange
