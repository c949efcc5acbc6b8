// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "rearrange/error.hpp"
#include "rearrange/layout.hpp"

namespace rearrange {

template <class T>
concept Element = std::is_trivially_copyable_v<T> && !std::is_same_v<T, bool>;

/// Dense element buffer linearized with dimension 0 fastest.
template <Element T>
class Tensor {
 public:
  using value_type = T;

  explicit Tensor(Shape shape) : shape_(std::move(shape)), data_(shape_.element_count()) {}

  Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_.element_count()) {
      throw Error(ErrorCode::shape, "tensor buffer holds " + std::to_string(data_.size()) +
                                        " elements, shape " + shape_.to_string() + " needs " +
                                        std::to_string(shape_.element_count()));
    }
  }

  [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
  [[nodiscard]] std::size_t ndim() const noexcept { return shape_.ndim(); }
  [[nodiscard]] index_t size() const noexcept { return data_.size(); }

  [[nodiscard]] std::span<T> data() noexcept { return data_; }
  [[nodiscard]] std::span<const T> data() const noexcept { return data_; }

  [[nodiscard]] T& operator[](index_t offset) { return data_[offset]; }
  [[nodiscard]] const T& operator[](index_t offset) const { return data_[offset]; }

  [[nodiscard]] const T& at(std::span<const index_t> index) const { return data_[linearize(index, shape_)]; }

  [[nodiscard]] std::vector<T> release() && { return std::move(data_); }

  friend bool operator==(const Tensor& a, const Tensor& b) = default;

 private:
  Shape shape_;
  std::vector<T> data_;
};

}  // namespace rearrange
