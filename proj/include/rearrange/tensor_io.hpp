// SPDX-License-Identifier: Apache-2.0
#pragma once

/**
 * @file tensor_io.hpp
 * @brief The `.rrt` tensor file format.
 *
 * Layout, all integers little-endian:
 *
 *     "RRT1"               4 magic bytes
 *     u8   dtype           0 = f32, 1 = f64
 *     u8   ndim            >= 1
 *     u64  sizes[ndim]     dimension 0 first (fastest changing)
 *     ...  elements        element_count values, little-endian, canonical linear order
 *
 * Nothing may follow the element data.
 */

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <variant>

#include "rearrange/tensor.hpp"

namespace rearrange {

enum class DType : std::uint8_t { f32 = 0, f64 = 1 };

using AnyTensor = std::variant<Tensor<float>, Tensor<double>>;

DType dtype_of(const AnyTensor& tensor) noexcept;
std::size_t element_size(DType dtype) noexcept;
const Shape& shape_of(const AnyTensor& tensor) noexcept;

void write_rrt(std::ostream& out, const AnyTensor& tensor);
AnyTensor read_rrt(std::istream& in);

void save_rrt(const std::filesystem::path& path, const AnyTensor& tensor);
AnyTensor load_rrt(const std::filesystem::path& path);

}  // namespace rearrange
