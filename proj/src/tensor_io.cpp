// SPDX-License-Identifier: Apache-2.0
#include "rearrange/tensor_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace rearrange {

namespace {

constexpr std::array<char, 4> kMagic{'R', 'R', 'T', '1'};
constexpr std::size_t kChunkElements = 1 << 16;

template <class U>
U to_little(U value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(U)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<U>(bytes);
  }
  return value;
}

void write_bytes(std::ostream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out) throw Error(ErrorCode::io, "write failed");
}

void read_bytes(std::istream& in, void* data, std::size_t n, const char* what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw Error(ErrorCode::format, std::string("truncated .rrt file while reading ") + what);
  }
}

template <Element T>
void write_elements(std::ostream& out, std::span<const T> data) {
  if constexpr (std::endian::native == std::endian::little) {
    write_bytes(out, data.data(), data.size_bytes());
  } else {
    std::vector<T> chunk;
    for (std::size_t i = 0; i < data.size(); i += kChunkElements) {
      const auto n = std::min(kChunkElements, data.size() - i);
      chunk.resize(n);
      for (std::size_t k = 0; k < n; ++k) chunk[k] = to_little(data[i + k]);
      write_bytes(out, chunk.data(), n * sizeof(T));
    }
  }
}

template <Element T>
Tensor<T> read_elements(std::istream& in, Shape shape) {
  Tensor<T> t(std::move(shape));
  auto data = t.data();
  read_bytes(in, data.data(), data.size_bytes(), "element data");
  if constexpr (std::endian::native == std::endian::big) {
    for (auto& v : data) v = to_little(v);
  }
  return t;
}

}  // namespace

DType dtype_of(const AnyTensor& tensor) noexcept {
  return std::holds_alternative<Tensor<float>>(tensor) ? DType::f32 : DType::f64;
}

std::size_t element_size(DType dtype) noexcept { return dtype == DType::f32 ? 4 : 8; }

const Shape& shape_of(const AnyTensor& tensor) noexcept {
  return std::visit([](const auto& t) -> const Shape& { return t.shape(); }, tensor);
}

void write_rrt(std::ostream& out, const AnyTensor& tensor) {
  const Shape& shape = shape_of(tensor);
  if (shape.ndim() > 255) throw Error(ErrorCode::format, ".rrt supports at most 255 dimensions");
  write_bytes(out, kMagic.data(), kMagic.size());
  const std::uint8_t header[2] = {static_cast<std::uint8_t>(dtype_of(tensor)), static_cast<std::uint8_t>(shape.ndim())};
  write_bytes(out, header, 2);
  for (auto s : shape.sizes()) {
    const auto le = to_little<std::uint64_t>(s);
    write_bytes(out, &le, sizeof le);
  }
  std::visit([&](const auto& t) { write_elements(out, t.data()); }, tensor);
}

AnyTensor read_rrt(std::istream& in) {
  std::array<char, 4> magic{};
  read_bytes(in, magic.data(), magic.size(), "magic");
  if (magic != kMagic) throw Error(ErrorCode::format, "not an .rrt file (bad magic)");
  std::uint8_t header[2];
  read_bytes(in, header, 2, "header");
  if (header[0] > 1) throw Error(ErrorCode::format, "unknown .rrt dtype code " + std::to_string(header[0]));
  if (header[1] == 0) throw Error(ErrorCode::format, ".rrt tensor must have at least one dimension");
  std::vector<index_t> sizes(header[1]);
  for (auto& s : sizes) {
    std::uint64_t le = 0;
    read_bytes(in, &le, sizeof le, "sizes");
    s = to_little(le);
  }
  Shape shape(std::move(sizes));
  const auto dtype = static_cast<DType>(header[0]);
  if (shape.element_count() > (std::uint64_t{1} << 62) / element_size(dtype)) {
    throw Error(ErrorCode::size_overflow, ".rrt payload too large");
  }
  // Reject short files before allocating when the stream can tell us its length.
  if (const auto here = in.tellg(); here != std::streampos(-1)) {
    in.seekg(0, std::ios::end);
    const auto end = in.tellg();
    in.seekg(here);
    if (end != std::streampos(-1) &&
        static_cast<std::uint64_t>(end - here) < shape.element_count() * element_size(dtype)) {
      throw Error(ErrorCode::format, "truncated .rrt file while reading element data");
    }
  }
  AnyTensor result = dtype == DType::f32 ? AnyTensor(read_elements<float>(in, std::move(shape)))
                                         : AnyTensor(read_elements<double>(in, std::move(shape)));
  if (in.peek() != std::char_traits<char>::eof()) throw Error(ErrorCode::format, "trailing bytes after .rrt payload");
  return result;
}

void save_rrt(const std::filesystem::path& path, const AnyTensor& tensor) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
  write_rrt(out, tensor);
  out.flush();
  if (!out) throw Error(ErrorCode::io, "write to " + path.string() + " failed");
}

AnyTensor load_rrt(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return read_rrt(in);
}

}  // namespace rearrange
