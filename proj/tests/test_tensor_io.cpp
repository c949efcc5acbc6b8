// SPDX-License-Identifier: Apache-2.0
#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "rearrange/ops.hpp"
#include "rearrange/tensor_io.hpp"

using namespace rearrange;

namespace {

ErrorCode read_error(const std::string& bytes) {
  std::istringstream in(bytes);
  try {
    (void)read_rrt(in);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::invalid_argument;
}

std::string header(std::uint8_t dtype, std::vector<std::uint64_t> sizes) {
  std::string s = "RRT1";
  s += static_cast<char>(dtype);
  s += static_cast<char>(sizes.size());
  for (auto v : sizes) {
    for (int b = 0; b < 8; ++b) s += static_cast<char>((v >> (8 * b)) & 0xff);
  }
  return s;
}

}  // namespace

TEST_CASE("exact byte layout of a small f32 tensor") {
  Tensor<float> t(Shape{3, 2}, {0, 1, 2, 3, 4, 5});
  std::ostringstream out;
  write_rrt(out, t);
  const auto bytes = out.str();
  REQUIRE(bytes.size() == 4 + 1 + 1 + 2 * 8 + 6 * 4);
  CHECK(bytes.substr(0, 4) == "RRT1");
  CHECK(bytes[4] == 0);
  CHECK(bytes[5] == 2);
  CHECK(bytes.substr(0, 22) == header(0, {3, 2}));
  // 1.0f little-endian
  CHECK(static_cast<unsigned char>(bytes[22 + 4 + 3]) == 0x3f);
  CHECK(static_cast<unsigned char>(bytes[22 + 4 + 2]) == 0x80);
}

TEST_CASE("random tensors round-trip bit-exactly") {
  std::mt19937_64 rng(6);
  for (auto dtype : {DType::f32, DType::f64}) {
    for (std::size_t ndim = 1; ndim <= 5; ++ndim) {
      std::vector<index_t> sizes(ndim);
      for (auto& s : sizes) s = 1 + rng() % 7;
      const auto t = random_tensor(dtype, Shape(sizes), rng());
      std::stringstream buf;
      write_rrt(buf, t);
      const auto back = read_rrt(buf);
      REQUIRE(bit_equal(back, t));
      REQUIRE(dtype_of(back) == dtype);
    }
  }
}

TEST_CASE("file save and load") {
  const auto path = std::filesystem::temp_directory_path() / "rearrange_test_io.rrt";
  const auto t = random_tensor(DType::f64, Shape{5, 4, 3}, 1);
  save_rrt(path, t);
  CHECK(std::filesystem::file_size(path) == 6 + 3 * 8 + 60 * 8);
  CHECK(bit_equal(load_rrt(path), t));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_rrt(path), Error);
}

TEST_CASE("malformed files are rejected") {
  const std::string body(2 * 4, '\0');
  CHECK(read_error("") == ErrorCode::format);
  CHECK(read_error("RRT2" + header(0, {2}).substr(4) + body) == ErrorCode::format);
  CHECK(read_error(header(7, {2}) + body) == ErrorCode::format);
  CHECK(read_error(header(0, {})) == ErrorCode::format);
  CHECK(read_error(header(0, {2, 0})) == ErrorCode::shape);
  CHECK(read_error(header(0, {2}) + body.substr(0, 7)) == ErrorCode::format);
  CHECK(read_error(header(0, {2}) + body + "x") == ErrorCode::format);
  CHECK(read_error(header(0, {2}).substr(0, 10)) == ErrorCode::format);
  std::istringstream ok(header(0, {2}) + body);
  CHECK_NOTHROW(read_rrt(ok));
}

TEST_CASE("dtype helpers") {
  CHECK(element_size(DType::f32) == 4);
  CHECK(element_size(DType::f64) == 8);
  const AnyTensor t = Tensor<double>(Shape{2, 2});
  CHECK(dtype_of(t) == DType::f64);
  CHECK(shape_of(t) == Shape{2, 2});
}
