// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "rearrange/kernels.hpp"
#include "rearrange/oracle.hpp"

using namespace rearrange;

namespace {

Tensor<float> random_floats(const Shape& shape, std::mt19937_64& rng) {
  Tensor<float> t(shape);
  std::uniform_real_distribution<float> d(-1.0f, 1.0f);
  for (auto& v : t.data()) v = d(rng);
  return t;
}

Shape random_shape(std::mt19937_64& rng, std::size_t max_dims, index_t max_size) {
  std::vector<index_t> sizes(1 + rng() % max_dims);
  for (auto& s : sizes) s = 1 + rng() % max_size;
  return Shape(sizes);
}

OrderVec random_order(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return OrderVec(p);
}

const std::vector<ExecConfig> kConfigs{
    ExecConfig{TileConfig{32, 32, 4}, 1},
    ExecConfig{TileConfig{32, 32, 4}, 3},
    ExecConfig{TileConfig{8, 4, 2}, 2},
    ExecConfig{TileConfig{1, 1, 1}, 1},
};

}  // namespace

TEST_CASE("gather path selection") {
  CHECK(plan_reorder(Shape{8, 4, 2}, OrderVec({0, 1, 2})).path == GatherPath::contiguous);
  CHECK(plan_reorder(Shape{8, 4, 2}, OrderVec({0, 2, 1})).path == GatherPath::stream);
  CHECK(plan_reorder(Shape{8, 4, 2}, OrderVec({1, 0, 2})).path == GatherPath::staged);
  // Moving only size-1 dimensions leaves the data in place.
  CHECK(plan_reorder(Shape{8, 1, 4}, OrderVec({1, 0, 2})).path == GatherPath::contiguous);
  const std::vector<std::size_t> keep{1};
  CHECK(plan_reorder_nm(Shape{4, 3}, keep, SliceSpec{{2, 0}, {1, 3}}).path == GatherPath::degraded);
}

TEST_CASE("reorder matches the oracle on random shapes and tile configs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 150; ++trial) {
    const auto shape = random_shape(rng, 5, 9);
    const auto in = random_floats(shape, rng);
    const auto order = random_order(rng, shape.ndim());
    const auto expected = oracle::naive_reorder(in, order);
    for (const auto& cfg : kConfigs) {
      REQUIRE(reorder(in, order, cfg) == expected);
    }
  }
}

TEST_CASE("large transposes exercise partial tiles") {
  std::mt19937_64 rng(5);
  for (auto [a, b] : {std::pair<index_t, index_t>{67, 130}, {130, 67}, {1, 257}, {257, 1}, {64, 64}}) {
    const auto in = random_floats(Shape{a, b}, rng);
    REQUIRE(reorder(in, OrderVec({1, 0}), {TileConfig{}, 2}) == oracle::naive_reorder(in, OrderVec({1, 0})));
  }
}

TEST_CASE("composition law: reorder(reorder(x,p),q) == reorder(x, p.compose(q))") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto shape = random_shape(rng, 5, 6);
    const auto in = random_floats(shape, rng);
    const auto p = random_order(rng, shape.ndim());
    const auto q = random_order(rng, shape.ndim());
    REQUIRE(reorder(reorder(in, p), q) == reorder(in, p.compose(q)));
  }
}

TEST_CASE("inverse order restores the input") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto shape = random_shape(rng, 5, 7);
    const auto in = random_floats(shape, rng);
    const auto p = random_order(rng, shape.ndim());
    REQUIRE(reorder(reorder(in, p), p.inverse()) == in);
  }
}

TEST_CASE("reorder errors") {
  const Tensor<float> t(Shape{2, 3});
  CHECK_THROWS_AS(reorder(t, OrderVec({0, 1, 2})), Error);
  CHECK_THROWS_AS(permute3d(t, OrderVec({1, 0})), Error);
  try {
    (void)permute3d(t, OrderVec({1, 0}));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::shape);
  }
}

TEST_CASE("reorder_nm matches the slicing oracle") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto shape = random_shape(rng, 5, 6);
    const auto n = shape.ndim();
    std::vector<std::size_t> dims(n);
    std::iota(dims.begin(), dims.end(), 0);
    std::shuffle(dims.begin(), dims.end(), rng);
    const std::vector<std::size_t> keep(dims.begin(), dims.begin() + 1 + rng() % n);
    SliceSpec slice{std::vector<index_t>(n), std::vector<index_t>(n)};
    for (std::size_t d = 0; d < n; ++d) {
      const bool kept = std::find(keep.begin(), keep.end(), d) != keep.end();
      slice.base[d] = rng() % shape[d];
      slice.range[d] = kept ? 1 + rng() % (shape[d] - slice.base[d]) : 1;
    }
    const auto in = random_floats(shape, rng);
    const auto expected = oracle::naive_slice(in, keep, slice);
    for (const auto& cfg : kConfigs) REQUIRE(reorder_nm(in, keep, slice, cfg) == expected);
  }
}

TEST_CASE("full-range reorder_nm equals reorder") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const auto shape = random_shape(rng, 4, 8);
    const auto in = random_floats(shape, rng);
    const auto p = random_order(rng, shape.ndim());
    const std::vector<std::size_t> keep(p.values().begin(), p.values().end());
    REQUIRE(reorder_nm(in, keep, SliceSpec::full(shape)) == reorder(in, p));
  }
}

TEST_CASE("reorder_nm rejects bad slices") {
  const Tensor<float> t(Shape{4, 3});
  const std::vector<std::size_t> keep{0};
  CHECK_THROWS_AS(reorder_nm(t, keep, SliceSpec{{0, 0}, {4, 2}}), Error);
  CHECK_THROWS_AS(reorder_nm(t, keep, SliceSpec{{1, 0}, {4, 1}}), Error);
}

TEST_CASE("interlace round trip and oracle agreement") {
  std::mt19937_64 rng(2);
  for (std::size_t n = 1; n <= 9; ++n) {
    for (index_t len : {index_t{1}, index_t{63}, index_t{64}, index_t{1000}, index_t{4099}}) {
      std::vector<std::vector<double>> arrays(n, std::vector<double>(len));
      std::uniform_real_distribution<double> d(-1, 1);
      for (auto& a : arrays)
        for (auto& v : a) v = d(rng);
      for (const auto& cfg : kConfigs) {
        const auto mixed = interlace(arrays, cfg);
        REQUIRE(mixed == oracle::naive_interlace(arrays));
        REQUIRE(deinterlace<double>(mixed, n, cfg) == arrays);
      }
    }
  }
}

TEST_CASE("interlace errors") {
  CHECK_THROWS_AS(interlace(std::vector<std::vector<float>>{}), Error);
  CHECK_THROWS_AS(interlace(std::vector<std::vector<float>>{{1, 2}, {3}}), Error);
  CHECK_THROWS_AS(interlace(std::vector<std::vector<float>>{{}, {}}), Error);
  const std::vector<float> buf(10);
  CHECK_THROWS_AS(deinterlace<float>(buf, 3), Error);
  CHECK_THROWS_AS(deinterlace<float>(buf, 0), Error);
}

TEST_CASE("copy handles every length and rejects mismatched buffers") {
  std::mt19937_64 rng(1);
  for (index_t n : {1, 3, 127, 128, 129, 5000, 70001}) {
    const auto in = random_floats(Shape{n}, rng);
    for (const auto& cfg : kConfigs) REQUIRE(copy_kernel(in, cfg) == in);
  }
  std::vector<float> a(10), b(9);
  CHECK_THROWS_AS(copy_into<float>(a, b), Error);
}

TEST_CASE("results do not depend on worker count") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto shape = random_shape(rng, 4, 40);
    const auto in = random_floats(shape, rng);
    const auto p = random_order(rng, shape.ndim());
    const auto ref = reorder(in, p, {TileConfig{}, 1});
    for (std::size_t w : {2u, 4u, 7u}) REQUIRE(reorder(in, p, {TileConfig{}, w}) == ref);
  }
}
