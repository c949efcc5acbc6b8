// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "rearrange/error.hpp"
#include "rearrange/layout.hpp"

using namespace rearrange;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::invalid_argument;
}

std::vector<OrderVec> all_orders(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<OrderVec> out;
  do {
    out.emplace_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace

TEST_CASE("shape validation and parsing") {
  Shape s = Shape::parse("4x3x2");
  CHECK(s.ndim() == 3);
  CHECK(s.element_count() == 24);
  CHECK(s.to_string() == "4x3x2");
  CHECK(code_of([] { Shape{2, 0}; }) == ErrorCode::shape);
  CHECK(code_of([] { Shape(std::vector<index_t>{}); }) == ErrorCode::shape);
  CHECK(code_of([] { Shape{index_t{1} << 40, index_t{1} << 40}; }) == ErrorCode::size_overflow);
  CHECK_THROWS_AS(Shape::parse("4x"), Error);
  CHECK_THROWS_AS(Shape::parse("4xax2"), Error);
}

TEST_CASE("canonical strides put dimension 0 fastest") {
  CHECK(compute_strides(Shape{4, 3, 2}) == Strides{1, 4, 12});
  CHECK(compute_strides(Shape{7}) == Strides{1});
}

TEST_CASE("linearize known offsets") {
  const Shape s{4, 3, 2};
  const auto st = compute_strides(s);
  CHECK(linearize(MultiIndex{1, 2, 1}, st, s) == 21);
  CHECK(linearize(MultiIndex{3, 2, 1}, s) == 23);
  CHECK(linearize(MultiIndex{0, 0, 0}, s) == 0);
  CHECK(code_of([&] { (void)linearize(MultiIndex{4, 0, 0}, s); }) == ErrorCode::bounds);
  CHECK(code_of([&] { (void)linearize(MultiIndex{0, 0}, s); }) == ErrorCode::shape);
  CHECK(code_of([&] { (void)delinearize(24, s); }) == ErrorCode::bounds);
}

TEST_CASE("linearize and delinearize are inverse") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<index_t> sizes(1 + rng() % 5);
    for (auto& v : sizes) v = 1 + rng() % 6;
    const Shape s(sizes);
    for (index_t off = 0; off < s.element_count(); ++off) {
      const auto idx = delinearize(off, s);
      REQUIRE(linearize(idx, s) == off);
    }
  }
}

TEST_CASE("order vector validation") {
  CHECK(code_of([] { OrderVec({0, 0}); }) == ErrorCode::permutation);
  CHECK(code_of([] { OrderVec({0, 2}); }) == ErrorCode::permutation);
  CHECK(code_of([] { OrderVec(std::vector<std::size_t>{}); }) == ErrorCode::permutation);
  CHECK(OrderVec::parse("1,0,2").to_string() == "1,0,2");
  CHECK(OrderVec::identity(4).is_identity());
  CHECK_FALSE(OrderVec({1, 0}).is_identity());
}

TEST_CASE("compose with inverse gives identity") {
  for (std::size_t n = 1; n <= 5; ++n) {
    for (const auto& p : all_orders(n)) {
      REQUIRE(p.compose(p.inverse()).is_identity());
      REQUIRE(p.inverse().compose(p).is_identity());
      REQUIRE(std::ranges::equal(p.inverse().inverse().values(), p.values()));
    }
  }
}

TEST_CASE("composition is associative") {
  const auto orders = all_orders(4);
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto& a = orders[rng() % orders.size()];
    const auto& b = orders[rng() % orders.size()];
    const auto& c = orders[rng() % orders.size()];
    REQUIRE(std::ranges::equal(a.compose(b).compose(c).values(), a.compose(b.compose(c)).values()));
  }
}

TEST_CASE("permuted view gathers along reordered dimensions") {
  const Shape s{3, 2};
  const auto view = permuted_view_strides(s, OrderVec({1, 0}));
  CHECK(view.shape == Shape{2, 3});
  CHECK(view.gather_strides == Strides{3, 1});
  CHECK(code_of([&] { (void)permuted_view_strides(s, OrderVec({0, 1, 2})); }) == ErrorCode::shape);
}

TEST_CASE("slice validation") {
  const Shape s{4, 3, 2};
  const std::vector<std::size_t> keep{0, 2};
  SliceSpec ok{{0, 1, 0}, {4, 1, 2}};
  CHECK_NOTHROW(ok.validate(s, keep));
  SliceSpec dropped_wide{{0, 0, 0}, {4, 2, 2}};
  CHECK(code_of([&] { dropped_wide.validate(s, keep); }) == ErrorCode::spec);
  SliceSpec overrun{{1, 0, 0}, {4, 1, 2}};
  CHECK(code_of([&] { overrun.validate(s, keep); }) == ErrorCode::spec);
  SliceSpec short_spec{{0, 0}, {4, 1}};
  CHECK(code_of([&] { short_spec.validate(s, keep); }) == ErrorCode::spec);
  const std::vector<std::size_t> repeated{0, 0};
  CHECK(code_of([&] { ok.validate(s, repeated); }) == ErrorCode::spec);
  const auto full = SliceSpec::full(s);
  CHECK(full.base == std::vector<index_t>{0, 0, 0});
  CHECK(full.range == std::vector<index_t>{4, 3, 2});
}

TEST_CASE("index list parsing") {
  CHECK(parse_index_list("0,1,0") == std::vector<index_t>{0, 1, 0});
  CHECK_THROWS_AS(parse_index_list("0,,1"), Error);
  CHECK_THROWS_AS(parse_index_list("-1"), Error);
}
