// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "rearrange/oracle.hpp"
#include "rearrange/stencil.hpp"

using namespace rearrange;

namespace {

template <class T>
Grid2D<T> random_grid(index_t rows, index_t cols, std::mt19937_64& rng) {
  Grid2D<T> g(rows, cols);
  std::uniform_real_distribution<T> d(-1, 1);
  for (auto& v : g.data()) v = d(rng);
  return g;
}

StencilSpec random_stencil(std::mt19937_64& rng, int radius) {
  std::vector<Tap> taps{{0, 0, 0.5}};
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      if (!(dr || dc) || (dr == radius && dc == -radius) || rng() % 3) continue;
      taps.push_back({dr, dc, std::ldexp(double(rng() % 2001) - 1000, -9)});
    }
  }
  taps.push_back({radius, -radius, 0.25});
  std::shuffle(taps.begin() + 1, taps.end(), rng);
  return StencilSpec(taps);
}

constexpr BoundaryPolicy kPolicies[] = {BoundaryPolicy::zero_pad, BoundaryPolicy::clamp_to_edge,
                                        BoundaryPolicy::skip_border};
constexpr StencilVariant kVariants[] = {StencilVariant::staged, StencilVariant::direct};

}  // namespace

TEST_CASE("stencil spec validation") {
  CHECK_THROWS_AS(StencilSpec({}), Error);
  CHECK_THROWS_AS(StencilSpec({{0, 0, 1.0}, {0, 0, 2.0}}), Error);
  CHECK(StencilSpec({{0, 0, 1.0}, {-3, 1, 1.0}}).radius() == 3);
  CHECK_THROWS_AS(fd_stencil(0), Error);
  CHECK_THROWS_AS(fd_stencil(5), Error);
}

TEST_CASE("tiled stencil is bit-identical to the naive stencil") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const int radius = 1 + static_cast<int>(rng() % 4);
    const index_t rows = 2 * radius + 1 + rng() % 90, cols = 2 * radius + 1 + rng() % 90;
    const auto g = random_grid<float>(rows, cols, rng);
    const auto s = trial % 2 ? fd_stencil(radius) : random_stencil(rng, radius);
    for (auto b : kPolicies) {
      const auto expected = oracle::naive_stencil(g, s, b);
      for (auto v : kVariants) {
        const ExecConfig cfg{TileConfig{16, 8, 4}, 1 + rng() % 3};
        REQUIRE(apply_stencil(g, s, b, cfg, v).data().size() == expected.data().size());
        REQUIRE(apply_stencil(g, s, b, cfg, v).tensor() == expected.tensor());
      }
    }
  }
}

TEST_CASE("tiny grids smaller than the radius") {
  std::mt19937_64 rng(3);
  const auto s = fd_stencil(4);
  for (index_t rows : {1, 2, 5}) {
    for (index_t cols : {1, 3, 7}) {
      const auto g = random_grid<double>(rows, cols, rng);
      for (auto b : {BoundaryPolicy::zero_pad, BoundaryPolicy::clamp_to_edge}) {
        const auto expected = oracle::naive_stencil(g, s, b);
        for (auto v : kVariants) REQUIRE(apply_stencil(g, s, b, {}, v).tensor() == expected.tensor());
      }
      CHECK_THROWS_AS(apply_stencil(g, s, BoundaryPolicy::skip_border), Error);
    }
  }
}

TEST_CASE("a point depends only on inputs under its stencil footprint") {
  // Perturbing one input changes exactly the outputs whose footprint covers it.
  std::mt19937_64 rng(31);
  const index_t rows = 70, cols = 45;
  auto g = random_grid<double>(rows, cols, rng);
  const auto s = fd_stencil(3);
  for (auto v : kVariants) {
    const auto before = apply_stencil(g, s, BoundaryPolicy::zero_pad, {}, v);
    for (auto [pr, pc] : {std::pair<index_t, index_t>{0, 0}, {31, 32}, {32, 31}, {69, 44}, {35, 3}}) {
      auto h = g;
      h(pr, pc) += 1.0;
      const auto after = apply_stencil(h, s, BoundaryPolicy::zero_pad, {}, v);
      for (index_t r = 0; r < rows; ++r) {
        for (index_t c = 0; c < cols; ++c) {
          const auto dr = static_cast<long>(pr) - static_cast<long>(r);
          const auto dc = static_cast<long>(pc) - static_cast<long>(c);
          const bool covered = (dr == 0 && std::abs(dc) <= 3) || (dc == 0 && std::abs(dr) <= 3);
          REQUIRE((after(r, c) != before(r, c)) == covered);
        }
      }
    }
  }
}

TEST_CASE("stencil application is linear") {
  std::mt19937_64 rng(44);
  const auto a = random_grid<double>(40, 50, rng);
  const auto b = random_grid<double>(40, 50, rng);
  Grid2D<double> sum(40, 50);
  for (index_t i = 0; i < sum.data().size(); ++i) sum.data()[i] = 2.0 * a.data()[i] - b.data()[i];
  const auto s = fd_stencil(2);
  const auto la = apply_stencil(a, s), lb = apply_stencil(b, s), ls = apply_stencil(sum, s);
  for (index_t i = 0; i < ls.data().size(); ++i) {
    REQUIRE(ls.data()[i] == doctest::Approx(2.0 * la.data()[i] - lb.data()[i]).epsilon(1e-12));
  }
}

TEST_CASE("skip-border copies the border unchanged") {
  std::mt19937_64 rng(9);
  const auto g = random_grid<float>(20, 30, rng);
  const auto out = apply_stencil(g, fd_stencil(2), BoundaryPolicy::skip_border);
  for (index_t r = 0; r < 20; ++r) {
    for (index_t c = 0; c < 30; ++c) {
      if (r < 2 || r >= 18 || c < 2 || c >= 28) REQUIRE(out(r, c) == g(r, c));
    }
  }
}

TEST_CASE("constant field under clamp-to-edge has zero Laplacian") {
  Grid2D<double> g(33, 17);
  for (auto& v : g.data()) v = 3.5;
  for (int k = 1; k <= 4; ++k) {
    const auto out = apply_stencil(g, fd_stencil(k), BoundaryPolicy::clamp_to_edge);
    for (auto v : out.data()) REQUIRE(std::abs(v) < 1e-12);
  }
}

TEST_CASE("stencil text format") {
  const auto f = parse_stencil_text(
      "# cross\n"
      "boundary: clamp-to-edge\n"
      "0 0 -4\n"
      "-1 0 1   # north\n"
      "1 0 1\n"
      "\n"
      "0 -1 1\n"
      "0 1 1.0e0\n");
  CHECK(f.boundary == BoundaryPolicy::clamp_to_edge);
  REQUIRE(f.stencil.taps().size() == 5);
  CHECK(f.stencil.taps()[1].drow == -1);
  const auto again = parse_stencil_text(format_stencil_text(f));
  CHECK(again.boundary == f.boundary);
  REQUIRE(again.stencil.taps().size() == f.stencil.taps().size());
  for (std::size_t i = 0; i < again.stencil.taps().size(); ++i) {
    CHECK(again.stencil.taps()[i].drow == f.stencil.taps()[i].drow);
    CHECK(again.stencil.taps()[i].dcol == f.stencil.taps()[i].dcol);
    CHECK(again.stencil.taps()[i].weight == f.stencil.taps()[i].weight);
  }

  auto code = [](const char* text) {
    try {
      (void)parse_stencil_text(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::invalid_argument;
  };
  CHECK(code("0 0\n") == ErrorCode::format);
  CHECK(code("0 0 x\n") == ErrorCode::format);
  CHECK(code("boundary: wrap\n0 0 1\n") == ErrorCode::format);
  CHECK(code("# nothing\n") == ErrorCode::spec);
  CHECK(code("0 0 1\n0 0 2\n") == ErrorCode::spec);
}

TEST_CASE("stencil file loading") {
  const auto path = std::filesystem::temp_directory_path() / "rearrange_test_stencil.txt";
  {
    std::ofstream out(path);
    out << "boundary: skip-border\n0 0 1\n0 2 -1\n";
  }
  const auto f = load_stencil_file(path);
  CHECK(f.boundary == BoundaryPolicy::skip_border);
  CHECK(f.stencil.radius() == 2);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_stencil_file(path), Error);
}

TEST_CASE("variant and boundary names") {
  CHECK(parse_variant("direct") == StencilVariant::direct);
  CHECK(to_string(StencilVariant::staged) == "staged");
  CHECK_THROWS_AS(parse_variant("texture"), Error);
  for (auto b : kPolicies) CHECK(parse_boundary(to_string(b)) == b);
  CHECK_THROWS_AS(parse_boundary("wrap"), Error);
}
