// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <mutex>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "rearrange/tile_scheduler.hpp"

using namespace rearrange;

TEST_CASE("tile grid uses ceiling division") {
  const TileConfig tc{};
  CHECK(tile_grid(64, 64, tc) == TileGrid{2, 2});
  CHECK(tile_grid(65, 1, tc) == TileGrid{3, 1});
  CHECK(tile_grid(1, 1, tc).count() == 1);
}

TEST_CASE("tile config validation") {
  CHECK_NOTHROW(TileConfig{}.validate());
  CHECK_THROWS_AS((TileConfig{0, 32, 4}.validate()), Error);
  CHECK_THROWS_AS((TileConfig{32, 0, 4}.validate()), Error);
  CHECK_THROWS_AS((TileConfig{32, 32, 5}.validate()), Error);
  CHECK_THROWS_AS((TileConfig{32, 32, 0}.validate()), Error);
}

TEST_CASE("edge tiles are clipped") {
  const TileConfig tc{};
  const auto r = tile_region({2, 1}, 70, 40, tc);
  CHECK(r.row_begin == 64);
  CHECK(r.row_end == 70);
  CHECK(r.col_begin == 32);
  CHECK(r.col_end == 40);
}

TEST_CASE("diagonal order of a 2x3 grid") {
  const std::vector<TileCoord> expected{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {1, 2}};
  CHECK(diagonal_tile_order(2, 3) == expected);
}

TEST_CASE("diagonal order is a bijection that walks anti-diagonals") {
  for (index_t R = 1; R <= 24; ++R) {
    for (index_t C = 1; C <= 24; ++C) {
      const auto order = diagonal_tile_order(R, C);
      REQUIRE(order.size() == R * C);
      std::set<TileCoord> seen(order.begin(), order.end());
      REQUIRE(seen.size() == R * C);
      for (std::size_t i = 1; i < order.size(); ++i) {
        const auto a = order[i - 1], b = order[i];
        REQUIRE(b.row < R);
        REQUIRE(b.col < C);
        const bool same_diag = a.row + a.col == b.row + b.col;
        REQUIRE((same_diag ? a.row < b.row : a.row + a.col < b.row + b.col));
      }
    }
  }
}

TEST_CASE("every tile region is covered exactly once") {
  const TileConfig tc{8, 16, 4};
  const index_t rows = 37, cols = 50;
  std::vector<int> hits(rows * cols, 0);
  const auto g = tile_grid(rows, cols, tc);
  for (const auto& t : diagonal_tile_order(g.rows, g.cols)) {
    const auto r = tile_region(t, rows, cols, tc);
    for (index_t i = r.row_begin; i < r.row_end; ++i) {
      for (index_t j = r.col_begin; j < r.col_end; ++j) ++hits[i * cols + j];
    }
  }
  for (int h : hits) REQUIRE(h == 1);
}

TEST_CASE("run_tiles visits each tile once for any worker count") {
  const auto order = diagonal_tile_order(13, 11);
  for (std::size_t workers : {1u, 2u, 3u, 8u, 500u}) {
    std::vector<std::atomic<int>> counts(13 * 11);
    run_tiles(order, [&](const TileCoord& t) { counts[t.row * 11 + t.col].fetch_add(1); }, workers);
    for (auto& c : counts) REQUIRE(c.load() == 1);
  }
}

TEST_CASE("run_tiles with no tiles does nothing") {
  bool called = false;
  run_tiles({}, [&](const TileCoord&) { called = true; }, 4);
  CHECK_FALSE(called);
}

TEST_CASE("a failing tile surfaces as TaskFailure with the earliest position") {
  const auto order = diagonal_tile_order(8, 8);
  for (std::size_t workers : {1u, 4u}) {
    try {
      run_tiles(
          order,
          [&](const TileCoord& t) {
            if (t.row + t.col >= 5) throw std::runtime_error("boom");
          },
          workers);
      FAIL("expected TaskFailure");
    } catch (const TaskFailure& e) {
      CHECK(e.code() == ErrorCode::task_failure);
      CHECK(e.tile().row + e.tile().col == 5);
      CHECK(e.tile().row == 0);
      CHECK(e.position() == 15);
    }
  }
}

TEST_CASE("default worker count is positive") { CHECK(default_worker_count() >= 1); }
