// SPDX-License-Identifier: Apache-2.0
#pragma once

/**
 * @file tile_scheduler.hpp
 * @brief 2D tiling, diagonal tile ordering and the worker pool that runs tiles.
 *
 * This is the only place in the library that spawns threads. Workers pull
 * contiguous chunks of the precomputed tile order from a shared counter; tile
 * tasks write disjoint output regions, so the result is independent of the
 * number of workers and of their interleaving.
 */

#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rearrange/error.hpp"
#include "rearrange/layout.hpp"

namespace rearrange {

struct TileConfig {
  index_t tile_rows = 32;
  index_t tile_cols = 32;
  /// Inner-loop unroll factor, mirrors 32x8 workers per 32x32 tile.
  index_t elements_per_work_item = 4;

  /// Throws ErrorCode::invalid_argument for zero sizes or an unroll factor that does not divide tile_rows.
  void validate() const;
};

struct TileCoord {
  index_t row = 0;
  index_t col = 0;

  friend auto operator<=>(const TileCoord&, const TileCoord&) = default;
};

struct TileGrid {
  index_t rows = 0;
  index_t cols = 0;

  [[nodiscard]] index_t count() const noexcept { return rows * cols; }
  friend bool operator==(const TileGrid&, const TileGrid&) = default;
};

/// Half-open element region covered by one tile; edge tiles are clipped to the extent.
struct TileRegion {
  index_t row_begin = 0;
  index_t row_end = 0;
  index_t col_begin = 0;
  index_t col_end = 0;
};

TileGrid tile_grid(index_t extent_rows, index_t extent_cols, const TileConfig& config);

TileRegion tile_region(TileCoord tile, index_t extent_rows, index_t extent_cols, const TileConfig& config);

/// Anti-diagonal sweep: tiles grouped by row + col ascending, ascending row within a diagonal.
std::vector<TileCoord> diagonal_tile_order(index_t grid_rows, index_t grid_cols);

/// Raised when a tile task throws; carries the tile and its position in the visit order.
class TaskFailure : public Error {
 public:
  TaskFailure(TileCoord tile, std::size_t position, const std::string& reason);

  [[nodiscard]] TileCoord tile() const noexcept { return tile_; }
  [[nodiscard]] std::size_t position() const noexcept { return position_; }

 private:
  TileCoord tile_;
  std::size_t position_;
};

/// Logical core count (at least 1).
std::size_t default_worker_count();

/// Runs `work` once per tile of `order` on `workers` threads (the caller counts as one).
/// If tasks fail, the failure with the smallest position in `order` is rethrown as TaskFailure.
void run_tiles(std::span<const TileCoord> order, const std::function<void(const TileCoord&)>& work,
               std::size_t workers);

/// Execution settings shared by all tiled kernels.
struct ExecConfig {
  TileConfig tiles{};
  std::size_t workers = default_worker_count();
};

}  // namespace rearrange
