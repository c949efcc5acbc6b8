// SPDX-License-Identifier: Apache-2.0
#include "rearrange/tile_scheduler.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace rearrange {

namespace {

index_t ceil_div(index_t a, index_t b) { return a / b + (a % b != 0); }

std::string describe(const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown exception";
  }
}

}  // namespace

void TileConfig::validate() const {
  if (tile_rows == 0 || tile_cols == 0 || elements_per_work_item == 0) {
    throw Error(ErrorCode::invalid_argument, "tile sizes and elements_per_work_item must be >= 1");
  }
  if (tile_rows % elements_per_work_item != 0) {
    throw Error(ErrorCode::invalid_argument, "elements_per_work_item (" + std::to_string(elements_per_work_item) +
                                                 ") must divide tile_rows (" + std::to_string(tile_rows) + ")");
  }
}

TileGrid tile_grid(index_t extent_rows, index_t extent_cols, const TileConfig& config) {
  config.validate();
  if (extent_rows == 0 || extent_cols == 0) throw Error(ErrorCode::invalid_argument, "tile extents must be >= 1");
  return {ceil_div(extent_rows, config.tile_rows), ceil_div(extent_cols, config.tile_cols)};
}

TileRegion tile_region(TileCoord tile, index_t extent_rows, index_t extent_cols, const TileConfig& config) {
  TileRegion r;
  r.row_begin = tile.row * config.tile_rows;
  r.col_begin = tile.col * config.tile_cols;
  r.row_end = std::min(extent_rows, r.row_begin + config.tile_rows);
  r.col_end = std::min(extent_cols, r.col_begin + config.tile_cols);
  return r;
}

std::vector<TileCoord> diagonal_tile_order(index_t grid_rows, index_t grid_cols) {
  std::vector<TileCoord> order;
  if (grid_rows == 0 || grid_cols == 0) return order;
  order.reserve(grid_rows * grid_cols);
  const index_t diagonals = grid_rows + grid_cols - 1;
  for (index_t d = 0; d < diagonals; ++d) {
    const index_t first = d >= grid_cols ? d - grid_cols + 1 : 0;
    const index_t last = std::min(d, grid_rows - 1);
    for (index_t row = first; row <= last; ++row) order.push_back({row, d - row});
  }
  return order;
}

TaskFailure::TaskFailure(TileCoord tile, std::size_t position, const std::string& reason)
    : Error(ErrorCode::task_failure, "tile (" + std::to_string(tile.row) + ", " + std::to_string(tile.col) +
                                         ") failed: " + reason),
      tile_(tile),
      position_(position) {}

std::size_t default_worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

void run_tiles(std::span<const TileCoord> order, const std::function<void(const TileCoord&)>& work,
               std::size_t workers) {
  const std::size_t n = order.size();
  if (n == 0) return;
  workers = std::clamp<std::size_t>(workers, 1, n);

  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        work(order[i]);
      } catch (...) {
        throw TaskFailure(order[i], i, describe(std::current_exception()));
      }
    }
    return;
  }

  // Several chunks per worker keeps the tail short when tiles have uneven cost.
  const std::size_t chunk = std::max<std::size_t>(1, n / (workers * 8));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex failure_mutex;
  std::size_t failed_at = std::numeric_limits<std::size_t>::max();
  std::exception_ptr failure;

  auto worker = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t begin = next.fetch_add(chunk, std::memory_order_relaxed);
      if (begin >= n) return;
      const std::size_t end = std::min(n, begin + chunk);
      for (std::size_t i = begin; i < end; ++i) {
        try {
          work(order[i]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (i < failed_at) {
            failed_at = i;
            failure = std::current_exception();
          }
          stop.store(true, std::memory_order_relaxed);
          return;
        }
      }
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  if (failure) throw TaskFailure(order[failed_at], failed_at, describe(failure));
}

}  // namespace rearrange
