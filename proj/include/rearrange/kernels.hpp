// SPDX-License-Identifier: Apache-2.0
#pragma once

/**
 * @file kernels.hpp
 * @brief Tiled out-of-place data movement: copy, permute, reorder, N-to-M reorder, interlace.
 *
 * Every reorder variant is lowered to a GatherPlan, i.e. an output shape plus the
 * input-space stride of each output dimension. The plan then picks one of four paths:
 *
 *  - contiguous: the output is a contiguous run of the input, handled by the copy kernel.
 *  - stream: output dimension 0 comes from input dimension 0, so rows stream on both sides.
 *  - staged: input dimension 0 lands on some other output dimension. Tiles span the plane
 *    formed by that dimension and output dimension 0; each tile is read along input rows
 *    into a worker-local scratch tile and written along output rows.
 *  - degraded: input dimension 0 was dropped by an N-to-M slice, so reads are strided
 *    and only the writes stream.
 *
 * Per-dimension stride tables are computed once per call and shared read-only by workers.
 */

#include <algorithm>
#include <cstring>
#include <span>
#include <string_view>
#include <vector>

#include "rearrange/error.hpp"
#include "rearrange/layout.hpp"
#include "rearrange/tensor.hpp"
#include "rearrange/tile_scheduler.hpp"

namespace rearrange {

enum class GatherPath { contiguous, stream, staged, degraded };

std::string_view to_string(GatherPath path) noexcept;

struct GatherPlan {
  index_t in_count = 0;
  Shape out_shape{1};
  /// Input dimension feeding each output dimension.
  std::vector<std::size_t> src_dims;
  /// Input stride of each output dimension.
  Strides gather_strides;
  /// Canonical strides of out_shape.
  Strides out_strides;
  index_t base_offset = 0;
  GatherPath path = GatherPath::stream;
  /// For the staged path: the output dimension fed by input dimension 0.
  std::size_t plane_dim = 0;
};

GatherPlan plan_reorder(const Shape& in, const OrderVec& order);
GatherPlan plan_reorder_nm(const Shape& in, std::span<const std::size_t> keep, const SliceSpec& slice);

/// Copy tiles hold tile_rows * tile_cols * elements_per_work_item * kCopyTileMultiplier elements.
inline constexpr index_t kCopyTileMultiplier = 16;
/// Streamed rows are split into chunks of tile_cols * elements_per_work_item * kRowChunkMultiplier.
inline constexpr index_t kRowChunkMultiplier = 32;
/// Interlace tiles cover this many elements of every input array (an 8x8 block).
inline constexpr index_t kInterlaceChunk = 64;

namespace detail {

/// Walks a subset of output dimensions in canonical order, tracking the matching input and output offsets.
class OffsetWalker {
 public:
  OffsetWalker(const GatherPlan& plan, std::vector<std::size_t> dims);

  void seek(index_t linear);
  void next();

  [[nodiscard]] index_t in() const noexcept { return in_; }
  [[nodiscard]] index_t out() const noexcept { return out_; }

 private:
  std::vector<std::size_t> dims_;
  std::vector<index_t> sizes_;
  std::vector<index_t> in_strides_;
  std::vector<index_t> out_strides_;
  std::vector<index_t> index_;
  index_t base_ = 0;
  index_t in_ = 0;
  index_t out_ = 0;
};

template <class T>
std::vector<T>& scratch(std::size_t n) {
  thread_local std::vector<T> buffer;
  if (buffer.size() < n) buffer.resize(n);
  return buffer;
}

inline void require_size(index_t got, index_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::shape, std::string(what) + " holds " + std::to_string(got) + " elements, expected " +
                                      std::to_string(want));
  }
}

inline TileConfig copy_tiles(const TileConfig& t) {
  t.validate();
  return {1, t.tile_rows * t.tile_cols * t.elements_per_work_item * kCopyTileMultiplier, 1};
}

inline TileConfig row_tiles(const TileConfig& t) {
  t.validate();
  return {t.tile_rows, t.tile_cols * t.elements_per_work_item * kRowChunkMultiplier, 1};
}

template <Element T>
void run_rows(const GatherPlan& plan, std::span<const T> src, std::span<T> dst, const ExecConfig& cfg) {
  const index_t row_len = plan.out_shape[0];
  const index_t rows = plan.out_shape.element_count() / row_len;
  const index_t step = plan.gather_strides[0];
  const TileConfig tc = row_tiles(cfg.tiles);
  const auto grid = tile_grid(rows, row_len, tc);
  const auto order = diagonal_tile_order(grid.rows, grid.cols);

  std::vector<std::size_t> dims;
  for (std::size_t k = 1; k < plan.out_shape.ndim(); ++k) dims.push_back(k);

  run_tiles(
      order,
      [&](const TileCoord& tile) {
        const auto region = tile_region(tile, rows, row_len, tc);
        const index_t len = region.col_end - region.col_begin;
        OffsetWalker walker(plan, dims);
        walker.seek(region.row_begin);
        for (index_t r = region.row_begin; r < region.row_end; ++r, walker.next()) {
          const T* in = src.data() + walker.in() + region.col_begin * step;
          T* out = dst.data() + r * row_len + region.col_begin;
          if (step == 1) {
            std::memcpy(out, in, len * sizeof(T));
          } else {
            for (index_t c = 0; c < len; ++c) out[c] = in[c * step];
          }
        }
      },
      cfg.workers);
}

template <Element T>
void run_staged(const GatherPlan& plan, std::span<const T> src, std::span<T> dst, const ExecConfig& cfg) {
  const std::size_t qdim = plan.plane_dim;
  const index_t p_extent = plan.out_shape[0];
  const index_t q_extent = plan.out_shape[qdim];
  const index_t p_step = plan.gather_strides[0];
  const index_t q_out_step = plan.out_strides[qdim];
  const index_t batches = plan.out_shape.element_count() / (p_extent * q_extent);

  const TileConfig& tc = cfg.tiles;
  const auto plane = tile_grid(p_extent, q_extent, tc);
  const auto order = diagonal_tile_order(batches * plane.rows, plane.cols);

  std::vector<std::size_t> dims;
  for (std::size_t k = 1; k < plan.out_shape.ndim(); ++k) {
    if (k != qdim) dims.push_back(k);
  }

  run_tiles(
      order,
      [&](const TileCoord& tile) {
        const index_t batch = tile.row / plane.rows;
        const auto region = tile_region({tile.row % plane.rows, tile.col}, p_extent, q_extent, tc);
        const index_t pn = region.row_end - region.row_begin;
        const index_t qn = region.col_end - region.col_begin;
        OffsetWalker walker(plan, dims);
        walker.seek(batch);

        auto& buf = scratch<T>(tc.tile_rows * tc.tile_cols);
        const index_t ld = tc.tile_cols;
        // Read along input rows (input dimension 0 is unit stride).
        for (index_t p = 0; p < pn; ++p) {
          const T* in = src.data() + walker.in() + (region.row_begin + p) * p_step + region.col_begin;
          std::memcpy(buf.data() + p * ld, in, qn * sizeof(T));
        }
        // Write along output rows (output dimension 0 is unit stride).
        for (index_t q = 0; q < qn; ++q) {
          T* out = dst.data() + walker.out() + (region.col_begin + q) * q_out_step + region.row_begin;
          for (index_t p = 0; p < pn; ++p) out[p] = buf[p * ld + q];
        }
      },
      cfg.workers);
}

}  // namespace detail

template <Element T>
void copy_into(std::span<const T> src, std::span<T> dst, const ExecConfig& cfg = {}) {
  detail::require_size(dst.size(), src.size(), "copy destination");
  const index_t n = src.size();
  if (n == 0) return;
  const TileConfig tc = detail::copy_tiles(cfg.tiles);
  const auto grid = tile_grid(1, n, tc);
  const auto order = diagonal_tile_order(grid.rows, grid.cols);
  run_tiles(
      order,
      [&](const TileCoord& tile) {
        const auto r = tile_region(tile, 1, n, tc);
        std::memcpy(dst.data() + r.col_begin, src.data() + r.col_begin, (r.col_end - r.col_begin) * sizeof(T));
      },
      cfg.workers);
}

template <Element T>
void execute_gather(const GatherPlan& plan, std::span<const T> src, std::span<T> dst, const ExecConfig& cfg = {}) {
  detail::require_size(src.size(), plan.in_count, "gather source");
  detail::require_size(dst.size(), plan.out_shape.element_count(), "gather destination");
  switch (plan.path) {
    case GatherPath::contiguous:
      copy_into(src.subspan(plan.base_offset, dst.size()), dst, cfg);
      break;
    case GatherPath::stream:
    case GatherPath::degraded:
      detail::run_rows(plan, src, dst, cfg);
      break;
    case GatherPath::staged:
      detail::run_staged(plan, src, dst, cfg);
      break;
  }
}

template <Element T>
Tensor<T> copy_kernel(const Tensor<T>& src, const ExecConfig& cfg = {}) {
  Tensor<T> out(src.shape());
  copy_into(src.data(), out.data(), cfg);
  return out;
}

template <Element T>
Tensor<T> reorder(const Tensor<T>& src, const OrderVec& order, const ExecConfig& cfg = {}) {
  const auto plan = plan_reorder(src.shape(), order);
  Tensor<T> out(plan.out_shape);
  execute_gather(plan, src.data(), out.data(), cfg);
  return out;
}

/// Reorder restricted to 3-D inputs; each of the six orders runs as a batch of 2-D plane moves.
template <Element T>
Tensor<T> permute3d(const Tensor<T>& src, const OrderVec& order, const ExecConfig& cfg = {}) {
  if (src.ndim() != 3) {
    throw Error(ErrorCode::shape, "permute3d needs a 3-D tensor, got " + std::to_string(src.ndim()) + " dimensions");
  }
  if (order.size() != 3) throw Error(ErrorCode::permutation, "permute3d needs an order of length 3");
  return reorder(src, order, cfg);
}

template <Element T>
Tensor<T> reorder_nm(const Tensor<T>& src, std::span<const std::size_t> keep, const SliceSpec& slice,
                     const ExecConfig& cfg = {}) {
  const auto plan = plan_reorder_nm(src.shape(), keep, slice);
  Tensor<T> out(plan.out_shape);
  execute_gather(plan, src.data(), out.data(), cfg);
  return out;
}

namespace detail {

template <Element T>
index_t check_interlace(std::span<const std::span<const T>> arrays) {
  if (arrays.empty()) throw Error(ErrorCode::spec, "interlace needs at least one array");
  const index_t len = arrays.front().size();
  if (len == 0) throw Error(ErrorCode::spec, "interlace arrays must not be empty");
  for (const auto& a : arrays) {
    if (a.size() != len) throw Error(ErrorCode::spec, "interlace arrays must have equal length");
  }
  return len;
}

inline index_t check_deinterlace(index_t total, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::spec, "deinterlace needs at least one array");
  if (total == 0 || total % n != 0) {
    throw Error(ErrorCode::spec, "buffer of " + std::to_string(total) + " elements cannot be split into " +
                                     std::to_string(n) + " equal arrays");
  }
  return total / n;
}

}  // namespace detail

/// out[k * n + a] = arrays[a][k]. Each tile stages kInterlaceChunk elements of every array.
template <Element T>
void interlace_into(std::span<const std::span<const T>> arrays, std::span<T> out, const ExecConfig& cfg = {}) {
  const index_t len = detail::check_interlace(arrays);
  const index_t n = arrays.size();
  detail::require_size(out.size(), n * len, "interlace destination");
  const TileConfig tc{1, kInterlaceChunk, 1};
  const auto grid = tile_grid(1, len, tc);
  const auto order = diagonal_tile_order(grid.rows, grid.cols);
  run_tiles(
      order,
      [&](const TileCoord& tile) {
        const auto r = tile_region(tile, 1, len, tc);
        const index_t m = r.col_end - r.col_begin;
        auto& buf = detail::scratch<T>(n * kInterlaceChunk);
        for (index_t a = 0; a < n; ++a) {
          const T* in = arrays[a].data() + r.col_begin;
          for (index_t k = 0; k < m; ++k) buf[k * n + a] = in[k];
        }
        std::memcpy(out.data() + r.col_begin * n, buf.data(), m * n * sizeof(T));
      },
      cfg.workers);
}

template <Element T>
void deinterlace_into(std::span<const T> buffer, std::span<const std::span<T>> outs, const ExecConfig& cfg = {}) {
  const index_t len = detail::check_deinterlace(buffer.size(), outs.size());
  const index_t n = outs.size();
  for (const auto& o : outs) detail::require_size(o.size(), len, "deinterlace destination");
  const TileConfig tc{1, kInterlaceChunk, 1};
  const auto grid = tile_grid(1, len, tc);
  const auto order = diagonal_tile_order(grid.rows, grid.cols);
  run_tiles(
      order,
      [&](const TileCoord& tile) {
        const auto r = tile_region(tile, 1, len, tc);
        const index_t m = r.col_end - r.col_begin;
        auto& buf = detail::scratch<T>(n * kInterlaceChunk);
        std::memcpy(buf.data(), buffer.data() + r.col_begin * n, m * n * sizeof(T));
        for (index_t a = 0; a < n; ++a) {
          T* o = outs[a].data() + r.col_begin;
          for (index_t k = 0; k < m; ++k) o[k] = buf[k * n + a];
        }
      },
      cfg.workers);
}

template <Element T>
std::vector<T> interlace(std::span<const std::span<const T>> arrays, const ExecConfig& cfg = {}) {
  const index_t len = detail::check_interlace(arrays);
  std::vector<T> out(len * arrays.size());
  interlace_into<T>(arrays, out, cfg);
  return out;
}

template <Element T>
std::vector<T> interlace(const std::vector<std::vector<T>>& arrays, const ExecConfig& cfg = {}) {
  std::vector<std::span<const T>> views(arrays.begin(), arrays.end());
  return interlace<T>(std::span<const std::span<const T>>(views), cfg);
}

template <Element T>
std::vector<std::vector<T>> deinterlace(std::span<const T> buffer, std::size_t n, const ExecConfig& cfg = {}) {
  const index_t len = detail::check_deinterlace(buffer.size(), n);
  std::vector<std::vector<T>> outs(n, std::vector<T>(len));
  std::vector<std::span<T>> views(outs.begin(), outs.end());
  deinterlace_into<T>(buffer, views, cfg);
  return outs;
}

}  // namespace rearrange
