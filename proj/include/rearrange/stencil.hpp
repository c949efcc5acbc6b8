// SPDX-License-Identifier: Apache-2.0
#pragma once

/**
 * @file stencil.hpp
 * @brief Tiled 2-D stencil executor.
 *
 * The grid is split into tile_rows x tile_cols tiles visited in diagonal order.
 * A tile needs an apron of `radius` points on every side. Two variants exist:
 *
 *  - staged: the tile plus apron is loaded into worker-local scratch with the boundary
 *    policy applied during the load; the compute loop then reads only scratch.
 *  - direct: tiles whose apron lies inside the domain read the input directly, edge
 *    tiles resolve every out-of-domain read through the boundary policy.
 *
 * Both variants and the untiled reference accumulate taps in list order starting from
 * a zero accumulator, so their results are bit-identical.
 */

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>
#include <vector>

#include "rearrange/kernels.hpp"
#include "rearrange/stencil_spec.hpp"
#include "rearrange/tile_scheduler.hpp"

namespace rearrange {

enum class StencilVariant { staged, direct };

std::string_view to_string(StencilVariant variant) noexcept;
StencilVariant parse_variant(std::string_view text);

namespace detail {

template <Element T>
T resolve(std::span<const T> in, std::int64_t rows, std::int64_t cols, std::int64_t r, std::int64_t c,
          BoundaryPolicy boundary) {
  if (r >= 0 && r < rows && c >= 0 && c < cols) return in[r * cols + c];
  if (boundary == BoundaryPolicy::clamp_to_edge) {
    r = std::clamp<std::int64_t>(r, 0, rows - 1);
    c = std::clamp<std::int64_t>(c, 0, cols - 1);
    return in[r * cols + c];
  }
  return T{};
}

// Taps outermost so the column loop vectorizes; each point still sums taps in list order.
template <Element T>
void accumulate_row(const T* centre, T* __restrict out, std::int64_t n, const T* weights,
                    const std::int64_t* offsets, std::size_t ntaps) {
  for (std::int64_t c = 0; c < n; ++c) out[c] = T{};
  for (std::size_t t = 0; t < ntaps; ++t) {
    const T w = weights[t];
    const T* __restrict src = centre + offsets[t];
    for (std::int64_t c = 0; c < n; ++c) out[c] += w * src[c];
  }
}

}  // namespace detail

template <Element T>
void apply_stencil_into(std::span<const T> in, std::span<T> out, index_t rows, index_t cols,
                        const StencilSpec& stencil, BoundaryPolicy boundary = BoundaryPolicy::zero_pad,
                        const ExecConfig& cfg = {}, StencilVariant variant = StencilVariant::staged) {
  detail::require_size(in.size(), rows * cols, "stencil input");
  detail::require_size(out.size(), rows * cols, "stencil output");
  check_stencil_domain(rows, cols, stencil, boundary);

  const auto R = static_cast<std::int64_t>(stencil.radius());
  const auto nrows = static_cast<std::int64_t>(rows);
  const auto ncols = static_cast<std::int64_t>(cols);
  const auto& taps = stencil.taps();
  std::vector<T> weights;
  for (const auto& t : taps) weights.push_back(static_cast<T>(t.weight));
  const std::size_t ntaps = taps.size();

  // Points at least R away from every edge are computed; skip-border copies the rest.
  const bool skip = boundary == BoundaryPolicy::skip_border;
  const std::int64_t lo_r = skip ? R : 0, hi_r = skip ? nrows - R : nrows;
  const std::int64_t lo_c = skip ? R : 0, hi_c = skip ? ncols - R : ncols;

  const TileConfig& tc = cfg.tiles;
  const auto grid = tile_grid(rows, cols, tc);
  const auto order = diagonal_tile_order(grid.rows, grid.cols);
  const std::int64_t pitch = static_cast<std::int64_t>(tc.tile_cols) + 2 * R;

  std::vector<std::int64_t> scratch_offsets(ntaps), input_offsets(ntaps);
  for (std::size_t t = 0; t < ntaps; ++t) {
    scratch_offsets[t] = taps[t].drow * pitch + taps[t].dcol;
    input_offsets[t] = taps[t].drow * ncols + taps[t].dcol;
  }

  run_tiles(
      order,
      [&](const TileCoord& tile) {
        const auto reg = tile_region(tile, rows, cols, tc);
        const auto r0 = static_cast<std::int64_t>(reg.row_begin), r1 = static_cast<std::int64_t>(reg.row_end);
        const auto c0 = static_cast<std::int64_t>(reg.col_begin), c1 = static_cast<std::int64_t>(reg.col_end);
        const std::int64_t cr0 = std::max(r0, lo_r), cr1 = std::min(r1, hi_r);
        const std::int64_t cc0 = std::max(c0, lo_c), cc1 = std::min(c1, hi_c);

        if (skip) {
          for (std::int64_t r = r0; r < r1; ++r) {
            for (std::int64_t c = c0; c < c1; ++c) {
              if (r < cr0 || r >= cr1 || c < cc0 || c >= cc1) out[r * ncols + c] = in[r * ncols + c];
            }
          }
        }
        if (cr0 >= cr1 || cc0 >= cc1) return;

        if (variant == StencilVariant::staged) {
          const std::int64_t height = (r1 - r0) + 2 * R;
          const std::int64_t width = (c1 - c0) + 2 * R;
          const auto tile_h = static_cast<std::int64_t>(tc.tile_rows) + 2 * R;
          auto& buf = detail::scratch<T>(static_cast<std::size_t>(pitch * tile_h));
          for (std::int64_t sr = 0; sr < height; ++sr) {
            const std::int64_t gr = r0 - R + sr;
            T* row = buf.data() + sr * pitch;
            if (gr >= 0 && gr < nrows && c0 - R >= 0 && c1 + R <= ncols) {
              std::memcpy(row, in.data() + gr * ncols + (c0 - R), width * sizeof(T));
            } else {
              for (std::int64_t sc = 0; sc < width; ++sc) {
                row[sc] = detail::resolve(in, nrows, ncols, gr, c0 - R + sc, boundary);
              }
            }
          }
          for (std::int64_t r = cr0; r < cr1; ++r) {
            detail::accumulate_row(buf.data() + (r - r0 + R) * pitch + R + (cc0 - c0), out.data() + r * ncols + cc0,
                                   cc1 - cc0, weights.data(), scratch_offsets.data(), ntaps);
          }
        } else if (cr0 - R >= 0 && cr1 + R <= nrows && cc0 - R >= 0 && cc1 + R <= ncols) {
          for (std::int64_t r = cr0; r < cr1; ++r) {
            detail::accumulate_row(in.data() + r * ncols + cc0, out.data() + r * ncols + cc0, cc1 - cc0,
                                   weights.data(), input_offsets.data(), ntaps);
          }
        } else {
          for (std::int64_t r = cr0; r < cr1; ++r) {
            for (std::int64_t c = cc0; c < cc1; ++c) {
              T acc{};
              for (std::size_t t = 0; t < ntaps; ++t) {
                acc += weights[t] * detail::resolve(in, nrows, ncols, r + taps[t].drow, c + taps[t].dcol, boundary);
              }
              out[r * ncols + c] = acc;
            }
          }
        }
      },
      cfg.workers);
}

template <Element T>
Grid2D<T> apply_stencil(const Grid2D<T>& grid, const StencilSpec& stencil,
                        BoundaryPolicy boundary = BoundaryPolicy::zero_pad, const ExecConfig& cfg = {},
                        StencilVariant variant = StencilVariant::staged) {
  Grid2D<T> out(grid.rows(), grid.cols());
  apply_stencil_into(grid.data(), out.data(), grid.rows(), grid.cols(), stencil, boundary, cfg, variant);
  return out;
}

}  // namespace rearrange
