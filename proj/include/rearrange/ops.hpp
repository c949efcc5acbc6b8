// SPDX-License-Identifier: Apache-2.0
#pragma once

/**
 * @file ops.hpp
 * @brief Runtime dispatch of a kernel (and its reference oracle) over a dtype-erased tensor.
 *
 * Tensor conventions used when a kernel is driven from a file or the command line:
 *  - interlace: the input holds n arrays back to back (shape [len, n] is typical);
 *    the output has shape [n, len], i.e. element k of array a sits at k * n + a.
 *  - deinterlace: the input is any tensor whose element count divides by n;
 *    the output has shape [len, n] with the arrays back to back.
 *  - stencil: the input is 2-D, dimension 0 = column (fastest), dimension 1 = row.
 */

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rearrange/layout.hpp"
#include "rearrange/stencil.hpp"
#include "rearrange/stencil_spec.hpp"
#include "rearrange/tensor_io.hpp"
#include "rearrange/tile_scheduler.hpp"

namespace rearrange {

enum class KernelKind { copy, permute3d, reorder, reorder_nm, interlace, deinterlace, stencil };

std::string_view to_string(KernelKind kind) noexcept;
/// Accepts copy, permute3d, reorder, reorder-nm, interlace, deinterlace, stencil.
KernelKind parse_kernel(std::string_view text);

struct OpSpec {
  KernelKind kind = KernelKind::copy;
  /// permute3d / reorder: the order vector. reorder_nm: the keep list.
  std::vector<std::size_t> order;
  /// reorder_nm only.
  SliceSpec slice;
  /// interlace / deinterlace.
  std::size_t n_arrays = 2;
  /// stencil: explicit taps; when empty, fd_stencil(fd_order) is used.
  std::optional<StencilSpec> stencil;
  int fd_order = 1;
  BoundaryPolicy boundary = BoundaryPolicy::zero_pad;
  StencilVariant variant = StencilVariant::staged;

  [[nodiscard]] StencilSpec stencil_or_fd() const;
  /// Short description for reports, e.g. "order=1 0 2" or "n=4".
  [[nodiscard]] std::string params_text() const;
};

AnyTensor apply_op(const OpSpec& op, const AnyTensor& input, const ExecConfig& cfg = {});
AnyTensor apply_oracle(const OpSpec& op, const AnyTensor& input);

struct VerifyResult {
  bool match = false;
  index_t elements = 0;
  index_t mismatches = 0;
  std::string detail;
};

/// Runs the tiled kernel and the oracle on `input` and compares the outputs bit for bit.
VerifyResult verify_op(const OpSpec& op, const AnyTensor& input, const ExecConfig& cfg = {});

/// Tensor of `shape` filled with uniform values in [-1, 1) from a seeded generator.
AnyTensor random_tensor(DType dtype, const Shape& shape, std::uint64_t seed);

/// Byte-for-byte equality (NaN payloads and signed zeros included).
bool bit_equal(const AnyTensor& a, const AnyTensor& b);

}  // namespace rearrange
