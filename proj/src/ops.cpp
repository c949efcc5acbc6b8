// SPDX-License-Identifier: Apache-2.0
#include "rearrange/ops.hpp"

#include <cstring>
#include <random>

#include "rearrange/kernels.hpp"
#include "rearrange/oracle.hpp"

namespace rearrange {

namespace {

std::string list_text(std::span<const index_t> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(values[i]);
  }
  return out;
}

template <Element T>
std::vector<std::span<const T>> split_arrays(std::span<const T> data, std::size_t n) {
  if (n == 0 || data.size() % n != 0) {
    throw Error(ErrorCode::spec, "tensor of " + std::to_string(data.size()) + " elements cannot hold " +
                                     std::to_string(n) + " equal arrays");
  }
  const std::size_t len = data.size() / n;
  std::vector<std::span<const T>> arrays;
  for (std::size_t a = 0; a < n; ++a) arrays.push_back(data.subspan(a * len, len));
  return arrays;
}

template <Element T>
Tensor<T> apply_typed(const OpSpec& op, const Tensor<T>& in, const ExecConfig& cfg) {
  switch (op.kind) {
    case KernelKind::copy:
      return copy_kernel(in, cfg);
    case KernelKind::permute3d:
      return permute3d(in, OrderVec(op.order), cfg);
    case KernelKind::reorder:
      return reorder(in, OrderVec(op.order), cfg);
    case KernelKind::reorder_nm:
      return reorder_nm(in, op.order, op.slice, cfg);
    case KernelKind::interlace: {
      const auto arrays = split_arrays(in.data(), op.n_arrays);
      const index_t len = arrays.front().size();
      return Tensor<T>(Shape{op.n_arrays, len}, interlace<T>(std::span<const std::span<const T>>(arrays), cfg));
    }
    case KernelKind::deinterlace: {
      const auto parts = deinterlace<T>(in.data(), op.n_arrays, cfg);
      std::vector<T> flat;
      flat.reserve(in.size());
      for (const auto& p : parts) flat.insert(flat.end(), p.begin(), p.end());
      return Tensor<T>(Shape{in.size() / op.n_arrays, op.n_arrays}, std::move(flat));
    }
    case KernelKind::stencil:
      return apply_stencil(Grid2D<T>(in), op.stencil_or_fd(), op.boundary, cfg, op.variant).release();
  }
  throw Error(ErrorCode::invalid_argument, "unknown kernel");
}

template <Element T>
Tensor<T> oracle_typed(const OpSpec& op, const Tensor<T>& in) {
  switch (op.kind) {
    case KernelKind::copy:
      return oracle::naive_copy(in);
    case KernelKind::permute3d:
      if (in.ndim() != 3) throw Error(ErrorCode::shape, "permute3d needs a 3-D tensor");
      return oracle::naive_reorder(in, OrderVec(op.order));
    case KernelKind::reorder:
      return oracle::naive_reorder(in, OrderVec(op.order));
    case KernelKind::reorder_nm:
      return oracle::naive_slice(in, op.order, op.slice);
    case KernelKind::interlace: {
      std::vector<std::vector<T>> arrays;
      for (auto a : split_arrays(in.data(), op.n_arrays)) arrays.emplace_back(a.begin(), a.end());
      const index_t len = arrays.front().size();
      return Tensor<T>(Shape{op.n_arrays, len}, oracle::naive_interlace(arrays));
    }
    case KernelKind::deinterlace: {
      const auto parts = oracle::naive_deinterlace(in.data(), op.n_arrays);
      std::vector<T> flat;
      for (const auto& p : parts) flat.insert(flat.end(), p.begin(), p.end());
      return Tensor<T>(Shape{in.size() / op.n_arrays, op.n_arrays}, std::move(flat));
    }
    case KernelKind::stencil:
      return oracle::naive_stencil(Grid2D<T>(in), op.stencil_or_fd(), op.boundary).release();
  }
  throw Error(ErrorCode::invalid_argument, "unknown kernel");
}

}  // namespace

std::string_view to_string(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::copy: return "copy";
    case KernelKind::permute3d: return "permute3d";
    case KernelKind::reorder: return "reorder";
    case KernelKind::reorder_nm: return "reorder-nm";
    case KernelKind::interlace: return "interlace";
    case KernelKind::deinterlace: return "deinterlace";
    case KernelKind::stencil: return "stencil";
  }
  return "unknown";
}

KernelKind parse_kernel(std::string_view text) {
  for (auto k : {KernelKind::copy, KernelKind::permute3d, KernelKind::reorder, KernelKind::reorder_nm,
                 KernelKind::interlace, KernelKind::deinterlace, KernelKind::stencil}) {
    if (text == to_string(k)) return k;
  }
  throw Error(ErrorCode::invalid_argument, "unknown kernel '" + std::string(text) + "'");
}

StencilSpec OpSpec::stencil_or_fd() const { return stencil ? *stencil : fd_stencil(fd_order); }

std::string OpSpec::params_text() const {
  switch (kind) {
    case KernelKind::copy:
      return "";
    case KernelKind::permute3d:
    case KernelKind::reorder:
      return "order=" + list_text(order);
    case KernelKind::reorder_nm:
      return "keep=" + list_text(order) + ";base=" + list_text(slice.base) + ";range=" + list_text(slice.range);
    case KernelKind::interlace:
    case KernelKind::deinterlace:
      return "n=" + std::to_string(n_arrays);
    case KernelKind::stencil: {
      std::string head = stencil ? "taps=" + std::to_string(stencil->taps().size()) + ";radius=" +
                                       std::to_string(stencil->radius())
                                 : "fd_order=" + std::to_string(fd_order);
      return head + ";boundary=" + std::string(to_string(boundary));
    }
  }
  return "";
}

AnyTensor apply_op(const OpSpec& op, const AnyTensor& input, const ExecConfig& cfg) {
  return std::visit([&](const auto& t) -> AnyTensor { return apply_typed(op, t, cfg); }, input);
}

AnyTensor apply_oracle(const OpSpec& op, const AnyTensor& input) {
  return std::visit([&](const auto& t) -> AnyTensor { return oracle_typed(op, t); }, input);
}

bool bit_equal(const AnyTensor& a, const AnyTensor& b) {
  if (a.index() != b.index() || !(shape_of(a) == shape_of(b))) return false;
  return std::visit(
      [&](const auto& ta) {
        using TT = std::decay_t<decltype(ta)>;
        const auto& tb = std::get<TT>(b);
        return std::memcmp(ta.data().data(), tb.data().data(), ta.data().size_bytes()) == 0;
      },
      a);
}

VerifyResult verify_op(const OpSpec& op, const AnyTensor& input, const ExecConfig& cfg) {
  const auto tiled = apply_op(op, input, cfg);
  const auto expected = apply_oracle(op, input);
  VerifyResult result;
  if (!(shape_of(tiled) == shape_of(expected))) {
    result.detail = "shape mismatch: kernel " + shape_of(tiled).to_string() + ", oracle " +
                    shape_of(expected).to_string();
    return result;
  }
  std::visit(
      [&](const auto& tt) {
        using TT = std::decay_t<decltype(tt)>;
        const auto& te = std::get<TT>(expected);
        result.elements = tt.size();
        for (index_t i = 0; i < tt.size(); ++i) {
          if (std::memcmp(&tt[i], &te[i], sizeof(tt[i])) != 0) {
            if (result.mismatches == 0) result.detail = "first mismatch at offset " + std::to_string(i);
            ++result.mismatches;
          }
        }
      },
      tiled);
  result.match = result.mismatches == 0;
  return result;
}

AnyTensor random_tensor(DType dtype, const Shape& shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto fill = [&](auto tensor) {
    using T = typename decltype(tensor)::value_type;
    std::uniform_real_distribution<T> dist(T(-1), T(1));
    for (auto& v : tensor.data()) v = dist(rng);
    return AnyTensor(std::move(tensor));
  };
  return dtype == DType::f32 ? fill(Tensor<float>(shape)) : fill(Tensor<double>(shape));
}

}  // namespace rearrange
