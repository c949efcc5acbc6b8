// SPDX-License-Identifier: Apache-2.0
#include "rearrange/kernels.hpp"

namespace rearrange {

std::string_view to_string(GatherPath path) noexcept {
  switch (path) {
    case GatherPath::contiguous: return "contiguous";
    case GatherPath::stream: return "stream";
    case GatherPath::staged: return "staged";
    case GatherPath::degraded: return "degraded";
  }
  return "unknown";
}

namespace {

void choose_path(GatherPlan& plan) {
  plan.out_strides = compute_strides(plan.out_shape);

  bool contiguous = true;
  for (std::size_t k = 0; k < plan.out_shape.ndim(); ++k) {
    if (plan.out_shape[k] > 1 && plan.gather_strides[k] != plan.out_strides[k]) contiguous = false;
  }
  if (contiguous) {
    plan.path = GatherPath::contiguous;
    return;
  }
  if (plan.src_dims[0] == 0) {
    plan.path = GatherPath::stream;
    return;
  }
  for (std::size_t k = 1; k < plan.src_dims.size(); ++k) {
    if (plan.src_dims[k] == 0) {
      plan.path = GatherPath::staged;
      plan.plane_dim = k;
      return;
    }
  }
  plan.path = GatherPath::degraded;
}

}  // namespace

GatherPlan plan_reorder(const Shape& in, const OrderVec& order) {
  if (order.size() != in.ndim()) {
    throw Error(ErrorCode::permutation, "order has " + std::to_string(order.size()) + " entries, tensor has " +
                                            std::to_string(in.ndim()) + " dimensions");
  }
  auto view = permuted_view_strides(in, order);
  GatherPlan plan;
  plan.in_count = in.element_count();
  plan.out_shape = std::move(view.shape);
  plan.src_dims.assign(order.values().begin(), order.values().end());
  plan.gather_strides = std::move(view.gather_strides);
  choose_path(plan);
  return plan;
}

GatherPlan plan_reorder_nm(const Shape& in, std::span<const std::size_t> keep, const SliceSpec& slice) {
  slice.validate(in, keep);
  const auto strides = compute_strides(in);
  GatherPlan plan;
  plan.in_count = in.element_count();
  std::vector<index_t> sizes;
  for (auto d : keep) {
    sizes.push_back(slice.range[d]);
    plan.src_dims.push_back(d);
    plan.gather_strides.push_back(strides[d]);
  }
  for (std::size_t d = 0; d < in.ndim(); ++d) plan.base_offset += slice.base[d] * strides[d];
  plan.out_shape = Shape(std::move(sizes));
  choose_path(plan);
  return plan;
}

namespace detail {

OffsetWalker::OffsetWalker(const GatherPlan& plan, std::vector<std::size_t> dims)
    : dims_(std::move(dims)), base_(plan.base_offset) {
  for (auto k : dims_) {
    sizes_.push_back(plan.out_shape[k]);
    in_strides_.push_back(plan.gather_strides[k]);
    out_strides_.push_back(plan.out_strides[k]);
  }
  index_.assign(dims_.size(), 0);
  in_ = base_;
}

void OffsetWalker::seek(index_t linear) {
  in_ = base_;
  out_ = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    index_[i] = linear % sizes_[i];
    linear /= sizes_[i];
    in_ += index_[i] * in_strides_[i];
    out_ += index_[i] * out_strides_[i];
  }
}

void OffsetWalker::next() {
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    ++index_[i];
    in_ += in_strides_[i];
    out_ += out_strides_[i];
    if (index_[i] < sizes_[i]) return;
    in_ -= sizes_[i] * in_strides_[i];
    out_ -= sizes_[i] * out_strides_[i];
    index_[i] = 0;
  }
}

}  // namespace detail

}  // namespace rearrange
