// SPDX-License-Identifier: Apache-2.0
#include "rearrange/rearrange.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <new>
#include <string>

#include "rearrange/bench.hpp"
#include "rearrange/ops.hpp"
#include "rearrange/tensor_io.hpp"

struct rr_context {
  rearrange::ExecConfig cfg;
};

struct rr_tensor {
  rearrange::AnyTensor value;
};

struct rr_stencil {
  rearrange::StencilFile file;
};

struct rr_report {
  rearrange::SuiteResult result;
};

namespace {

thread_local std::string g_last_error;

rr_status to_status(rearrange::ErrorCode code) {
  using rearrange::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return RR_ERR_INVALID_ARGUMENT;
    case ErrorCode::shape: return RR_ERR_SHAPE;
    case ErrorCode::permutation: return RR_ERR_PERMUTATION;
    case ErrorCode::spec: return RR_ERR_SPEC;
    case ErrorCode::bounds: return RR_ERR_BOUNDS;
    case ErrorCode::size_overflow: return RR_ERR_SIZE_OVERFLOW;
    case ErrorCode::io: return RR_ERR_IO;
    case ErrorCode::format: return RR_ERR_FORMAT;
    case ErrorCode::verification: return RR_ERR_VERIFICATION;
    case ErrorCode::task_failure: return RR_ERR_TASK_FAILURE;
  }
  return RR_ERR_INTERNAL;
}

template <class F>
rr_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return RR_OK;
  } catch (const rearrange::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RR_ERR_ALLOCATION;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RR_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw rearrange::Error(rearrange::ErrorCode::invalid_argument, what);
}

rearrange::DType to_dtype(rr_dtype d) {
  require(d == RR_F32 || d == RR_F64, "unknown dtype");
  return d == RR_F32 ? rearrange::DType::f32 : rearrange::DType::f64;
}

rearrange::Shape to_shape(const uint64_t* sizes, size_t ndim) {
  require(sizes != nullptr || ndim == 0, "sizes must not be NULL");
  return rearrange::Shape(std::vector<rearrange::index_t>(sizes, sizes + ndim));
}

rearrange::BoundaryPolicy to_boundary(rr_boundary b) {
  switch (b) {
    case RR_ZERO_PAD: return rearrange::BoundaryPolicy::zero_pad;
    case RR_CLAMP_TO_EDGE: return rearrange::BoundaryPolicy::clamp_to_edge;
    case RR_SKIP_BORDER: return rearrange::BoundaryPolicy::skip_border;
  }
  throw rearrange::Error(rearrange::ErrorCode::invalid_argument, "unknown boundary policy");
}

rr_boundary from_boundary(rearrange::BoundaryPolicy b) {
  switch (b) {
    case rearrange::BoundaryPolicy::zero_pad: return RR_ZERO_PAD;
    case rearrange::BoundaryPolicy::clamp_to_edge: return RR_CLAMP_TO_EDGE;
    case rearrange::BoundaryPolicy::skip_border: return RR_SKIP_BORDER;
  }
  return RR_ZERO_PAD;
}

rearrange::OpSpec to_op_spec(const rr_op_desc* desc) {
  using rearrange::KernelKind;
  require(desc != nullptr, "operation descriptor must not be NULL");
  rearrange::OpSpec op;
  switch (desc->op) {
    case RR_OP_COPY: op.kind = KernelKind::copy; break;
    case RR_OP_PERMUTE3D: op.kind = KernelKind::permute3d; break;
    case RR_OP_REORDER: op.kind = KernelKind::reorder; break;
    case RR_OP_REORDER_NM: op.kind = KernelKind::reorder_nm; break;
    case RR_OP_INTERLACE: op.kind = KernelKind::interlace; break;
    case RR_OP_DEINTERLACE: op.kind = KernelKind::deinterlace; break;
    case RR_OP_STENCIL: op.kind = KernelKind::stencil; break;
    default: require(false, "unknown operation");
  }
  require(desc->order != nullptr || desc->order_len == 0, "order must not be NULL");
  op.order.assign(desc->order, desc->order + desc->order_len);
  if (desc->slice_len) {
    require(desc->base != nullptr && desc->range != nullptr, "slice base/range must not be NULL");
    op.slice.base.assign(desc->base, desc->base + desc->slice_len);
    op.slice.range.assign(desc->range, desc->range + desc->slice_len);
  }
  op.n_arrays = static_cast<std::size_t>(desc->n_arrays);
  if (desc->stencil) {
    op.stencil = desc->stencil->file.stencil;
    op.boundary = desc->stencil->file.boundary;
  } else {
    op.fd_order = desc->fd_order;
    op.boundary = to_boundary(desc->boundary);
  }
  require(desc->variant == RR_VARIANT_STAGED || desc->variant == RR_VARIANT_DIRECT, "unknown stencil variant");
  op.variant = desc->variant == RR_VARIANT_STAGED ? rearrange::StencilVariant::staged
                                                  : rearrange::StencilVariant::direct;
  return op;
}

const rearrange::ExecConfig& config_of(const rr_context* ctx) {
  static const rearrange::ExecConfig defaults{};
  return ctx ? ctx->cfg : defaults;
}

template <class T>
void emit(T** out, T* value) {
  require(out != nullptr, "output pointer must not be NULL");
  *out = value;
}

}  // namespace

extern "C" {

const char* rr_last_error(void) { return g_last_error.c_str(); }

const char* rr_status_string(rr_status status) {
  switch (status) {
    case RR_OK: return "ok";
    case RR_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RR_ERR_SHAPE: return "shape error";
    case RR_ERR_PERMUTATION: return "permutation error";
    case RR_ERR_SPEC: return "specification error";
    case RR_ERR_BOUNDS: return "bounds error";
    case RR_ERR_SIZE_OVERFLOW: return "size overflow";
    case RR_ERR_IO: return "i/o error";
    case RR_ERR_FORMAT: return "format error";
    case RR_ERR_VERIFICATION: return "verification failure";
    case RR_ERR_TASK_FAILURE: return "task failure";
    case RR_ERR_ALLOCATION: return "allocation failure";
    case RR_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

rr_status rr_context_create(rr_context** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer must not be NULL");
    *out = new rr_context{};
  });
}

void rr_context_destroy(rr_context* ctx) { delete ctx; }

rr_status rr_context_set_workers(rr_context* ctx, size_t workers) {
  return guarded([&] {
    require(ctx != nullptr, "context must not be NULL");
    ctx->cfg.workers = workers ? workers : rearrange::default_worker_count();
  });
}

size_t rr_context_workers(const rr_context* ctx) { return config_of(ctx).workers; }

rr_status rr_context_set_tiles(rr_context* ctx, uint64_t tile_rows, uint64_t tile_cols,
                               uint64_t elements_per_work_item) {
  return guarded([&] {
    require(ctx != nullptr, "context must not be NULL");
    rearrange::TileConfig tiles{tile_rows, tile_cols, elements_per_work_item};
    tiles.validate();
    ctx->cfg.tiles = tiles;
  });
}

rr_status rr_tensor_create(rr_dtype dtype, const uint64_t* sizes, size_t ndim, rr_tensor** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer must not be NULL");
    auto shape = to_shape(sizes, ndim);
    if (to_dtype(dtype) == rearrange::DType::f32) {
      *out = new rr_tensor{rearrange::Tensor<float>(std::move(shape))};
    } else {
      *out = new rr_tensor{rearrange::Tensor<double>(std::move(shape))};
    }
  });
}

rr_status rr_tensor_from_data(rr_dtype dtype, const uint64_t* sizes, size_t ndim, const void* data,
                              size_t data_bytes, rr_tensor** out) {
  rr_tensor* t = nullptr;
  if (auto s = rr_tensor_create(dtype, sizes, ndim, &t); s != RR_OK) return s;
  return guarded([&] {
    std::unique_ptr<rr_tensor> owner(t);
    void* dst = rr_tensor_mutable_data(t);
    const auto bytes = rearrange::shape_of(t->value).element_count() *
                       rearrange::element_size(rearrange::dtype_of(t->value));
    require(data_bytes == bytes, "data size does not match shape and dtype");
    require(data != nullptr || bytes == 0, "data must not be NULL");
    std::memcpy(dst, data, bytes);
    emit(out, owner.release());
  });
}

rr_status rr_tensor_random(rr_dtype dtype, const uint64_t* sizes, size_t ndim, uint64_t seed, rr_tensor** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer must not be NULL");
    *out = new rr_tensor{rearrange::random_tensor(to_dtype(dtype), to_shape(sizes, ndim), seed)};
  });
}

void rr_tensor_destroy(rr_tensor* tensor) { delete tensor; }

rr_dtype rr_tensor_dtype(const rr_tensor* tensor) {
  return rearrange::dtype_of(tensor->value) == rearrange::DType::f32 ? RR_F32 : RR_F64;
}

size_t rr_tensor_ndim(const rr_tensor* tensor) { return rearrange::shape_of(tensor->value).ndim(); }

uint64_t rr_tensor_size(const rr_tensor* tensor, size_t dim) {
  const auto& shape = rearrange::shape_of(tensor->value);
  return dim < shape.ndim() ? shape[dim] : 0;
}

uint64_t rr_tensor_element_count(const rr_tensor* tensor) {
  return rearrange::shape_of(tensor->value).element_count();
}

const void* rr_tensor_data(const rr_tensor* tensor) {
  return std::visit([](const auto& t) -> const void* { return t.data().data(); }, tensor->value);
}

void* rr_tensor_mutable_data(rr_tensor* tensor) {
  return std::visit([](auto& t) -> void* { return t.data().data(); }, tensor->value);
}

rr_status rr_tensor_load(const char* path, rr_tensor** out) {
  return guarded([&] {
    require(path != nullptr, "path must not be NULL");
    emit(out, new rr_tensor{rearrange::load_rrt(path)});
  });
}

rr_status rr_tensor_save(const rr_tensor* tensor, const char* path) {
  return guarded([&] {
    require(tensor != nullptr && path != nullptr, "tensor and path must not be NULL");
    rearrange::save_rrt(path, tensor->value);
  });
}

rr_status rr_tensor_equal(const rr_tensor* a, const rr_tensor* b, int* equal) {
  return guarded([&] {
    require(a != nullptr && b != nullptr && equal != nullptr, "arguments must not be NULL");
    *equal = rearrange::bit_equal(a->value, b->value) ? 1 : 0;
  });
}

rr_status rr_stencil_create(const int* drow, const int* dcol, const double* weight, size_t ntaps,
                            rr_boundary boundary, rr_stencil** out) {
  return guarded([&] {
    require(ntaps == 0 || (drow && dcol && weight), "tap arrays must not be NULL");
    std::vector<rearrange::Tap> taps;
    for (size_t i = 0; i < ntaps; ++i) taps.push_back({drow[i], dcol[i], weight[i]});
    emit(out, new rr_stencil{{rearrange::StencilSpec(std::move(taps)), to_boundary(boundary)}});
  });
}

rr_status rr_stencil_fd(int order, rr_boundary boundary, rr_stencil** out) {
  return guarded([&] { emit(out, new rr_stencil{{rearrange::fd_stencil(order), to_boundary(boundary)}}); });
}

rr_status rr_stencil_load(const char* path, rr_stencil** out) {
  return guarded([&] {
    require(path != nullptr, "path must not be NULL");
    emit(out, new rr_stencil{rearrange::load_stencil_file(path)});
  });
}

rr_status rr_stencil_parse(const char* text, rr_stencil** out) {
  return guarded([&] {
    require(text != nullptr, "text must not be NULL");
    emit(out, new rr_stencil{rearrange::parse_stencil_text(text)});
  });
}

void rr_stencil_destroy(rr_stencil* stencil) { delete stencil; }

size_t rr_stencil_tap_count(const rr_stencil* stencil) { return stencil->file.stencil.taps().size(); }

int rr_stencil_radius(const rr_stencil* stencil) { return stencil->file.stencil.radius(); }

rr_boundary rr_stencil_boundary(const rr_stencil* stencil) { return from_boundary(stencil->file.boundary); }

void rr_op_desc_init(rr_op_desc* desc, rr_op op) {
  if (!desc) return;
  *desc = rr_op_desc{};
  desc->op = op;
  desc->n_arrays = 2;
  desc->fd_order = 1;
  desc->boundary = RR_ZERO_PAD;
  desc->variant = RR_VARIANT_STAGED;
}

rr_status rr_op_parse(const char* name, rr_op* out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "arguments must not be NULL");
    using rearrange::KernelKind;
    switch (rearrange::parse_kernel(name)) {
      case KernelKind::copy: *out = RR_OP_COPY; break;
      case KernelKind::permute3d: *out = RR_OP_PERMUTE3D; break;
      case KernelKind::reorder: *out = RR_OP_REORDER; break;
      case KernelKind::reorder_nm: *out = RR_OP_REORDER_NM; break;
      case KernelKind::interlace: *out = RR_OP_INTERLACE; break;
      case KernelKind::deinterlace: *out = RR_OP_DEINTERLACE; break;
      case KernelKind::stencil: *out = RR_OP_STENCIL; break;
    }
  });
}

rr_status rr_apply(const rr_context* ctx, const rr_op_desc* desc, const rr_tensor* input, rr_tensor** out) {
  return guarded([&] {
    require(input != nullptr, "input must not be NULL");
    auto result = rearrange::apply_op(to_op_spec(desc), input->value, config_of(ctx));
    emit(out, new rr_tensor{std::move(result)});
  });
}

rr_status rr_apply_oracle(const rr_op_desc* desc, const rr_tensor* input, rr_tensor** out) {
  return guarded([&] {
    require(input != nullptr, "input must not be NULL");
    auto result = rearrange::apply_oracle(to_op_spec(desc), input->value);
    emit(out, new rr_tensor{std::move(result)});
  });
}

rr_status rr_verify(const rr_context* ctx, const rr_op_desc* desc, const rr_tensor* input, int* matches,
                    uint64_t* mismatches) {
  return guarded([&] {
    require(input != nullptr && matches != nullptr, "arguments must not be NULL");
    const auto r = rearrange::verify_op(to_op_spec(desc), input->value, config_of(ctx));
    *matches = r.match ? 1 : 0;
    if (mismatches) *mismatches = r.match ? 0 : std::max<uint64_t>(r.mismatches, 1);
  });
}

rr_status rr_report_create(rr_report** out) {
  return guarded([&] { emit(out, new rr_report{}); });
}

void rr_report_destroy(rr_report* report) { delete report; }

rr_status rr_bench_run_case(const rr_context* ctx, const rr_bench_case* bench_case, rr_report* report) {
  return guarded([&] {
    require(bench_case != nullptr && report != nullptr, "arguments must not be NULL");
    rearrange::BenchmarkCase c;
    c.op = to_op_spec(&bench_case->op);
    c.shape = to_shape(bench_case->shape, bench_case->ndim);
    c.dtype = to_dtype(bench_case->dtype);
    c.repetitions = bench_case->repetitions;
    c.warmup = bench_case->warmup;
    report->result.rows.push_back(rearrange::run_case(c, config_of(ctx)));
  });
}

rr_status rr_bench_run_reference_suite(const rr_context* ctx, uint64_t max_payload_bytes, uint32_t repetitions,
                                   uint32_t warmup, int progress, rr_report* report) {
  return guarded([&] {
    require(report != nullptr, "report must not be NULL");
    require(repetitions >= 1, "repetitions must be >= 1");
    rearrange::SuiteOptions options{max_payload_bytes, repetitions, warmup};
    const auto cases = rearrange::reference_suite(options);
    std::size_t done = 0;
    auto on_row = [&](const rearrange::ReportRow& row) {
      if (!progress) return;
      std::cerr << "[" << ++done << "/" << cases.size() << "] " << row.kernel << " " << row.shape << " "
                << row.params << ": " << row.bandwidth_gbps << " GB/s (" << row.relative_efficiency
                << " of copy)\n";
    };
    auto result = rearrange::run_cases(cases, config_of(ctx), on_row);
    for (auto& r : result.rows) report->result.rows.push_back(std::move(r));
    for (auto& f : result.failures) report->result.failures.push_back(std::move(f));
  });
}

rr_status rr_measure_baseline(const rr_context* ctx, uint64_t total_bytes, uint32_t repetitions, double* gbps) {
  return guarded([&] {
    require(gbps != nullptr, "output pointer must not be NULL");
    *gbps = rearrange::measure_baseline(total_bytes, repetitions, config_of(ctx));
  });
}

size_t rr_report_row_count(const rr_report* report) { return report->result.rows.size(); }

size_t rr_report_failure_count(const rr_report* report) { return report->result.failures.size(); }

const char* rr_report_failure(const rr_report* report, size_t index) {
  return index < report->result.failures.size() ? report->result.failures[index].c_str() : nullptr;
}

rr_status rr_report_get_row(const rr_report* report, size_t index, rr_report_row* row) {
  return guarded([&] {
    require(report != nullptr && row != nullptr, "arguments must not be NULL");
    if (index >= report->result.rows.size()) {
      throw rearrange::Error(rearrange::ErrorCode::bounds, "report row index out of range");
    }
    const auto& r = report->result.rows[index];
    *row = {r.kernel.c_str(), r.shape.c_str(),    r.params.c_str(),   r.variant.c_str(),       r.bytes_moved,
            r.elapsed_s,      r.bandwidth_gbps,   r.baseline_gbps,    r.relative_efficiency};
  });
}

rr_status rr_report_write(const rr_report* report, rr_format format, const char* path) {
  return guarded([&] {
    require(report != nullptr, "report must not be NULL");
    require(format == RR_FORMAT_CSV || format == RR_FORMAT_JSON, "unknown report format");
    const auto fmt = format == RR_FORMAT_CSV ? rearrange::ReportFormat::csv : rearrange::ReportFormat::json;
    if (path == nullptr || std::strcmp(path, "-") == 0) {
      rearrange::write_report(std::cout, report->result.rows, fmt);
      std::cout.flush();
      return;
    }
    std::ofstream out(path);
    if (!out) throw rearrange::Error(rearrange::ErrorCode::io, std::string("cannot open ") + path);
    rearrange::write_report(out, report->result.rows, fmt);
  });
}

rr_status rr_report_format(const rr_report* report, rr_format format, char** out) {
  return guarded([&] {
    require(report != nullptr && out != nullptr, "arguments must not be NULL");
    require(format == RR_FORMAT_CSV || format == RR_FORMAT_JSON, "unknown report format");
    const auto text = rearrange::format_report(
        report->result.rows, format == RR_FORMAT_CSV ? rearrange::ReportFormat::csv : rearrange::ReportFormat::json);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

void rr_string_free(char* s) { std::free(s); }

}  // extern "C"
