/* SPDX-License-Identifier: Apache-2.0 */
#ifndef REARRANGE_REARRANGE_H
#define REARRANGE_REARRANGE_H

/*
 * C interface to the rearrange kernel library.
 *
 * Objects are opaque handles created by rr_*_create / rr_*_load functions and
 * released with the matching rr_*_destroy. Every fallible call returns an
 * rr_status; on failure a description of the most recent error on the calling
 * thread is available from rr_last_error().
 *
 * Tensors use dimension-0-fastest linear storage. Output handles are written
 * only on success.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RR_API __declspec(dllexport)
#else
#define RR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rr_status {
  RR_OK = 0,
  RR_ERR_INVALID_ARGUMENT = 1,
  RR_ERR_SHAPE = 2,
  RR_ERR_PERMUTATION = 3,
  RR_ERR_SPEC = 4,
  RR_ERR_BOUNDS = 5,
  RR_ERR_SIZE_OVERFLOW = 6,
  RR_ERR_IO = 7,
  RR_ERR_FORMAT = 8,
  RR_ERR_VERIFICATION = 9,
  RR_ERR_TASK_FAILURE = 10,
  RR_ERR_ALLOCATION = 11,
  RR_ERR_INTERNAL = 12
} rr_status;

typedef enum rr_dtype { RR_F32 = 0, RR_F64 = 1 } rr_dtype;

typedef enum rr_op {
  RR_OP_COPY = 0,
  RR_OP_PERMUTE3D = 1,
  RR_OP_REORDER = 2,
  RR_OP_REORDER_NM = 3,
  RR_OP_INTERLACE = 4,
  RR_OP_DEINTERLACE = 5,
  RR_OP_STENCIL = 6
} rr_op;

typedef enum rr_boundary { RR_ZERO_PAD = 0, RR_CLAMP_TO_EDGE = 1, RR_SKIP_BORDER = 2 } rr_boundary;

typedef enum rr_variant { RR_VARIANT_STAGED = 0, RR_VARIANT_DIRECT = 1 } rr_variant;

typedef enum rr_format { RR_FORMAT_CSV = 0, RR_FORMAT_JSON = 1 } rr_format;

typedef struct rr_context rr_context;
typedef struct rr_tensor rr_tensor;
typedef struct rr_stencil rr_stencil;
typedef struct rr_report rr_report;

/* Describes one kernel invocation. Initialise with rr_op_desc_init. */
typedef struct rr_op_desc {
  rr_op op;
  /* permute3d / reorder: the order vector; reorder-nm: the keep list. */
  const size_t* order;
  size_t order_len;
  /* reorder-nm: per input dimension base index and range (slice_len = input rank). */
  const uint64_t* base;
  const uint64_t* range;
  size_t slice_len;
  /* interlace / deinterlace. */
  uint64_t n_arrays;
  /* stencil: explicit stencil (its boundary is used), or NULL to use fd_order with `boundary`. */
  const rr_stencil* stencil;
  int fd_order;
  rr_boundary boundary;
  rr_variant variant;
} rr_op_desc;

typedef struct rr_bench_case {
  rr_op_desc op;
  rr_dtype dtype;
  /* interlace / deinterlace: element count of the shape is the per-array length. */
  const uint64_t* shape;
  size_t ndim;
  uint32_t repetitions;
  uint32_t warmup;
} rr_bench_case;

typedef struct rr_report_row {
  const char* kernel;
  const char* shape;
  const char* params;
  const char* variant;
  uint64_t bytes_moved;
  double elapsed_s;
  double bandwidth_gbps;
  double baseline_gbps;
  double relative_efficiency;
} rr_report_row;

/* ---- errors ---- */
RR_API const char* rr_last_error(void);
RR_API const char* rr_status_string(rr_status status);

/* ---- execution context (worker count, tile geometry) ---- */
RR_API rr_status rr_context_create(rr_context** out);
RR_API void rr_context_destroy(rr_context* ctx);
/* workers == 0 selects the logical core count. */
RR_API rr_status rr_context_set_workers(rr_context* ctx, size_t workers);
RR_API size_t rr_context_workers(const rr_context* ctx);
RR_API rr_status rr_context_set_tiles(rr_context* ctx, uint64_t tile_rows, uint64_t tile_cols,
                                      uint64_t elements_per_work_item);

/* ---- tensors ---- */
RR_API rr_status rr_tensor_create(rr_dtype dtype, const uint64_t* sizes, size_t ndim, rr_tensor** out);
RR_API rr_status rr_tensor_from_data(rr_dtype dtype, const uint64_t* sizes, size_t ndim, const void* data,
                                     size_t data_bytes, rr_tensor** out);
RR_API rr_status rr_tensor_random(rr_dtype dtype, const uint64_t* sizes, size_t ndim, uint64_t seed,
                                  rr_tensor** out);
RR_API void rr_tensor_destroy(rr_tensor* tensor);
RR_API rr_dtype rr_tensor_dtype(const rr_tensor* tensor);
RR_API size_t rr_tensor_ndim(const rr_tensor* tensor);
RR_API uint64_t rr_tensor_size(const rr_tensor* tensor, size_t dim);
RR_API uint64_t rr_tensor_element_count(const rr_tensor* tensor);
RR_API const void* rr_tensor_data(const rr_tensor* tensor);
RR_API void* rr_tensor_mutable_data(rr_tensor* tensor);
RR_API rr_status rr_tensor_load(const char* path, rr_tensor** out);
RR_API rr_status rr_tensor_save(const rr_tensor* tensor, const char* path);
/* *equal = 1 when dtype, shape and every byte match. */
RR_API rr_status rr_tensor_equal(const rr_tensor* a, const rr_tensor* b, int* equal);

/* ---- stencils ---- */
RR_API rr_status rr_stencil_create(const int* drow, const int* dcol, const double* weight, size_t ntaps,
                                   rr_boundary boundary, rr_stencil** out);
RR_API rr_status rr_stencil_fd(int order, rr_boundary boundary, rr_stencil** out);
RR_API rr_status rr_stencil_load(const char* path, rr_stencil** out);
RR_API rr_status rr_stencil_parse(const char* text, rr_stencil** out);
RR_API void rr_stencil_destroy(rr_stencil* stencil);
RR_API size_t rr_stencil_tap_count(const rr_stencil* stencil);
RR_API int rr_stencil_radius(const rr_stencil* stencil);
RR_API rr_boundary rr_stencil_boundary(const rr_stencil* stencil);

/* ---- kernels ---- */
RR_API void rr_op_desc_init(rr_op_desc* desc, rr_op op);
RR_API rr_status rr_op_parse(const char* name, rr_op* out);
RR_API rr_status rr_apply(const rr_context* ctx, const rr_op_desc* desc, const rr_tensor* input, rr_tensor** out);
RR_API rr_status rr_apply_oracle(const rr_op_desc* desc, const rr_tensor* input, rr_tensor** out);
/* Runs kernel and oracle; *matches = 1 when bit-identical. *mismatches may be NULL. */
RR_API rr_status rr_verify(const rr_context* ctx, const rr_op_desc* desc, const rr_tensor* input, int* matches,
                           uint64_t* mismatches);

/* ---- benchmarking ---- */
RR_API rr_status rr_report_create(rr_report** out);
RR_API void rr_report_destroy(rr_report* report);
RR_API rr_status rr_bench_run_case(const rr_context* ctx, const rr_bench_case* bench_case, rr_report* report);
/* max_payload_bytes == 0 derives the cap from available memory. Failed cases are counted, not reported. */
RR_API rr_status rr_bench_run_reference_suite(const rr_context* ctx, uint64_t max_payload_bytes, uint32_t repetitions,
                                          uint32_t warmup, int progress, rr_report* report);
RR_API rr_status rr_measure_baseline(const rr_context* ctx, uint64_t total_bytes, uint32_t repetitions,
                                     double* gbps);
RR_API size_t rr_report_row_count(const rr_report* report);
RR_API size_t rr_report_failure_count(const rr_report* report);
RR_API const char* rr_report_failure(const rr_report* report, size_t index);
/* String fields stay valid until the report is modified or destroyed. */
RR_API rr_status rr_report_get_row(const rr_report* report, size_t index, rr_report_row* row);
/* Writes to `path`, or to standard output when path is NULL or "-". */
RR_API rr_status rr_report_write(const rr_report* report, rr_format format, const char* path);
/* Returns a malloc'd NUL-terminated string; release with rr_string_free. */
RR_API rr_status rr_report_format(const rr_report* report, rr_format format, char** out);
RR_API void rr_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* REARRANGE_REARRANGE_H */
