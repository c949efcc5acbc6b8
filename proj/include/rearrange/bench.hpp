// SPDX-License-Identifier: Apache-2.0
#pragma once

/**
 * @file bench.hpp
 * @brief Effective-bandwidth measurement relative to a plain-copy baseline.
 *
 * Conventions:
 *  - bytes_moved = 2 x payload bytes (one read and one write per element). For stencils the
 *    payload is the grid; apron re-reads are overhead and are not credited.
 *  - bandwidth is bytes_moved / elapsed in GB/s with GB = 1e9 bytes.
 *  - elapsed is the median over `repetitions` timed runs after `warmup` discarded runs,
 *    measured with a monotonic clock on preallocated buffers.
 *  - the baseline is the tiled copy kernel moving the same number of bytes. Its runs are
 *    interleaved with the case's runs; relative_efficiency = bandwidth / baseline.
 *  - every case is checked against its oracle once before timing; a mismatch raises
 *    ErrorCode::verification and the case produces no row.
 */

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rearrange/ops.hpp"

namespace rearrange {

/// Timing below this many moved bytes is dominated by noise.
inline constexpr index_t kMinBenchBytes = index_t{1} << 20;

struct BenchmarkCase {
  OpSpec op;
  /// Input shape. interlace/deinterlace: element count is the per-array length.
  /// stencil: [cols, rows].
  Shape shape{1};
  DType dtype = DType::f32;
  unsigned repetitions = 10;
  unsigned warmup = 3;
  std::uint64_t seed = 0x5eed;
};

struct ReportRow {
  std::string kernel;
  std::string shape;
  std::string params;
  std::string variant;
  std::uint64_t bytes_moved = 0;
  double elapsed_s = 0.0;
  double bandwidth_gbps = 0.0;
  double baseline_gbps = 0.0;
  double relative_efficiency = 0.0;
};

inline constexpr std::array<std::string_view, 9> kReportColumns = {
    "kernel",    "shape",       "params",         "variant",          "bytes_moved",
    "elapsed_s", "bandwidth_gbps", "baseline_gbps", "relative_efficiency"};

double bandwidth_gbps(std::uint64_t bytes, double seconds);
double median(std::vector<double> samples);

/// Median wall time of `fn` over `reps` runs after `warmup` discarded runs.
double time_median(const std::function<void()>& fn, unsigned warmup, unsigned reps);

/// Bytes a case moves under the 2 x payload convention.
std::uint64_t bytes_moved(const BenchmarkCase& bench_case);

/// Copy-kernel bandwidth (GB/s) for `total_bytes` moved (half read, half written).
double measure_baseline(std::uint64_t total_bytes, unsigned reps, const ExecConfig& cfg = {}, unsigned warmup = 3,
                        DType dtype = DType::f32);

ReportRow run_case(const BenchmarkCase& bench_case, const ExecConfig& cfg = {});

/// Times an arbitrary workload. `verify` runs first; false raises ErrorCode::verification.
ReportRow measure_case(ReportRow identity, const std::function<bool()>& verify, const std::function<void()>& run,
                       DType dtype, unsigned warmup, unsigned reps, const ExecConfig& cfg = {});

struct SuiteOptions {
  /// Cap on payload bytes per case; 0 derives a cap from available memory.
  std::uint64_t max_payload_bytes = 0;
  unsigned repetitions = 10;
  unsigned warmup = 3;
};

/// Reference workloads: copy size sweep, the six 3-D permutations of 128x256x512,
/// four generic reorders, interlace/deinterlace of 4..9 arrays and finite-difference stencils
/// of orders 1..4 on 4096x4096. Shapes shrink until each case fits the payload cap.
std::vector<BenchmarkCase> reference_suite(const SuiteOptions& options = {});

/// Halves the largest dimension until the case payload fits `max_payload_bytes`.
BenchmarkCase scale_to_fit(BenchmarkCase bench_case, std::uint64_t max_payload_bytes);

std::uint64_t available_memory_bytes();

struct SuiteResult {
  std::vector<ReportRow> rows;
  /// One message per case that failed (verification or otherwise); such cases have no row.
  std::vector<std::string> failures;
};

SuiteResult run_cases(std::span<const BenchmarkCase> cases, const ExecConfig& cfg = {},
                      const std::function<void(const ReportRow&)>& on_row = {});

enum class ReportFormat { csv, json };

ReportFormat parse_report_format(std::string_view text);
void write_report(std::ostream& out, std::span<const ReportRow> rows, ReportFormat format);
std::string format_report(std::span<const ReportRow> rows, ReportFormat format);

}  // namespace rearrange
