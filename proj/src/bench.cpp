// SPDX-License-Identifier: Apache-2.0
#include "rearrange/bench.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <new>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "rearrange/kernels.hpp"
#include "rearrange/stencil.hpp"

namespace rearrange {

namespace {

std::uint64_t payload_elements(const BenchmarkCase& c) {
  switch (c.op.kind) {
    case KernelKind::interlace:
    case KernelKind::deinterlace:
      return c.shape.element_count() * c.op.n_arrays;
    case KernelKind::reorder_nm: {
      std::uint64_t n = 1;
      for (auto d : c.op.order) n *= c.op.slice.range.at(d);
      return n;
    }
    default:
      return c.shape.element_count();
  }
}

Shape input_shape(const BenchmarkCase& c) {
  if (c.op.kind == KernelKind::interlace || c.op.kind == KernelKind::deinterlace) {
    return Shape{c.shape.element_count() * c.op.n_arrays};
  }
  return c.shape;
}

template <Element T>
ReportRow run_typed(const BenchmarkCase& bc, const ExecConfig& cfg) {
  const OpSpec& op = bc.op;
  ReportRow identity;
  identity.kernel = std::string(to_string(op.kind));
  identity.shape = bc.shape.to_string();
  identity.params = op.params_text();
  identity.bytes_moved = bytes_moved(bc);

  const AnyTensor input = random_tensor(bc.dtype, input_shape(bc), bc.seed);
  const auto& in = std::get<Tensor<T>>(input);
  auto verify = [&] { return verify_op(op, input, cfg).match; };

  switch (op.kind) {
    case KernelKind::copy: {
      identity.variant = to_string(GatherPath::contiguous);
      std::vector<T> out(in.size());
      return measure_case(identity, verify, [&] { copy_into<T>(in.data(), out, cfg); }, bc.dtype, bc.warmup,
                          bc.repetitions, cfg);
    }
    case KernelKind::permute3d:
    case KernelKind::reorder:
    case KernelKind::reorder_nm: {
      if (op.kind == KernelKind::permute3d && bc.shape.ndim() != 3) {
        throw Error(ErrorCode::shape, "permute3d needs a 3-D shape");
      }
      const auto plan = op.kind == KernelKind::reorder_nm ? plan_reorder_nm(bc.shape, op.order, op.slice)
                                                          : plan_reorder(bc.shape, OrderVec(op.order));
      identity.variant = to_string(plan.path);
      std::vector<T> out(plan.out_shape.element_count());
      return measure_case(identity, verify, [&] { execute_gather<T>(plan, in.data(), out, cfg); }, bc.dtype,
                          bc.warmup, bc.repetitions, cfg);
    }
    case KernelKind::interlace: {
      identity.variant = "staged";
      const std::size_t n = op.n_arrays;
      const index_t len = bc.shape.element_count();
      std::vector<std::span<const T>> arrays;
      for (std::size_t a = 0; a < n; ++a) arrays.push_back(in.data().subspan(a * len, len));
      std::vector<T> out(n * len);
      return measure_case(
          identity, verify,
          [&] { interlace_into<T>(std::span<const std::span<const T>>(arrays), out, cfg); }, bc.dtype, bc.warmup,
          bc.repetitions, cfg);
    }
    case KernelKind::deinterlace: {
      identity.variant = "staged";
      const std::size_t n = op.n_arrays;
      const index_t len = bc.shape.element_count();
      std::vector<T> flat(n * len);
      std::vector<std::span<T>> outs;
      for (std::size_t a = 0; a < n; ++a) outs.push_back(std::span<T>(flat).subspan(a * len, len));
      return measure_case(
          identity, verify, [&] { deinterlace_into<T>(in.data(), std::span<const std::span<T>>(outs), cfg); },
          bc.dtype, bc.warmup, bc.repetitions, cfg);
    }
    case KernelKind::stencil: {
      if (bc.shape.ndim() != 2) throw Error(ErrorCode::shape, "stencil needs a 2-D shape");
      identity.variant = std::string(to_string(op.variant));
      const auto stencil = op.stencil_or_fd();
      const index_t cols = bc.shape[0], rows = bc.shape[1];
      std::vector<T> out(in.size());
      return measure_case(
          identity, verify,
          [&] { apply_stencil_into<T>(in.data(), out, rows, cols, stencil, op.boundary, cfg, op.variant); },
          bc.dtype, bc.warmup, bc.repetitions, cfg);
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown kernel");
}

BenchmarkCase make_case(KernelKind kind, Shape shape, const SuiteOptions& options) {
  BenchmarkCase c;
  c.op.kind = kind;
  c.shape = std::move(shape);
  c.repetitions = options.repetitions;
  c.warmup = options.warmup;
  return c;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double bandwidth_gbps(std::uint64_t bytes, double seconds) {
  if (!(seconds > 0.0)) throw Error(ErrorCode::invalid_argument, "elapsed time must be positive");
  return static_cast<double>(bytes) / seconds / 1e9;
}

double median(std::vector<double> samples) {
  if (samples.empty()) throw Error(ErrorCode::invalid_argument, "median of no samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

double time_median(const std::function<void()>& fn, unsigned warmup, unsigned reps) {
  if (reps == 0) throw Error(ErrorCode::invalid_argument, "repetitions must be >= 1");
  for (unsigned i = 0; i < warmup; ++i) fn();
  std::vector<double> samples;
  samples.reserve(reps);
  for (unsigned i = 0; i < reps; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    samples.push_back(std::max(std::chrono::duration<double>(stop - start).count(), 1e-9));
  }
  return median(std::move(samples));
}

std::uint64_t bytes_moved(const BenchmarkCase& bench_case) {
  return 2 * payload_elements(bench_case) * element_size(bench_case.dtype);
}

namespace {

// Source and destination buffers for a copy of `total_bytes` moved.
class CopyWorkload {
 public:
  CopyWorkload(std::uint64_t total_bytes, DType dtype, const ExecConfig& cfg) : cfg_(cfg) {
    if (total_bytes < kMinBenchBytes) {
      throw Error(ErrorCode::invalid_argument, "baseline needs at least 1 MiB moved, got " +
                                                   std::to_string(total_bytes) + " bytes");
    }
    if (dtype == DType::f32) {
      f32_.assign(total_bytes / 2 / sizeof(float) * 2, 1.0f);
      bytes_ = f32_.size() * sizeof(float);
    } else {
      f64_.assign(total_bytes / 2 / sizeof(double) * 2, 1.0);
      bytes_ = f64_.size() * sizeof(double);
    }
  }

  void operator()() {
    if (!f32_.empty()) {
      run(std::span<float>(f32_));
    } else {
      run(std::span<double>(f64_));
    }
  }

  [[nodiscard]] std::uint64_t bytes_moved() const noexcept { return bytes_; }

 private:
  template <class T>
  void run(std::span<T> both) {
    const auto half = both.size() / 2;
    copy_into<T>(both.first(half), both.subspan(half), cfg_);
  }

  ExecConfig cfg_;
  std::vector<float> f32_;
  std::vector<double> f64_;
  std::uint64_t bytes_ = 0;
};

}  // namespace

double measure_baseline(std::uint64_t total_bytes, unsigned reps, const ExecConfig& cfg, unsigned warmup,
                        DType dtype) {
  CopyWorkload copy(total_bytes, dtype, cfg);
  return bandwidth_gbps(copy.bytes_moved(), time_median(std::ref(copy), warmup, reps));
}

ReportRow measure_case(ReportRow identity, const std::function<bool()>& verify, const std::function<void()>& run,
                       DType dtype, unsigned warmup, unsigned reps, const ExecConfig& cfg) {
  if (identity.bytes_moved < kMinBenchBytes) {
    throw Error(ErrorCode::invalid_argument, "benchmark case moves " + std::to_string(identity.bytes_moved) +
                                                 " bytes; at least 1 MiB is needed for stable timing");
  }
  if (!verify()) {
    throw Error(ErrorCode::verification,
                identity.kernel + " " + identity.shape + " " + identity.params + ": output differs from oracle");
  }
  if (reps == 0) throw Error(ErrorCode::invalid_argument, "repetitions must be >= 1");
  ReportRow row = std::move(identity);
  CopyWorkload copy(row.bytes_moved, dtype, cfg);
  // Alternate case and baseline runs so drift in machine load hits both alike.
  for (unsigned i = 0; i < warmup; ++i) {
    run();
    copy();
  }
  std::vector<double> kernel_s, copy_s;
  auto timed = [](auto&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::max(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1e-9);
  };
  for (unsigned i = 0; i < reps; ++i) {
    kernel_s.push_back(timed(run));
    copy_s.push_back(timed(copy));
  }
  row.elapsed_s = median(std::move(kernel_s));
  row.bandwidth_gbps = bandwidth_gbps(row.bytes_moved, row.elapsed_s);
  row.baseline_gbps = bandwidth_gbps(copy.bytes_moved(), median(std::move(copy_s)));
  row.relative_efficiency = row.bandwidth_gbps / row.baseline_gbps;
  return row;
}

ReportRow run_case(const BenchmarkCase& bench_case, const ExecConfig& cfg) {
  if (bench_case.repetitions == 0) throw Error(ErrorCode::invalid_argument, "repetitions must be >= 1");
  return bench_case.dtype == DType::f32 ? run_typed<float>(bench_case, cfg) : run_typed<double>(bench_case, cfg);
}

BenchmarkCase scale_to_fit(BenchmarkCase c, std::uint64_t max_payload_bytes) {
  while (bytes_moved(c) / 2 > max_payload_bytes) {
    std::vector<index_t> sizes(c.shape.sizes().begin(), c.shape.sizes().end());
    auto largest = std::max_element(sizes.begin(), sizes.end());
    if (*largest <= 1) break;
    *largest /= 2;
    c.shape = Shape(std::move(sizes));
  }
  return c;
}

std::uint64_t available_memory_bytes() {
  std::ifstream meminfo("/proc/meminfo");
  std::string key;
  std::uint64_t value = 0;
  std::string unit;
  while (meminfo >> key >> value >> unit) {
    if (key == "MemAvailable:") return value * 1024;
  }
  const long pages = sysconf(_SC_AVPHYS_PAGES);
  const long page = sysconf(_SC_PAGE_SIZE);
  return pages > 0 && page > 0 ? static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page)
                               : std::uint64_t{1} << 30;
}

std::vector<BenchmarkCase> reference_suite(const SuiteOptions& options) {
  // A case holds input, output, oracle output and baseline buffers at once; keep well clear of memory.
  std::uint64_t cap = available_memory_bytes() / 6;
  if (options.max_payload_bytes) cap = std::min(cap, options.max_payload_bytes);

  std::vector<BenchmarkCase> cases;

  // Copy bandwidth over a sweep of sizes (1 MiB .. 64 MiB payload).
  for (index_t n : {index_t{1} << 18, index_t{1} << 20, index_t{1} << 22, index_t{1} << 24}) {
    cases.push_back(make_case(KernelKind::copy, Shape{n}, options));
  }

  // All six orders of a 128x256x512 volume.
  const std::vector<std::vector<std::size_t>> orders3{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& order : orders3) {
    auto c = make_case(KernelKind::permute3d, Shape{128, 256, 512}, options);
    c.op.order = order;
    cases.push_back(c);
  }

  // Generic reorders of ~2^24 elements with 3, 4 and 5 dimensions.
  const std::vector<std::pair<std::vector<std::size_t>, Shape>> reorders = {
      {{1, 0, 2}, Shape{256, 256, 256}},
      {{1, 0, 2, 3}, Shape{256, 256, 256, 1}},
      {{3, 2, 0, 1}, Shape{256, 256, 1, 256}},
      {{3, 0, 2, 1, 4}, Shape{256, 16, 1, 256, 16}},
  };
  for (const auto& [order, shape] : reorders) {
    auto c = make_case(KernelKind::reorder, shape, options);
    c.op.order = order;
    cases.push_back(c);
  }

  // 4..9 arrays of 2^24 elements each.
  for (auto kind : {KernelKind::interlace, KernelKind::deinterlace}) {
    for (std::size_t n = 4; n <= 9; ++n) {
      auto c = make_case(kind, Shape{index_t{1} << 24}, options);
      c.op.n_arrays = n;
      cases.push_back(c);
    }
  }

  // Finite-difference stencils on a 4096x4096 grid, both apron-loading variants for order 1.
  for (int order = 1; order <= 4; ++order) {
    auto c = make_case(KernelKind::stencil, Shape{4096, 4096}, options);
    c.op.fd_order = order;
    cases.push_back(c);
  }
  {
    auto c = make_case(KernelKind::stencil, Shape{4096, 4096}, options);
    c.op.variant = StencilVariant::direct;
    cases.push_back(c);
  }

  for (auto& c : cases) c = scale_to_fit(std::move(c), cap);
  return cases;
}

SuiteResult run_cases(std::span<const BenchmarkCase> cases, const ExecConfig& cfg,
                      const std::function<void(const ReportRow&)>& on_row) {
  SuiteResult result;
  for (const auto& original : cases) {
    BenchmarkCase c = original;
    for (int attempt = 0;; ++attempt) {
      try {
        result.rows.push_back(run_case(c, cfg));
        if (on_row) on_row(result.rows.back());
      } catch (const std::bad_alloc&) {
        const auto payload = bytes_moved(c) / 2;
        if (attempt < 8 && payload > kMinBenchBytes) {
          c = scale_to_fit(std::move(c), payload / 2);
          continue;
        }
        result.failures.push_back(std::string(to_string(c.op.kind)) + " " + c.shape.to_string() +
                                  ": out of memory");
      } catch (const std::exception& e) {
        result.failures.push_back(std::string(to_string(c.op.kind)) + " " + c.shape.to_string() + ": " + e.what());
      }
      break;
    }
  }
  return result;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  throw Error(ErrorCode::invalid_argument, "unknown report format '" + std::string(text) + "'");
}

void write_report(std::ostream& out, std::span<const ReportRow> rows, ReportFormat format) {
  if (format == ReportFormat::csv) {
    for (std::size_t i = 0; i < kReportColumns.size(); ++i) out << (i ? "," : "") << kReportColumns[i];
    out << '\n';
    for (const auto& r : rows) {
      out << csv_field(r.kernel) << ',' << csv_field(r.shape) << ',' << csv_field(r.params) << ','
          << csv_field(r.variant) << ',' << r.bytes_moved << ',' << number(r.elapsed_s) << ','
          << number(r.bandwidth_gbps) << ',' << number(r.baseline_gbps) << ',' << number(r.relative_efficiency)
          << '\n';
    }
  } else {
    auto doc = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json o;
      o["kernel"] = r.kernel;
      o["shape"] = r.shape;
      o["params"] = r.params;
      o["variant"] = r.variant;
      o["bytes_moved"] = r.bytes_moved;
      o["elapsed_s"] = r.elapsed_s;
      o["bandwidth_gbps"] = r.bandwidth_gbps;
      o["baseline_gbps"] = r.baseline_gbps;
      o["relative_efficiency"] = r.relative_efficiency;
      doc.push_back(std::move(o));
    }
    out << doc.dump(2) << '\n';
  }
  if (!out) throw Error(ErrorCode::io, "failed to write report");
}

std::string format_report(std::span<const ReportRow> rows, ReportFormat format) {
  std::ostringstream out;
  write_report(out, rows, format);
  return out.str();
}

}  // namespace rearrange
