// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: bench, verify and run subcommands.
// Uses only the C interface of librearrange.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rearrange/rearrange.h"

namespace {

struct CliError {
  int exit_code;
};

void check(rr_status s, const char* what) {
  if (s == RR_OK) return;
  std::fprintf(stderr, "rearrange: %s: %s (%s)\n", what, rr_last_error(), rr_status_string(s));
  throw CliError{s == RR_ERR_VERIFICATION ? 3 : 2};
}

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using ContextPtr = std::unique_ptr<rr_context, Deleter<rr_context, rr_context_destroy>>;
using TensorPtr = std::unique_ptr<rr_tensor, Deleter<rr_tensor, rr_tensor_destroy>>;
using StencilPtr = std::unique_ptr<rr_stencil, Deleter<rr_stencil, rr_stencil_destroy>>;
using ReportPtr = std::unique_ptr<rr_report, Deleter<rr_report, rr_report_destroy>>;

std::vector<uint64_t> split_list(const std::string& text, char sep) {
  std::vector<uint64_t> out;
  if (text.empty()) return out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    try {
      std::size_t used = 0;
      if (item.empty() || item[0] == '-') throw std::invalid_argument(item);
      out.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("'" + text + "' is not a list of non-negative integers");
    }
  }
  return out;
}

struct OpFlags {
  std::string op;
  std::string shape;
  std::string order;
  std::string keep;
  std::string base;
  std::string range;
  uint64_t n = 2;
  std::string stencil_file;
  int fd_order = 1;
  std::string boundary = "zero-pad";
  std::string variant = "staged";
  std::string dtype = "f32";
  std::size_t workers = 0;
};

// Storage for the arrays an rr_op_desc points into.
struct OpDesc {
  rr_op_desc desc{};
  std::vector<std::size_t> order;
  std::vector<uint64_t> base, range;
  StencilPtr stencil;
};

void add_op_flags(CLI::App* cmd, OpFlags& f, bool with_shape) {
  cmd->add_option("--op", f.op, "copy|permute3d|reorder|reorder-nm|interlace|deinterlace|stencil")->required();
  if (with_shape) {
    cmd->add_option("--shape", f.shape, "e.g. 128x256x512 (stencil: COLSxROWS; interlace: per-array length)")
        ->required();
    cmd->add_option("--dtype", f.dtype, "f32|f64")->check(CLI::IsMember({"f32", "f64"}));
  }
  cmd->add_option("--order", f.order, "order vector, fastest dimension first, e.g. 1,0,2");
  cmd->add_option("--keep", f.keep, "reorder-nm: kept input dimensions in output order");
  cmd->add_option("--base", f.base, "reorder-nm: base index per input dimension");
  cmd->add_option("--range", f.range, "reorder-nm: range per input dimension");
  cmd->add_option("--n", f.n, "interlace/deinterlace: number of arrays");
  cmd->add_option("--stencil-file", f.stencil_file, "stencil taps file")->check(CLI::ExistingFile);
  cmd->add_option("--fd-order", f.fd_order, "central-difference order 1..4");
  cmd->add_option("--boundary", f.boundary, "zero-pad|clamp-to-edge|skip-border")
      ->check(CLI::IsMember({"zero-pad", "clamp-to-edge", "skip-border"}));
  cmd->add_option("--variant", f.variant, "staged|direct")->check(CLI::IsMember({"staged", "direct"}));
  cmd->add_option("--workers", f.workers, "worker threads (0 = logical cores)")->envname("REARRANGE_WORKERS");
}

OpDesc build_desc(const OpFlags& f) {
  OpDesc d;
  rr_op op;
  check(rr_op_parse(f.op.c_str(), &op), "--op");
  rr_op_desc_init(&d.desc, op);
  const auto order = split_list(op == RR_OP_REORDER_NM ? f.keep : f.order, ',');
  d.order.assign(order.begin(), order.end());
  if (op == RR_OP_PERMUTE3D || op == RR_OP_REORDER) {
    if (d.order.empty()) throw CLI::ValidationError("--order is required for " + f.op);
  }
  if (op == RR_OP_REORDER_NM) {
    if (f.keep.empty() || f.base.empty() || f.range.empty()) {
      throw CLI::ValidationError("reorder-nm needs --keep, --base and --range");
    }
    d.base = split_list(f.base, ',');
    d.range = split_list(f.range, ',');
    if (d.base.size() != d.range.size()) throw CLI::ValidationError("--base and --range differ in length");
  }
  d.desc.order = d.order.data();
  d.desc.order_len = d.order.size();
  d.desc.base = d.base.data();
  d.desc.range = d.range.data();
  d.desc.slice_len = d.base.size();
  d.desc.n_arrays = f.n;
  d.desc.fd_order = f.fd_order;
  d.desc.boundary = f.boundary == "clamp-to-edge" ? RR_CLAMP_TO_EDGE
                    : f.boundary == "skip-border" ? RR_SKIP_BORDER
                                                  : RR_ZERO_PAD;
  d.desc.variant = f.variant == "direct" ? RR_VARIANT_DIRECT : RR_VARIANT_STAGED;
  if (!f.stencil_file.empty()) {
    rr_stencil* s = nullptr;
    check(rr_stencil_load(f.stencil_file.c_str(), &s), "--stencil-file");
    d.stencil.reset(s);
    d.desc.stencil = s;
  }
  return d;
}

ContextPtr make_context(std::size_t workers) {
  rr_context* ctx = nullptr;
  check(rr_context_create(&ctx), "context");
  ContextPtr owner(ctx);
  check(rr_context_set_workers(ctx, workers), "--workers");
  return owner;
}

std::vector<uint64_t> parse_shape(const std::string& text) {
  auto dims = split_list(text, 'x');
  if (dims.empty()) throw CLI::ValidationError("--shape is empty");
  return dims;
}

int cmd_verify(const OpFlags& f, uint64_t seed) {
  auto d = build_desc(f);
  auto ctx = make_context(f.workers);
  auto dims = parse_shape(f.shape);
  if (d.desc.op == RR_OP_INTERLACE || d.desc.op == RR_OP_DEINTERLACE) {
    uint64_t len = 1;
    for (auto v : dims) len *= v;
    dims = {len * f.n};
  }
  rr_tensor* in = nullptr;
  check(rr_tensor_random(f.dtype == "f64" ? RR_F64 : RR_F32, dims.data(), dims.size(), seed, &in), "input");
  TensorPtr input(in);
  int matches = 0;
  uint64_t mismatches = 0;
  check(rr_verify(ctx.get(), &d.desc, in, &matches, &mismatches), "verify");
  if (!matches) {
    std::printf("FAIL %s %s: %llu mismatching elements\n", f.op.c_str(), f.shape.c_str(),
                static_cast<unsigned long long>(mismatches));
    return 1;
  }
  std::printf("OK %s %s: tiled output identical to oracle\n", f.op.c_str(), f.shape.c_str());
  return 0;
}

int cmd_run(const OpFlags& f, const std::string& in_path, const std::string& out_path, bool oracle) {
  auto d = build_desc(f);
  auto ctx = make_context(f.workers);
  rr_tensor* in = nullptr;
  check(rr_tensor_load(in_path.c_str(), &in), in_path.c_str());
  TensorPtr input(in);
  rr_tensor* out = nullptr;
  check(oracle ? rr_apply_oracle(&d.desc, in, &out) : rr_apply(ctx.get(), &d.desc, in, &out), f.op.c_str());
  TensorPtr output(out);
  check(rr_tensor_save(out, out_path.c_str()), out_path.c_str());
  return 0;
}

struct BenchFlags {
  std::string suite;
  uint32_t reps = 10;
  uint32_t warmup = 3;
  std::string format = "csv";
  std::string out = "-";
  double max_mib = 0;
  bool quiet = false;
};

int cmd_bench(const OpFlags& f, const BenchFlags& b) {
  auto ctx = make_context(f.workers);
  rr_report* r = nullptr;
  check(rr_report_create(&r), "report");
  ReportPtr report(r);
  if (!b.suite.empty()) {
    const auto cap = static_cast<uint64_t>(b.max_mib * 1024.0 * 1024.0);
    check(rr_bench_run_reference_suite(ctx.get(), cap, b.reps, b.warmup, b.quiet ? 0 : 1, r), "suite");
  } else {
    if (f.op.empty()) throw CLI::ValidationError("bench needs --suite paper or --op");
    if (f.shape.empty()) throw CLI::ValidationError("--shape is required with --op");
    auto d = build_desc(f);
    auto dims = parse_shape(f.shape);
    rr_bench_case c{};
    c.op = d.desc;
    c.dtype = f.dtype == "f64" ? RR_F64 : RR_F32;
    c.shape = dims.data();
    c.ndim = dims.size();
    c.repetitions = b.reps;
    c.warmup = b.warmup;
    check(rr_bench_run_case(ctx.get(), &c, r), f.op.c_str());
  }
  const auto failures = rr_report_failure_count(r);
  for (std::size_t i = 0; i < failures; ++i) {
    std::fprintf(stderr, "rearrange: case failed: %s\n", rr_report_failure(r, i));
  }
  if (rr_report_row_count(r) == 0) {
    std::fprintf(stderr, "rearrange: no benchmark rows produced\n");
    return 1;
  }
  check(rr_report_write(r, b.format == "json" ? RR_FORMAT_JSON : RR_FORMAT_CSV, b.out.c_str()), b.out.c_str());
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tiled data-rearrangement kernels: benchmark, verify and apply"};
  app.require_subcommand(1);

  OpFlags bench_ops;
  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "measure bandwidth relative to a copy baseline");
  bench_cmd->add_option("--suite", bench.suite, "run the built-in reference workload suite")
      ->check(CLI::IsMember({"paper"}));
  bench_cmd->add_option("--op", bench_ops.op, "kernel to benchmark");
  bench_cmd->add_option("--shape", bench_ops.shape, "input shape, e.g. 128x256x512");
  bench_cmd->add_option("--dtype", bench_ops.dtype, "f32|f64")->check(CLI::IsMember({"f32", "f64"}));
  bench_cmd->add_option("--order", bench_ops.order, "order vector, e.g. 1,0,2");
  bench_cmd->add_option("--keep", bench_ops.keep, "reorder-nm: kept input dimensions");
  bench_cmd->add_option("--base", bench_ops.base, "reorder-nm: base index per input dimension");
  bench_cmd->add_option("--range", bench_ops.range, "reorder-nm: range per input dimension");
  bench_cmd->add_option("--n", bench_ops.n, "interlace/deinterlace: number of arrays");
  bench_cmd->add_option("--stencil-file", bench_ops.stencil_file, "stencil taps file")->check(CLI::ExistingFile);
  bench_cmd->add_option("--fd-order", bench_ops.fd_order, "central-difference order 1..4");
  bench_cmd->add_option("--boundary", bench_ops.boundary, "zero-pad|clamp-to-edge|skip-border")
      ->check(CLI::IsMember({"zero-pad", "clamp-to-edge", "skip-border"}));
  bench_cmd->add_option("--variant", bench_ops.variant, "staged|direct")->check(CLI::IsMember({"staged", "direct"}));
  bench_cmd->add_option("--workers", bench_ops.workers, "worker threads (0 = logical cores)")
      ->envname("REARRANGE_WORKERS");
  bench_cmd->add_option("--reps", bench.reps, "timed repetitions")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--warmup", bench.warmup, "discarded warmup runs");
  bench_cmd->add_option("--format", bench.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  bench_cmd->add_option("--out", bench.out, "output path, - for stdout");
  bench_cmd->add_option("--max-mib", bench.max_mib, "suite: cap per-case payload (MiB); 0 = from free memory")
      ->check(CLI::NonNegativeNumber);
  bench_cmd->add_flag("--quiet", bench.quiet, "suppress per-case progress on stderr");

  OpFlags verify_ops;
  uint64_t seed = 1;
  auto* verify_cmd = app.add_subcommand("verify", "compare the tiled kernel against the naive oracle");
  add_op_flags(verify_cmd, verify_ops, true);
  verify_cmd->add_option("--seed", seed, "random input seed");

  OpFlags run_ops;
  std::string in_path, out_path;
  bool use_oracle = false;
  auto* run_cmd = app.add_subcommand("run", "apply a kernel to an .rrt tensor file");
  add_op_flags(run_cmd, run_ops, false);
  run_cmd->add_option("--in", in_path, "input .rrt file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_path, "output .rrt file")->required();
  run_cmd->add_flag("--oracle", use_oracle, "use the naive reference implementation");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench_cmd) return cmd_bench(bench_ops, bench);
    if (*verify_cmd) return cmd_verify(verify_ops, seed);
    if (*run_cmd) return cmd_run(run_ops, in_path, out_path, use_oracle);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const CliError& e) {
    return e.exit_code;
  }
  return 0;
}
