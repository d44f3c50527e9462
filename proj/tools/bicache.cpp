// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: single runs, parameter sweeps and trace export.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bicache/config.hpp"
#include "bicache/simulator.hpp"
#include "bicache/workloads.hpp"

namespace fs = std::filesystem;
using namespace bicache;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDivergence = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SizeOptions {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint32_t steps = 0;
  std::uint32_t repeat = 1;
  std::uint32_t elem_size = 8;
  double density = 0.001;
  std::string matrix;
  std::uint32_t array_gap = 0;
  std::uint64_t seed = 1;

  void add_to(CLI::App& app) {
    app.add_option("--n", n, "Problem size (elements for axpy, rows otherwise)");
    app.add_option("--m", m, "Columns (defaults to --n)");
    app.add_option("--steps", steps, "jacobi2d time steps");
    app.add_option("--repeat", repeat, "Region-of-interest repetitions")->check(CLI::PositiveNumber);
    app.add_option("--elem-size", elem_size, "Element size in bytes")->check(CLI::IsMember({4, 8}));
    app.add_option("--density", density, "Nonzero density of the synthetic spmv matrix")->check(CLI::Range(0.0, 1.0));
    app.add_option("--matrix", matrix, "Matrix Market input for spmv")->check(CLI::ExistingFile);
    app.add_option("--array-gap", array_gap, "Bytes left between consecutive arrays");
    app.add_option("--seed", seed, "Seed for synthetic inputs");
  }
};

WorkloadSpec make_spec(const std::string& workload, std::uint32_t vl, const SizeOptions& o) {
  WorkloadSpec s;
  if (const auto k = parse_kernel(workload)) {
    s.kernel = *k;
  } else if (fs::is_regular_file(workload)) {
    s.kernel = Kernel::file;
    s.path = workload;
  } else {
    throw UsageError("unknown workload '" + workload + "' (not a kernel name or a trace file)");
  }
  s.vl_bits = vl;
  s.n = o.n;
  s.m = o.m;
  s.steps = o.steps;
  s.repeat = o.repeat;
  s.elem_size = o.elem_size;
  s.density = o.density;
  s.seed = o.seed;
  s.array_gap = o.array_gap;
  if (!o.matrix.empty()) {
    if (s.kernel != Kernel::spmv) throw UsageError("--matrix only applies to spmv");
    s.path = o.matrix;
  }
  return s;
}

SimConfig base_config(const std::string& path) {
  if (path.empty()) return SimConfig{};
  return load_config_file(path);
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& csv, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(parse(item));
  }
  if (out.empty()) throw UsageError("empty list '" + csv + "'");
  return out;
}

std::uint32_t parse_vl(const std::string& s) {
  std::uint32_t v = 0;
  try {
    v = static_cast<std::uint32_t>(std::stoul(s));
  } catch (const std::exception&) {
    throw UsageError("bad vector length '" + s + "'");
  }
  if (!is_allowed_vl(v)) throw UsageError("vector length " + s + " is not one of 128..4096");
  return v;
}

std::ostream& open_csv(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw UsageError("cannot write " + path);
  return file;
}

void print_summary(std::ostream& os, const StatsRecord& r) {
  os << r.workload << " vl=" << r.vl_bits << " " << to_string(r.hierarchy) << " prefetch=" << to_string(r.prefetch)
     << "\n  cycles " << r.cycles << " (compute " << r.compute_cycles << ")"
     << "\n  accesses " << r.accesses << " (scalar " << r.scalar_accesses << ", vector " << r.vector_accesses << ")"
     << "\n  native " << r.native_hits << "  cross " << r.cross_hits << "  wb_restore " << r.wb_restores
     << "  miss " << r.misses << "\n  amat " << r.amat << "\n  ras " << r.ras << " (demand " << r.ras_demand << ", write-back "
     << r.ras_writeback << ", prefetch " << r.ras_prefetch << ")  cas " << r.cas << "  pre " << r.pre
     << "  writebacks " << r.writebacks << "  stall " << r.stall_cycles << "\n  prefetch issued " << r.pf_issued << "  filled "
     << r.pf_filled << "  rejected " << r.pf_rejected << "  useful " << r.pf_useful << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven simulator of a split scalar/vector cache hierarchy"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Simulate one workload on one configuration");
  std::string workload;
  std::uint32_t vl = 512;
  std::string hierarchy = "bc", prefetch = "off", config_path, csv_path, trace_out, oracle = "on";
  bool debug_checks = false;
  SizeOptions run_sizes;
  run_cmd->add_option("--workload", workload, "Kernel name or trace file")->required();
  auto* vl_opt = run_cmd->add_option("--vl", vl, "Vector length in bits");
  auto* h_opt = run_cmd->add_option("--hierarchy", hierarchy, "bc or wc")->check(CLI::IsMember({"bc", "wc"}));
  auto* pf_opt =
      run_cmd->add_option("--prefetch", prefetch, "off, on or ideal")->check(CLI::IsMember({"off", "on", "ideal"}));
  run_cmd->add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
  run_cmd->add_option("--csv", csv_path, "CSV output ('-' for stdout)");
  run_cmd->add_option("--trace-out", trace_out, "Also write the generated trace here");
  run_cmd->add_option("--oracle", oracle, "Check memory against the functional model")
      ->check(CLI::IsMember({"on", "off"}));
  run_cmd->add_flag("--debug-checks", debug_checks, "Assert structural invariants while running");
  run_sizes.add_to(*run_cmd);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the Cartesian product of the given axes");
  std::string workloads_csv = "axpy,mv,mm,jacobi2d,pathfinder,spmv";
  std::string vls_csv = "128,256,512,1024,2048,4096";
  std::string hierarchies_csv = "wc,bc";
  std::string prefetch_csv = "off,on,ideal";
  std::string sweep_config, sweep_csv, sweep_oracle = "on";
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  SizeOptions sweep_sizes;
  sweep_cmd->add_option("--workloads", workloads_csv, "Comma-separated kernels or trace files");
  sweep_cmd->add_option("--vls", vls_csv, "Comma-separated vector lengths");
  sweep_cmd->add_option("--hierarchies", hierarchies_csv, "Comma-separated: bc, wc");
  sweep_cmd->add_option("--prefetch", prefetch_csv, "Comma-separated: off, on, ideal");
  sweep_cmd->add_option("--config", sweep_config, "Configuration file")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--csv", sweep_csv, "CSV output ('-' for stdout)");
  sweep_cmd->add_option("--jobs", jobs, "Points simulated in parallel")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--oracle", sweep_oracle, "Check memory against the functional model")
      ->check(CLI::IsMember({"on", "off"}));
  sweep_sizes.add_to(*sweep_cmd);

  // trace
  auto* trace_cmd = app.add_subcommand("trace", "Write a kernel's trace without simulating it");
  std::string trace_workload, trace_path;
  std::uint32_t trace_vl = 512;
  SizeOptions trace_sizes;
  trace_cmd->add_option("--workload", trace_workload, "Kernel name")->required();
  trace_cmd->add_option("--vl", trace_vl, "Vector length in bits");
  trace_cmd->add_option("--out", trace_path, "Output file ('-' for stdout)")->required();
  trace_sizes.add_to(*trace_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run_cmd) {
      SimConfig cfg = base_config(config_path);
      if (*vl_opt || config_path.empty()) cfg.vl_bits = parse_vl(std::to_string(vl));
      if (*h_opt || config_path.empty()) cfg.hierarchy = parse_hierarchy(hierarchy);
      if (*pf_opt || config_path.empty()) cfg.prefetch = parse_prefetch(prefetch);
      cfg.rng_seed = run_sizes.seed;
      check_config(cfg);
      const WorkloadSpec spec = make_spec(workload, cfg.vl_bits, run_sizes);

      SimOptions opts;
      opts.oracle = oracle == "on";
      opts.debug_checks = debug_checks;
      std::ofstream trace_file;
      if (!trace_out.empty()) {
        trace_file.open(trace_out);
        if (!trace_file) throw UsageError("cannot write " + trace_out);
      }
      const StatsRecord r = run(spec, cfg, opts, trace_out.empty() ? nullptr : &trace_file);
      if (!csv_path.empty()) {
        std::ofstream file;
        std::ostream& os = open_csv(csv_path, file);
        write_csv_header(os);
        write_csv_row(os, r);
      }
      if (csv_path != "-") print_summary(std::cout, r);
      return kExitOk;
    }

    if (*sweep_cmd) {
      const SimConfig cfg = base_config(sweep_config);
      const auto names = parse_list<std::string>(workloads_csv, [](const std::string& s) { return s; });
      const auto vls = parse_list<std::uint32_t>(vls_csv, parse_vl);
      const auto hs = parse_list<HierarchyKind>(hierarchies_csv, [](const std::string& s) {
        if (s != "bc" && s != "wc") throw UsageError("hierarchy must be bc or wc, got '" + s + "'");
        return parse_hierarchy(s);
      });
      const auto pfs = parse_list<PrefetchMode>(prefetch_csv, [](const std::string& s) {
        if (s != "off" && s != "on" && s != "ideal") throw UsageError("bad prefetch mode '" + s + "'");
        return parse_prefetch(s);
      });
      std::vector<WorkloadSpec> specs;
      for (const auto& n : names) specs.push_back(make_spec(n, 512, sweep_sizes));

      SimOptions opts;
      opts.oracle = sweep_oracle == "on";
      const auto rows = sweep(sweep_grid(specs, vls, hs, pfs, cfg), jobs, opts);

      std::ofstream file;
      std::ostream& os = open_csv(sweep_csv, file);
      write_csv_header(os);
      int status = kExitOk;
      for (const auto& row : rows) {
        if (row.stats) {
          write_csv_row(os, *row.stats);
          continue;
        }
        std::cerr << "point " << workload_name(row.point.spec) << " vl=" << row.point.cfg.vl_bits << " "
                  << to_string(row.point.cfg.hierarchy) << "/" << to_string(row.point.cfg.prefetch)
                  << " failed: " << row.error << "\n";
        if (row.diverged) {
          status = kExitDivergence;
        } else if (status == kExitOk) {
          status = kExitUsage;
        }
      }
      return status;
    }

    if (*trace_cmd) {
      const WorkloadSpec spec = make_spec(trace_workload, parse_vl(std::to_string(trace_vl)), trace_sizes);
      std::ofstream file;
      std::ostream& os = open_csv(trace_path, file);
      generate(spec, TraceWriter(os));
      return kExitOk;
    }
  } catch (const OracleDivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const ConfigError& e) {
    std::cerr << "error: invalid configuration\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
