// Batch front end: configure a machine, run kernels or sweeps, emit
// CSV/JSON reports and golden-comparison verdicts.
//
// Exit codes: 0 ok, 1 usage or configuration error, 2 functional mismatch,
// 3 internal invariant violation.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lanesim/perf.hpp"

namespace fs = std::filesystem;
using namespace lanesim;

namespace {

struct RunOptions {
  unsigned lanes = 4;
  std::string kernel = "matmul";
  std::vector<uint64_t> n_list{256};
  std::vector<unsigned> lanes_list;
  uint64_t n = 256;
  unsigned tile = 4;
  unsigned sew = 64;
  unsigned mem_latency = 10;
  unsigned fpu_depth = 5;
  unsigned opq_depth = 4;
  std::string out_dir;
  uint64_t seed = 1;
  bool trace = false;
};

MachineConfig machine_config(const RunOptions& o, unsigned lanes) {
  MachineConfig mc;
  mc.lanes = lanes;
  mc.mem_latency = o.mem_latency;
  mc.fpu_depth = o.fpu_depth;
  mc.opq_fpu = o.opq_depth;
  mc.validate();
  return mc;
}

kernels::KernelSpec kernel_spec(const RunOptions& o, uint64_t n) {
  if (o.sew != 64)
    throw ConfigError("the bundled kernels are double precision (sew=64)");
  if (o.kernel == "matmul")
    return kernels::KernelSpec::make_matmul(static_cast<uint32_t>(n), o.tile,
                                            o.seed);
  if (o.kernel == "daxpy")
    return kernels::KernelSpec::make_daxpy(static_cast<uint32_t>(n), 1.5,
                                           o.seed);
  if (o.kernel == "dconv")
    return kernels::KernelSpec::make_dconv(static_cast<uint32_t>(n),
                                           std::min<uint32_t>(o.tile * 2, 8),
                                           o.seed);
  throw ConfigError("unknown kernel '" + o.kernel + "'");
}

void write_file(const fs::path& p, const std::string& data) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << data;
}

void emit_outputs(const RunOptions& o, const perf::SimReport& rep,
                  const RunStats* raw) {
  if (o.out_dir.empty()) return;
  fs::create_directories(o.out_dir);
  fs::path dir(o.out_dir);
  write_file(dir / "report.json", perf::to_json(rep));
  {
    std::ostringstream os;
    perf::write_roofline_csv(os, std::span<const perf::SimReport>(&rep, 1));
    write_file(dir / "roofline.csv", os.str());
  }
  {
    std::ostringstream os;
    perf::write_util_csv(os, rep);
    write_file(dir / "util.csv", os.str());
  }
  if (o.trace && raw) {
    std::ostringstream os;
    perf::write_trace_csv(os, *raw);
    write_file(dir / "trace.csv", os.str());
  }
}

void print_summary(const perf::SimReport& r) {
  std::cout << r.kernel << " lanes=" << r.lanes << " n=" << r.n
            << ": cycles=" << r.cycles << " perf=" << r.performance
            << " dpflop/cycle (" << r.fpu_busy_frac * 100.0
            << "% of peak), bound=" << r.bound << " loss=" << r.loss_pct
            << "%, delta=" << r.delta_mode
            << ", functional=" << (r.functional_ok ? "ok" : "MISMATCH")
            << "\n";
}

int cmd_run(const RunOptions& o) {
  MachineConfig mc = machine_config(o, o.lanes);
  kernels::KernelSpec spec = kernel_spec(o, o.n);
  RunStats raw;
  perf::SimReport rep = perf::run_kernel(spec, mc, o.trace, &raw);
  print_summary(rep);
  emit_outputs(o, rep, &raw);
  if (!rep.functional_ok) {
    std::cerr << "functional check failed: max relative error "
              << rep.max_rel_err << "\n";
    return 2;
  }
  return 0;
}

int cmd_sweep(const RunOptions& o) {
  std::vector<unsigned> lanes =
      o.lanes_list.empty() ? std::vector<unsigned>{o.lanes} : o.lanes_list;
  struct Job {
    unsigned lanes;
    uint64_t n;
    std::future<perf::SimReport> fut;
  };
  std::vector<Job> jobs;
  for (unsigned l : lanes)
    for (uint64_t n : o.n_list) {
      MachineConfig mc = machine_config(o, l);
      kernels::KernelSpec spec = kernel_spec(o, n);
      jobs.push_back({l, n,
                      std::async(std::launch::async, [mc, spec] {
                        return perf::run_kernel(spec, mc);
                      })});
    }
  std::vector<perf::SimReport> reports;
  bool all_ok = true;
  for (auto& j : jobs) {
    reports.push_back(j.fut.get());
    print_summary(reports.back());
    all_ok = all_ok && reports.back().functional_ok;
  }
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    std::ostringstream os;
    perf::write_roofline_csv(os, reports);
    write_file(fs::path(o.out_dir) / "roofline.csv", os.str());
    for (const auto& r : reports) {
      std::ostringstream name;
      name << "report_" << r.kernel << "_l" << r.lanes << "_n" << r.n
           << ".json";
      write_file(fs::path(o.out_dir) / name.str(), perf::to_json(r));
    }
  }
  return all_ok ? 0 : 2;
}

int cmd_compare(const std::string& report_path, const std::string& golden_path) {
  auto slurp = [](const std::string& p) {
    std::ifstream f(p);
    if (!f) throw ConfigError("cannot open " + p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  auto rows = perf::compare(slurp(report_path), slurp(golden_path));
  bool all = true;
  for (const auto& r : rows) {
    bool ok = r.present && r.pass;
    all = all && ok;
    std::cout << (ok ? "PASS" : "FAIL") << "  " << r.metric << ": expected "
              << r.expected;
    if (r.abs_tol > 0 || r.rel_tol > 0)
      std::cout << " (abs_tol " << r.abs_tol << ", rel_tol " << r.rel_tol
                << ")";
    if (r.present)
      std::cout << ", got " << r.actual;
    else
      std::cout << ", metric missing from report";
    std::cout << "\n";
  }
  return all ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"cycle-approximate simulator for a lane-scalable vector "
               "coprocessor with an in-order scalar core"};
  app.require_subcommand(1);

  RunOptions o;
  std::string report_path, golden_path;

  auto add_common = [&](CLI::App* c, bool lanes_list) {
    if (lanes_list)
      c->add_option("--lanes", o.lanes_list, "lane counts")->delimiter(',');
    else
      c->add_option("--lanes", o.lanes, "number of vector lanes");
    c->add_option("--kernel", o.kernel, "matmul | daxpy | dconv");
    c->add_option("--tile", o.tile, "accumulator rows per pass");
    c->add_option("--sew", o.sew, "element width in bits");
    c->add_option("--mem-latency", o.mem_latency, "memory latency in cycles");
    c->add_option("--fpu-depth", o.fpu_depth, "FPU pipeline depth");
    c->add_option("--opq-depth", o.opq_depth, "FPU operand queue depth");
    c->add_option("--out", o.out_dir, "output directory");
    c->add_option("--seed", o.seed, "data seed");
    c->add_flag("--trace", o.trace, "emit per-cycle unit-busy trace");
    c->set_config("--config", "", "flat key=value configuration file");
  };

  CLI::App* run = app.add_subcommand("run", "run one kernel");
  add_common(run, false);
  run->add_option("--n", o.n, "problem size (dconv: output channels)");

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(sweep, true);
  sweep->add_option("--n", o.n_list, "problem sizes")->delimiter(',');

  CLI::App* cmp = app.add_subcommand("compare", "compare a report to goldens");
  cmp->add_option("report", report_path, "report.json")->required();
  cmp->add_option("golden", golden_path, "golden.json")->required();

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (cmp->parsed()) return cmd_compare(report_path, golden_path);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const DecodeError& e) {
    std::cerr << "decode error: " << e.what() << "\n";
    return 1;
  } catch (const FunctionalError& e) {
    std::cerr << "functional error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
