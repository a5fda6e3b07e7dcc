#include "lanesim/perf.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace lanesim::perf {

double intensity(const kernels::KernelSpec& spec) {
  switch (spec.kind) {
    case kernels::KernelKind::Matmul:
      return static_cast<double>(spec.matmul.n) / 16.0;
    case kernels::KernelKind::Daxpy:
      return 1.0 / 12.0;
    case kernels::KernelKind::Dconv:
      return static_cast<double>(spec.flops()) /
             static_cast<double>(spec.min_traffic_bytes());
  }
  throw ConfigError("unknown kernel");
}

double bound(const RooflineModel& m, double I, bool matmul_issue_line) {
  if (I <= 0.0) throw ConfigError("intensity must be positive");
  double b = std::min(m.peak, m.bandwidth * I);
  if (matmul_issue_line) b = std::min(b, 32.0 / m.issue_gap * I);
  return b;
}

double loss_pct(double measured, double bound) {
  if (bound <= 0.0) return 0.0;
  return (1.0 - measured / bound) * 100.0;
}

SimReport analyze(const kernels::KernelSpec& spec, const MachineConfig& mc,
                  const RunStats& stats, const kernels::FunctionalCheck& fc) {
  SimReport r;
  r.kernel = spec.name();
  r.lanes = mc.lanes;
  switch (spec.kind) {
    case kernels::KernelKind::Matmul:
      r.n = spec.matmul.n;
      r.tile = spec.matmul.tile;
      break;
    case kernels::KernelKind::Daxpy:
      r.n = spec.daxpy.n;
      break;
    case kernels::KernelKind::Dconv:
      r.n = spec.dconv.c_out;
      r.tile = spec.dconv.c_out_tile;
      break;
  }
  r.seed = spec.seed;
  r.cycles = stats.cycles;
  r.dpflops = stats.dpflops;
  r.performance = stats.performance();
  RooflineModel m = RooflineModel::for_lanes(mc.lanes);
  r.fpu_busy_frac = r.performance / m.peak;
  r.intensity = intensity(spec);
  r.bound =
      bound(m, r.intensity, spec.kind == kernels::KernelKind::Matmul);
  r.loss_pct = loss_pct(r.performance, r.bound);
  // hard model invariant: the roofline is an upper bound
  SIM_CHECK(r.performance <= r.bound * (1.0 + 1e-9));
  try {
    auto gaps = scalar::measure_issue_gap(stats.issue_timeline,
                                          isa::VOpcode::VMADD, 8);
    r.delta_mean = gaps.mean;
    r.delta_mode = gaps.mode;
    r.delta_max = gaps.max;
  } catch (const MeasureError&) {
    // too few FMAs to measure
  }
  r.bytes_loaded = stats.bytes_loaded;
  r.bytes_stored = stats.bytes_stored;
  r.bank_conflicts = stats.bank_conflicts;
  r.functional_ok = fc.ok;
  r.max_rel_err = fc.max_rel_err;
  r.windows = stats.windows;
  return r;
}

void write_roofline_csv(std::ostream& os, std::span<const SimReport> reports) {
  os << "lanes,kernel,n,intensity,bound,measured,loss_pct\n";
  for (const auto& r : reports)
    os << r.lanes << ',' << r.kernel << ',' << r.n << ',' << r.intensity
       << ',' << r.bound << ',' << r.performance << ',' << r.loss_pct << '\n';
}

void write_util_csv(std::ostream& os, const SimReport& report) {
  os << "window_start,unit,utilization\n";
  for (const auto& w : report.windows) {
    os << w.start << ",fpu," << w.fpu << '\n';
    os << w.start << ",mul," << w.mul << '\n';
    os << w.start << ",alu," << w.alu << '\n';
    os << w.start << ",sldu," << w.sldu << '\n';
    os << w.start << ",ld," << w.ld << '\n';
    os << w.start << ",st," << w.st << '\n';
  }
}

void write_trace_csv(std::ostream& os, const RunStats& stats) {
  os << "cycle,lane,unit,busy\n";
  for (const auto& t : stats.trace)
    os << t.cycle << ',' << unsigned(t.lane) << ',' << unit_name(t.unit) << ','
       << unsigned(t.busy) << '\n';
}

std::string to_json(const SimReport& r) {
  nlohmann::json j;
  j["kernel"] = r.kernel;
  j["lanes"] = r.lanes;
  j["n"] = r.n;
  j["tile"] = r.tile;
  j["seed"] = r.seed;
  j["cycles"] = r.cycles;
  j["dpflops"] = r.dpflops;
  j["performance"] = r.performance;
  j["fpu_busy_frac"] = r.fpu_busy_frac;
  j["intensity"] = r.intensity;
  j["bound"] = r.bound;
  j["loss_pct"] = r.loss_pct;
  j["delta_mean"] = r.delta_mean;
  j["delta_mode"] = r.delta_mode;
  j["delta_max"] = r.delta_max;
  j["bytes_loaded"] = r.bytes_loaded;
  j["bytes_stored"] = r.bytes_stored;
  j["bank_conflicts"] = r.bank_conflicts;
  j["functional_ok"] = r.functional_ok;
  j["max_rel_err"] = r.max_rel_err;
  return j.dump(2) + "\n";
}

SimReport run_kernel(const kernels::KernelSpec& spec, const MachineConfig& mc,
                     bool trace, RunStats* raw) {
  spec.validate();
  Machine m(mc);
  kernels::KernelBuild kb = kernels::build(spec, mc, m.memory());
  std::vector<double> expected = kernels::reference_oracle(spec, kb, m.memory());
  m.set_program(kb.program);
  m.enable_trace(trace);
  RunStats stats = m.run();
  kernels::FunctionalCheck fc =
      kernels::check_output(kb, m.memory(), expected);
  if (raw) *raw = stats;
  return analyze(spec, mc, stats, fc);
}

std::vector<CompareRow> compare(const std::string& report_json,
                                const std::string& golden_json) {
  nlohmann::json rep = nlohmann::json::parse(report_json);
  nlohmann::json gold = nlohmann::json::parse(golden_json);
  const nlohmann::json& metrics =
      gold.contains("metrics") ? gold.at("metrics") : gold;
  std::vector<CompareRow> rows;
  for (auto it = metrics.begin(); it != metrics.end(); ++it) {
    CompareRow row;
    row.metric = it.key();
    const nlohmann::json& g = it.value();
    if (g.is_object()) {
      row.expected = g.value("value", 0.0);
      row.abs_tol = g.value("abs_tol", 0.0);
      row.rel_tol = g.value("rel_tol", 0.0);
    } else {
      row.expected = g.get<double>();
    }
    if (rep.contains(row.metric) && rep.at(row.metric).is_number()) {
      row.present = true;
      row.actual = rep.at(row.metric).get<double>();
      double tol = std::max(row.abs_tol, row.rel_tol * std::abs(row.expected));
      row.pass = std::abs(row.actual - row.expected) <= tol;
    }
    rows.push_back(row);
  }
  return rows;
}

} // namespace lanesim::perf
