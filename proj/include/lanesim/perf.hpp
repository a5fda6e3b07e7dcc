#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "lanesim/kernels.hpp"
#include "lanesim/machine.hpp"

namespace lanesim::perf {

// Analytic performance model: peak 2*lanes dpflop/cycle, bandwidth
// 4*lanes B/cycle (the peak-to-bandwidth ratio is fixed at 2 B/dpflop), and
// an instruction-issue bound for the matrix kernel whose inner loop
// dispatches one vector FMA every `issue_gap` cycles.
struct RooflineModel {
  double peak = 8.0;
  double bandwidth = 16.0;
  double issue_gap = 5.0;

  static RooflineModel for_lanes(unsigned lanes, double issue_gap = 5.0) {
    return {2.0 * lanes, 4.0 * lanes, issue_gap};
  }
};

// Arithmetic intensity in dpflop per byte of minimum memory traffic.
double intensity(const kernels::KernelSpec& spec);

// Achievable performance at intensity I.  The issue-rate line (32/delta)*I
// applies to the matrix multiplication, whose FMA occupancy per instruction
// scales with the problem size.
double bound(const RooflineModel& m, double I, bool matmul_issue_line);

// Loss versus the bound, in percent.
double loss_pct(double measured, double bound);

struct SimReport {
  std::string kernel;
  unsigned lanes = 0;
  uint64_t n = 0; // size knob (matmul/daxpy n, dconv c_out)
  uint64_t tile = 0;
  uint64_t seed = 0;

  uint64_t cycles = 0;
  uint64_t dpflops = 0;
  double performance = 0.0;   // dpflop/cycle
  double fpu_busy_frac = 0.0; // performance / peak
  double intensity = 0.0;
  double bound = 0.0;
  double loss_pct = 0.0;
  double delta_mean = 0.0; // measured FMA issue gap
  uint64_t delta_mode = 0;
  uint64_t delta_max = 0;
  uint64_t bytes_loaded = 0;
  uint64_t bytes_stored = 0;
  uint64_t bank_conflicts = 0;
  bool functional_ok = false;
  double max_rel_err = 0.0;

  std::vector<UtilWindow> windows;
};

// Assemble the report; asserts the hard model invariant that measured
// performance never exceeds the bound.
SimReport analyze(const kernels::KernelSpec& spec, const MachineConfig& mc,
                  const RunStats& stats, const kernels::FunctionalCheck& fc);

// CSV schemas (stable column order, documented in the README):
//   roofline.csv: lanes,kernel,n,intensity,bound,measured,loss_pct
//   util.csv:     window_start,unit,utilization
void write_roofline_csv(std::ostream& os, std::span<const SimReport> reports);
void write_util_csv(std::ostream& os, const SimReport& report);
void write_trace_csv(std::ostream& os, const RunStats& stats);

std::string to_json(const SimReport& report);

struct CompareRow {
  std::string metric;
  double expected = 0.0;
  double actual = 0.0;
  double abs_tol = 0.0;
  double rel_tol = 0.0;
  bool present = false;
  bool pass = false;
};

// Compare a report against a golden metrics file.  The golden JSON maps
// metric names to {value, abs_tol?, rel_tol?}.
std::vector<CompareRow> compare(const std::string& report_json,
                                const std::string& golden_json);

// Build the kernel, run it on a fresh machine, verify the output against
// the functional reference and return the analyzed report.
SimReport run_kernel(const kernels::KernelSpec& spec, const MachineConfig& mc,
                     bool trace = false, RunStats* raw = nullptr);

} // namespace lanesim::perf
