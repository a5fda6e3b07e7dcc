// Calibration harness: runs the acceptance-relevant configurations and
// prints measured vs target numbers.  Not part of the test suite.

#include <cstdio>
#include <cstdlib>

#include "lanesim/perf.hpp"

using namespace lanesim;

namespace {

struct Cell {
  unsigned lanes;
  unsigned n;
  double target; // utilization %
};

const Cell kTable[] = {
    {4, 16, 49.5},  {8, 16, 25.4},  {16, 16, 12.8},
    {4, 32, 82.6},  {8, 32, 53.4},  {16, 32, 27.6},
    {4, 64, 89.6},  {8, 64, 77.5},  {16, 64, 45.6},
    {4, 128, 94.3}, {8, 128, 93.1}, {16, 128, 78.8},
};

MachineConfig base_config(unsigned lanes) {
  MachineConfig mc;
  mc.lanes = lanes;
  const char* env;
  if ((env = std::getenv("CAL_NOTICE"))) mc.retire_notice = atoi(env);
  if ((env = std::getenv("CAL_W"))) mc.vins_setup = atoi(env);
  if ((env = std::getenv("CAL_V"))) mc.vins_commit_latency = atoi(env);
  if ((env = std::getenv("CAL_L"))) mc.mem_latency = atoi(env);
  if ((env = std::getenv("CAL_TRACKER"))) mc.unit_tracker_slots = atoi(env);
  if ((env = std::getenv("CAL_LOADC"))) mc.load_commit_latency = atoi(env);
  if ((env = std::getenv("CAL_GAP"))) mc.fu_switch_gap = atoi(env);
  mc.validate();
  return mc;
}

} // namespace

int main() {
  int fails = 0;
  for (const Cell& c : kTable) {
    auto r = perf::run_kernel(kernels::KernelSpec::make_matmul(c.n, 4),
                              base_config(c.lanes));
    double u = r.fpu_busy_frac * 100.0;
    bool ok = std::abs(u - c.target) <= 5.0 && r.functional_ok;
    fails += !ok;
    printf("%s matmul l=%-2u n=%-3u util=%5.1f%% target=%4.1f%% (%+.1f)\n",
           ok ? "ok  " : "FAIL", c.lanes, c.n, u, c.target, u - c.target);
  }
  {
    auto r = perf::run_kernel(kernels::KernelSpec::make_matmul(256, 4),
                              base_config(2));
    bool ok = r.loss_pct <= 5.0 && r.functional_ok;
    fails += !ok;
    printf("%s matmul l=2  n=256 loss=%.2f%% (<=5)\n", ok ? "ok  " : "FAIL",
           r.loss_pct);
  }
  {
    auto r = perf::run_kernel(kernels::KernelSpec::make_matmul(256, 4),
                              base_config(16));
    bool ok = r.loss_pct <= 7.0 && r.functional_ok;
    fails += !ok;
    printf("%s matmul l=16 n=256 loss=%.2f%% (<=7)\n", ok ? "ok  " : "FAIL",
           r.loss_pct);
  }
  {
    auto r = perf::run_kernel(kernels::KernelSpec::make_daxpy(256, 1.5),
                              base_config(2));
    bool ok = std::abs(r.performance - 0.65) <= 0.03 && r.functional_ok;
    fails += !ok;
    printf("%s daxpy  l=2  n=256 perf=%.3f (0.65 +- 0.03)\n",
           ok ? "ok  " : "FAIL", r.performance);
  }
  {
    auto r = perf::run_kernel(kernels::KernelSpec::make_daxpy(256, 1.5),
                              base_config(16));
    bool ok = r.cycles >= 108 && r.cycles <= 132 &&
              std::abs(r.performance - 4.27) <= 0.4 && r.functional_ok;
    fails += !ok;
    printf("%s daxpy  l=16 n=256 cycles=%llu (120 +- 12) perf=%.2f (4.27 +- 0.4)\n",
           ok ? "ok  " : "FAIL", (unsigned long long)r.cycles, r.performance);
  }
  {
    auto r = perf::run_kernel(kernels::KernelSpec::make_dconv(8, 8),
                              base_config(2));
    double u = r.fpu_busy_frac * 100.0;
    bool ok = std::abs(u - 93.25) <= 7.0 && r.functional_ok;
    fails += !ok;
    printf("%s dconv  l=2  co=8  util=%.1f%% (93.25 +- 7)\n",
           ok ? "ok  " : "FAIL", u);
  }
  {
    auto r = perf::run_kernel(kernels::KernelSpec::make_dconv(8, 8),
                              base_config(16));
    double u = r.fpu_busy_frac * 100.0;
    bool ok = std::abs(u - 83.4) <= 7.0 && r.functional_ok;
    fails += !ok;
    printf("%s dconv  l=16 co=8  util=%.1f%% (83.4 +- 7)\n",
           ok ? "ok  " : "FAIL", u);
  }
  printf("fails: %d\n", fails);
  return fails ? 1 : 0;
}
