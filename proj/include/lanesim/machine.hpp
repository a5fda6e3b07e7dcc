#pragma once

#include <memory>
#include <vector>

#include "lanesim/config.hpp"
#include "lanesim/isa.hpp"
#include "lanesim/scalar.hpp"
#include "lanesim/vrf.hpp"
#include "lanesim/vunit.hpp"

namespace lanesim {

// Per-instruction issue bookkeeping, exposed for tests and traces.
struct IssueRecord {
  uint32_t dyn_id;
  uint32_t program_id;
  isa::VOpcode op;
  uint64_t dispatched;   // pushed into the intake queue
  uint64_t acknowledged; // accepted by the vector front end (decode)
  uint64_t issued;       // handed to the execution units
  uint64_t retired;
  vunit::StallReason first_stall = vunit::StallReason::None;
  int32_t waw_producer = -1; // dyn id
  unsigned n_war = 0;
  unsigned n_raw = 0;
};

struct UtilWindow {
  uint64_t start;
  double fpu, mul, alu, sldu, ld, st;
};

// Per-cycle busy bits for --trace output: (cycle, lane, unit, busy).
struct TraceRow {
  uint64_t cycle;
  uint8_t lane;
  Unit unit;
  uint8_t busy;
};

struct RunStats {
  uint64_t cycles = 0;
  uint64_t dpflops = 0;
  uint64_t fpu_busy = 0; // lane-cycles with an accepted FPU bundle
  uint64_t mul_busy = 0;
  uint64_t alu_busy = 0;
  uint64_t sldu_busy = 0;
  uint64_t bytes_loaded = 0;
  uint64_t bytes_stored = 0;
  uint64_t port_beats = 0;
  uint64_t bank_conflicts = 0;
  std::vector<scalar::IssueEvent> issue_timeline;
  std::vector<scalar::DispatchEvent> dispatch_events;
  std::vector<IssueRecord> issues;
  std::vector<UtilWindow> windows;
  std::vector<TraceRow> trace; // only when tracing is enabled

  double performance() const {
    return cycles ? static_cast<double>(dpflops) / static_cast<double>(cycles)
                  : 0.0;
  }
};

class Engine;

// A scalar core driving the lane-parallel vector unit through an intake
// queue, stepped by one global clock.  Deterministic: identical
// configuration and program give identical cycle-by-cycle behavior.
class Machine {
public:
  explicit Machine(MachineConfig cfg);
  ~Machine();
  Machine(Machine&&) noexcept;
  Machine& operator=(Machine&&) noexcept;

  const MachineConfig& config() const { return cfg_; }
  vunit::MemoryModel& memory();
  const vunit::MemoryModel& memory() const;

  void set_program(isa::Program prog);
  void enable_trace(bool on);

  // Run until the program completes and the vector unit drains.
  RunStats run(uint64_t max_cycles = 1ull << 32);

  uint64_t cycle() const;

  // Test access.
  uint64_t peek_vreg(unsigned reg, uint64_t element) const;
  void poke_vreg(unsigned reg, uint64_t element, uint64_t raw);
  void dump_vrf_csv(std::ostream& os, unsigned reg_limit = 32) const;

private:
  MachineConfig cfg_;
  isa::Program prog_;
  bool trace_ = false;
  std::unique_ptr<Engine> eng_;
};

// Convenience: assemble text, run it on a fresh machine.
RunStats run_assembly(const MachineConfig& cfg, std::string_view text,
                      uint64_t vl, unsigned sew = 64);

} // namespace lanesim
