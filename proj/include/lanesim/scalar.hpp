#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lanesim/isa.hpp"

namespace lanesim::scalar {

// Single-issue in-order core parameters.  Only the pieces that shape the
// vector-instruction issue rate are modeled; there is no cache and no
// speculation.
struct ScalarPipeModel {
  unsigned issue_width = 1;
  unsigned ld_latency = 2;  // execute cycles of a scalar load
  unsigned commit_ports = 2;
  unsigned dispatch_queue_depth = 4;
};

// A vector instruction crossing into the vector unit.
struct DispatchPacket {
  isa::VectorInstr instr;
  uint64_t scalar_value = 0; // VINS payload, raw bits
};

struct DispatchEvent {
  uint32_t instr_id;
  uint64_t dispatched;
  uint64_t acknowledged;
};

struct IssueEvent {
  uint32_t index; // program position
  isa::SOpcode op;
  isa::VOpcode vop;   // valid when op == VDISPATCH
  uint32_t vec_id;    // ditto
  uint64_t cycle;
};

// Where dispatched vector instructions go.  The machine's intake queue
// implements this; tests use a free-running sink.
class VectorIntake {
public:
  virtual ~VectorIntake() = default;
  virtual bool can_accept() const = 0;
  virtual void push(const DispatchPacket& pkt, uint64_t cycle) = 0;
  // True while the scalar core must wait for a vector result (VEXT).
  virtual bool result_pending() const { return false; }
};

// Accepts everything immediately; lets the scalar model run standalone.
class FreeSink : public VectorIntake {
public:
  bool can_accept() const override { return true; }
  void push(const DispatchPacket& pkt, uint64_t cycle) override {
    packets.push_back({pkt, cycle});
  }
  std::vector<std::pair<DispatchPacket, uint64_t>> packets;
};

// Memory read hook for scalar loads (byte address -> 8 bytes).
using LoadFn = std::function<uint64_t(uint64_t addr)>;

class ScalarCore {
public:
  ScalarCore(ScalarPipeModel model, const isa::Program* prog,
             VectorIntake* sink, LoadFn load);

  // Try to issue one instruction.  Returns true if something issued.
  bool step(uint64_t cycle);

  bool done() const { return pc_ >= prog_->size(); }
  uint64_t reg(unsigned idx) const { return regs_[idx]; }
  void deliver_vext(unsigned rd, uint64_t value, uint64_t ready_cycle);

  const std::vector<IssueEvent>& timeline() const { return timeline_; }

private:
  ScalarPipeModel model_;
  const isa::Program* prog_;
  VectorIntake* sink_;
  LoadFn load_;
  size_t pc_ = 0;
  std::array<uint64_t, 32> regs_{};
  std::array<uint64_t, 32> ready_{}; // cycle each register becomes readable
  bool vext_pending_ = false;
  std::vector<IssueEvent> timeline_;
};

// Run a program against a sink on an otherwise idle machine and return the
// issue timeline.  Useful for issue-rate analysis of straight-line streams.
std::vector<IssueEvent> run_scalar_stream(const isa::Program& prog,
                                          VectorIntake& sink,
                                          ScalarPipeModel model = {},
                                          LoadFn load = {},
                                          uint64_t max_cycles = 1u << 24);

struct GapStats {
  double mean = 0.0;
  uint64_t max = 0;
  uint64_t mode = 0;   // most frequent gap
  size_t samples = 0;
};

// Cycle gaps between successive issues matching `filter`, excluding the
// first `skip` matches (warm-up).  Throws MeasureError with < 2 matches.
GapStats measure_issue_gap(std::span<const IssueEvent> timeline,
                           std::function<bool(const IssueEvent&)> filter,
                           size_t skip = 0);

// Convenience: gaps between VDISPATCHes of one vector opcode.
GapStats measure_issue_gap(std::span<const IssueEvent> timeline,
                           isa::VOpcode vop, size_t skip = 0);

} // namespace lanesim::scalar
