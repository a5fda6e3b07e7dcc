#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "lanesim/pipeline.hpp"
#include "lanesim/vrf.hpp"

namespace lanesim::lane {

enum class FUKind : uint8_t { ALU, MUL, FPU };

enum class BundleOp : uint8_t {
  IAdd, IMul,          // integer, per sub-element, wrapping
  IAddW, IMulW,        // widening: sew inputs -> 2*sew outputs
  Fma,                 // floating vd = a*b + c
  FDiv, FSqrt,         // non-pipelined multi-cycle
};

struct FunctionalUnit {
  FUKind kind = FUKind::FPU;
  unsigned depth = 5;       // pipeline stages
  unsigned div_cycles = 12; // occupancy of non-pipelined ops
  static FunctionalUnit fpu(const MachineConfig& mc) {
    return {FUKind::FPU, mc.fpu_depth, mc.div_cycles};
  }
  static FunctionalUnit mul(const MachineConfig& mc) {
    return {FUKind::MUL, mc.mul_depth, mc.div_cycles};
  }
  static FunctionalUnit alu(const MachineConfig& mc) {
    return {FUKind::ALU, mc.alu_depth, mc.div_cycles};
  }
};

// One 64-bit result bundle; widening ops fill both words.
struct BundleResult {
  uint64_t lo = 0;
  uint64_t hi = 0;
  bool widened = false;
};

bool op_is_widening(BundleOp op);
bool op_is_pipelined(BundleOp op);

// Combinational datapath: 64 bits per cycle regardless of element width
// (1x64, 2x32, 4x16 or 8x8 sub-elements per bundle).  Throws ConfigError for
// unsupported op/sew combinations (e.g. widening from 64, float at sew=8).
BundleResult execute_bundle(FUKind kind, BundleOp op,
                            const std::array<uint64_t, 3>& operands,
                            unsigned sew);

// Half-precision helpers (storage is uint16).
float half_to_float(uint16_t h);
uint16_t float_to_half(float f);

// Fixed-depth execution pipeline with accept/drain handshakes.  Results
// leave `depth` cycles after acceptance; non-pipelined ops block the next
// accept for their full occupancy.
class UnitPipeline {
public:
  struct OutEntry {
    uint32_t instr_id;
    uint32_t slot;
    uint64_t value;
    uint64_t ready_at;
  };

  UnitPipeline(unsigned depth, unsigned max_in_flight)
      : depth_(depth), cap_(max_in_flight) {}

  bool can_accept(uint64_t cycle) const {
    return cycle >= busy_until_ && fifo_.size() < cap_ + depth_;
  }
  void accept(uint64_t cycle, uint32_t instr_id, uint32_t slot, uint64_t value,
              unsigned occupancy = 1) {
    SIM_CHECK(can_accept(cycle));
    fifo_.push_back({instr_id, slot, value, cycle + depth_});
    if (occupancy > 1) busy_until_ = cycle + occupancy;
  }
  // Extra result in the same accept (widening high word, one cycle later).
  void accept_extra(uint64_t cycle, uint32_t instr_id, uint32_t slot,
                    uint64_t value) {
    fifo_.push_back({instr_id, slot, value, cycle + depth_ + 1});
  }
  bool has_output(uint64_t cycle) const {
    return !fifo_.empty() && fifo_.front().ready_at <= cycle;
  }
  OutEntry pop_output() {
    OutEntry e = fifo_.front();
    fifo_.pop_front();
    return e;
  }

private:
  unsigned depth_;
  unsigned cap_;
  uint64_t busy_until_ = 0;
  std::deque<OutEntry> fifo_;
};

// Bank requester ids within one lane.  Ten operand queues (four for the
// FPU/MUL pair, three for the ALU of which two are shared with the slide
// unit, three for the VLSU) plus two write-back queues and the slide/load
// write ports.
enum Requester : unsigned {
  kReqFpuSrc0 = 0,
  kReqFpuSrc1 = 1,
  kReqFpuSrc2 = 2,
  kReqFpuSrc3 = 3, // reserved for a mask operand; unused by this subset
  kReqAluSrc0 = 4,
  kReqAluSrc1 = 5, // shared with the slide unit
  kReqAluSrc2 = 6, // shared with the slide unit
  kReqVlsuStore = 7,
  kReqVlsuLoad = 8,
  kReqVlsuIndex = 9,
  kReqFpuWb = 10,
  kReqAluWb = 11,
  kReqSlduWrite = 12,
};

// External access request into one lane (VLSU / SLDU side).
struct PortRequest {
  unsigned requester;
  uint32_t instr_id;
  unsigned reg;
  uint32_t word;
  bool is_write;
  uint64_t value;   // for writes
  vrf::Prio prio;
  // write ordering hooks
  bool gated = false; // checked against can_write/can_read before submit
};

struct LaneStats {
  uint64_t fpu_busy = 0;
  uint64_t mul_busy = 0;
  uint64_t alu_busy = 0;
  uint64_t bank_conflicts = 0;
};

class Lane; // defined in machine.cpp's orbit; declared here for the machine

} // namespace lanesim::lane
