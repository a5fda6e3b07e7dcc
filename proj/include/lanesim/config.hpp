#pragma once

#include <cstdint>

#include "lanesim/errors.hpp"

namespace lanesim {

// Static machine geometry and timing parameters.  Defaults follow the
// reference design point: ℓ lanes, a 16 KiB 8-bank register file slice per
// lane, a 32ℓ-bit memory port (2 B per peak dpflop), and operand queue
// depths picked so the bundled benchmarks reach their published rates.
struct MachineConfig {
  unsigned lanes = 4;

  // Vector register file, per lane.
  unsigned vrf_bytes_per_lane = 16 * 1024;
  unsigned banks_per_lane = 8;
  unsigned num_vregs = 32;
  // Shift each register's starting bank by its index ("barber's pole").
  // Disabled only by the conflict-count tests.
  bool bank_shift = true;

  // Execution unit pipeline depths.
  unsigned fpu_depth = 5;
  unsigned mul_depth = 2;
  unsigned alu_depth = 1;
  unsigned div_cycles = 12; // non-pipelined divide / square root

  // Operand queue depths (entries of 64 bits each, per queue).
  unsigned opq_fpu = 4;
  unsigned opq_alu = 2;
  unsigned opq_vlsu = 2;
  unsigned wb_depth = 2;

  // Memory system: fixed latency, ideal bandwidth of one beat per cycle.
  unsigned mem_latency = 10;

  // Front end.
  unsigned intake_depth = 4;       // scalar -> vector instruction queue
  unsigned seq_slots = 8;          // main sequencer in-flight instructions
  unsigned unit_tracker_slots = 4; // per-unit pending instruction cap
  unsigned scalar_ld_latency = 2;  // scalar load execute cycles

  // Scalar-broadcast path through the slide unit: cycles to stage the
  // hand-off before the per-lane writes go out, and cycles before the
  // written value is visible to operand fetch in the lanes.
  unsigned vins_setup = 3;
  unsigned vins_commit_latency = 3;

  // Cycles between an instruction finishing in the units and the main
  // sequencer observing the completion (frees its slot and clears the
  // hazards held against it).
  unsigned retire_notice = 2;

  // Cycles between a load's bank write landing and the value becoming
  // visible to dependent operand fetch (realign/merge path of the wide
  // port's lane interface).
  unsigned load_commit_latency = 2;

  // Dead cycles when an execution unit switches to the next instruction
  // (operand queue hand-over).
  unsigned fu_switch_gap = 1;

  // Head-of-line hazard resolution in the load/store unit: when set, an
  // instruction whose register hazards are unresolved blocks younger
  // memory instructions from sending their burst requests.
  bool vlsu_head_of_line = true;

  unsigned util_window = 100; // cycles per utilization report window

  unsigned mem_width_bits() const { return 32 * lanes; }
  unsigned bytes_per_beat() const { return 4 * lanes; }
  // 64-bit words each register occupies in one lane (64 at the defaults).
  unsigned words_per_vreg_lane() const {
    return vrf_bytes_per_lane / num_vregs / 8;
  }
  unsigned rows_per_vreg() const {
    return words_per_vreg_lane() / banks_per_lane;
  }
  uint64_t vlmax(unsigned sew) const {
    return static_cast<uint64_t>(words_per_vreg_lane()) * (64 / sew) * lanes;
  }

  // Throws ConfigError on an unusable geometry.
  void validate() const;
};

inline void MachineConfig::validate() const {
  if (lanes == 0 || (lanes & (lanes - 1)) != 0)
    throw ConfigError("lane count must be a power of two >= 1");
  if (banks_per_lane == 0)
    throw ConfigError("need at least one bank per lane");
  if (num_vregs != 32)
    throw ConfigError("register count is fixed at 32");
  if (vrf_bytes_per_lane % (num_vregs * 8 * banks_per_lane) != 0)
    throw ConfigError("register file bytes per lane must evenly split into "
                      "32 registers of whole bank rows");
  if (fpu_depth == 0 || mul_depth == 0 || alu_depth == 0)
    throw ConfigError("pipeline depths must be at least 1");
  if (opq_fpu == 0 || opq_alu == 0 || opq_vlsu == 0 || wb_depth == 0)
    throw ConfigError("queue depths must be at least 1");
  if (intake_depth == 0 || seq_slots == 0 || unit_tracker_slots == 0)
    throw ConfigError("front-end queue depths must be at least 1");
  if (util_window == 0)
    throw ConfigError("utilization window must be at least 1 cycle");
}

inline bool valid_sew(unsigned sew) {
  return sew == 8 || sew == 16 || sew == 32 || sew == 64;
}

} // namespace lanesim
