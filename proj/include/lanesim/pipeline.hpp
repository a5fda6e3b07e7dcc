#pragma once

// Shared in-flight instruction state.  The main sequencer owns issue and
// retirement; lanes, the load/store unit and the slide unit all read and
// update per-lane progress counters through this table.  Data hazards never
// stall issue: consumers throttle their own operand requests against the
// producer's progress, which is the whole chaining mechanism (there is no
// forwarding between units).

#include <array>
#include <cstdint>
#include <vector>

#include "lanesim/config.hpp"
#include "lanesim/isa.hpp"

namespace lanesim {

enum class Unit : uint8_t { FPU, MUL, ALU, SLDU, VLSU };

const char* unit_name(Unit u);

struct SrcDesc {
  uint8_t reg = 0;
  bool scalar_read = false; // register holds a replicated scalar: one read per lane
  int32_t raw_producer = -1;
};

// Reader of a register, as seen by a later writer (WAR ordering).
struct WarReader {
  uint32_t reader_id;
  uint8_t src_idx;
};

struct InFlight {
  isa::VectorInstr instr;
  uint64_t scalar_bits = 0; // VINS payload
  Unit unit = Unit::FPU;
  uint64_t dispatch_cycle = 0;
  uint64_t issue_cycle = 0;
  uint64_t retire_cycle = 0;

  std::vector<SrcDesc> srcs;
  int32_t waw_producer = -1;
  std::vector<WarReader> war_readers;

  // Per-lane extents, in 64-bit words.
  std::vector<uint32_t> exec_slots;           // input bundles to consume
  std::vector<uint32_t> write_slots;          // output words to commit
  std::vector<std::array<uint32_t, 3>> src_slots;
  std::vector<std::array<uint32_t, 3>> src_base; // first source word (slides)

  // Progress, updated on bank grants.
  std::vector<uint32_t> writes_done;
  std::vector<std::array<uint32_t, 3>> reads_done;

  bool issued = false;
  bool retired = false;

  // Engine-side bookkeeping.
  std::vector<uint32_t> exec_done_;                    // bundles consumed
  std::vector<std::array<uint64_t, 3>> scalar_vals_;   // latched scalar reads
  std::vector<uint8_t> vins_granted_; // bank write issued (commit pending)
  uint64_t done_cycle_ = 0;   // first cycle all work was observed complete
  bool aux_done_ = false;     // unit-specific completion (beats, ack, vext)
  bool sldu_started_ = false; // reached the head of the slide unit
  uint64_t vext_value_ = 0;
  bool vext_ready_ = false;

  bool writes_complete() const {
    for (size_t l = 0; l < write_slots.size(); ++l)
      if (writes_done[l] < write_slots[l]) return false;
    return true;
  }
  bool reads_complete() const {
    for (size_t l = 0; l < src_slots.size(); ++l)
      for (size_t s = 0; s < srcs.size(); ++s)
        if (reads_done[l][s] < src_slots[l][s]) return false;
    return true;
  }
};

// Keyed by dense dispatch ids.  Entries for retired instructions stay
// addressable until the window slides past them.
class ProgressTable {
public:
  InFlight& add(uint32_t id) {
    SIM_CHECK(id == base_ + entries_.size());
    entries_.emplace_back();
    return entries_.back();
  }
  bool contains(uint32_t id) const {
    return id >= base_ && id < base_ + entries_.size();
  }
  InFlight& at(uint32_t id) {
    SIM_CHECK(contains(id));
    return entries_[id - base_];
  }
  const InFlight& at(uint32_t id) const {
    SIM_CHECK(contains(id));
    return entries_[id - base_];
  }
  // Pre-history counts as retired.
  bool retired(uint32_t id) const {
    if (id < base_) return true;
    return contains(id) && entries_[id - base_].retired;
  }
  void trim() {
    while (!entries_.empty() && entries_.front().retired && entries_.size() > 64) {
      entries_.erase(entries_.begin());
      ++base_;
    }
  }
  size_t in_flight() const {
    size_t n = 0;
    for (const auto& e : entries_)
      if (e.issued && !e.retired) ++n;
    return n;
  }

private:
  uint32_t base_ = 0;
  std::vector<InFlight> entries_;
};

// Chaining gates.  `word` is the absolute 64-bit word index within the
// register in the given lane.

// May `f` read source `s`, word `word`, this cycle?
bool can_read(const ProgressTable& t, const InFlight& f, unsigned s,
              unsigned lane, uint32_t word);

// May `f` commit its write of `word` this cycle?  Checks both the previous
// writer (WAW) and every older reader (WAR) of the destination register.
bool can_write(const ProgressTable& t, const InFlight& f, unsigned lane,
               uint32_t word);

// Per-lane word counts for `vl` elements interleaved element-modulo-lanes.
uint32_t lane_words(uint64_t vl, unsigned sew, unsigned lane, unsigned lanes);

} // namespace lanesim
