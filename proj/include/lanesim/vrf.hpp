#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <vector>

#include "lanesim/config.hpp"

namespace lanesim::vrf {

struct VrfGeometry {
  unsigned lanes = 4;
  unsigned banks = 8;
  unsigned num_vregs = 32;
  unsigned words_per_vreg_lane = 64; // 64-bit words per register per lane
  bool bank_shift = true;

  static VrfGeometry from(const MachineConfig& mc) {
    return VrfGeometry{mc.lanes, mc.banks_per_lane, mc.num_vregs,
                       mc.words_per_vreg_lane(), mc.bank_shift};
  }
  unsigned rows_per_vreg() const { return words_per_vreg_lane / banks; }
};

struct VrfAddress {
  unsigned lane;
  unsigned bank;
  unsigned row;
  bool operator==(const VrfAddress&) const = default;
};

// Element -> (lane, bank, row).  Elements interleave across lanes; within a
// lane, consecutive 64-bit words walk the banks, with each register's
// starting bank shifted by its index so that element 0 of different
// registers lands in different banks.
VrfAddress map_element(unsigned reg, uint64_t element, const VrfGeometry& g,
                       unsigned sew = 64);

// Lane-local variant on 64-bit word granularity.
VrfAddress map_word(unsigned reg, uint64_t word, const VrfGeometry& g);

// Two-priority weighted round-robin bank arbiter for one lane.  Memory-side
// requesters use the low priority level so their irregular access pattern
// does not disturb streaming compute operands.
enum class Prio : uint8_t { High, Low };

struct BankRequest {
  unsigned requester; // stable id, used for round-robin fairness
  unsigned reg;
  unsigned row;
  bool is_write;
  Prio prio;
};

class BankArbiter {
public:
  explicit BankArbiter(unsigned banks);

  // Submit a request for this cycle.  Returns the slot index used by grants().
  void submit(unsigned bank, const BankRequest& req);

  // Pick at most one winner per bank; pointers advance only on grant.
  // Returns, per bank, the index into this cycle's submissions or -1.
  void arbitrate();

  int granted(unsigned bank) const { return granted_[bank]; }
  const BankRequest& request(unsigned bank, int slot) const {
    return pending_[bank][static_cast<size_t>(slot)];
  }
  unsigned pending_count(unsigned bank) const {
    return static_cast<unsigned>(pending_[bank].size());
  }

  // Requests left ungranted this cycle (conflict count for diagnostics).
  uint64_t conflicts() const { return conflicts_; }
  uint64_t grants_total() const { return grants_; }

  void clear(); // drop this cycle's submissions

private:
  unsigned banks_;
  std::vector<std::vector<BankRequest>> pending_;
  std::vector<int> granted_;
  std::vector<unsigned> rr_high_, rr_low_;
  uint64_t conflicts_ = 0;
  uint64_t grants_ = 0;
};

// Bounded FIFO carrying 64-bit payloads plus bookkeeping tags.
struct QueueEntry {
  uint32_t instr_id;
  uint32_t slot;      // per-lane bundle index within the instruction
  uint64_t data;
  uint64_t ready_at;  // cycle from which a consumer may pop
};

class OperandQueue {
public:
  explicit OperandQueue(unsigned depth) : depth_(depth) {}

  bool full() const { return q_.size() >= depth_; }
  bool empty() const { return q_.empty(); }
  size_t size() const { return q_.size(); }

  // Push reports `false` on a full queue; pop on empty is a checked error.
  // Upstream treats a refused push as a stall cycle.
  bool push(const QueueEntry& e) {
    if (full()) return false;
    q_.push_back(e);
    return true;
  }
  const QueueEntry& front() const {
    SIM_CHECK(!q_.empty());
    return q_.front();
  }
  QueueEntry pop() {
    SIM_CHECK(!q_.empty());
    QueueEntry e = q_.front();
    q_.pop_front();
    return e;
  }

private:
  unsigned depth_;
  std::deque<QueueEntry> q_;
};

// Value storage for one lane plus per-word writer metadata used by the
// chaining-safety checks.
class VrfStorage {
public:
  VrfStorage(const VrfGeometry& g)
      : geom_(g),
        words_(static_cast<size_t>(g.num_vregs) * g.words_per_vreg_lane, 0),
        writer_(words_.size(), kNoWriter),
        write_cycle_(words_.size(), 0) {}

  uint64_t read(unsigned reg, unsigned word) const {
    return words_[index(reg, word)];
  }
  void write(unsigned reg, unsigned word, uint64_t value, uint32_t writer_id,
             uint64_t cycle) {
    size_t i = index(reg, word);
    words_[i] = value;
    writer_[i] = writer_id;
    write_cycle_[i] = cycle;
  }
  uint32_t last_writer(unsigned reg, unsigned word) const {
    return writer_[index(reg, word)];
  }
  uint64_t last_write_cycle(unsigned reg, unsigned word) const {
    return write_cycle_[index(reg, word)];
  }

  static constexpr uint32_t kNoWriter = 0xffffffffu;

private:
  size_t index(unsigned reg, unsigned word) const {
    SIM_CHECK(reg < geom_.num_vregs && word < geom_.words_per_vreg_lane);
    return static_cast<size_t>(reg) * geom_.words_per_vreg_lane + word;
  }
  VrfGeometry geom_;
  std::vector<uint64_t> words_;
  std::vector<uint32_t> writer_;
  std::vector<uint64_t> write_cycle_;
};

// Debug dump: CSV of (register, element, lane, bank, row, value) over all
// lanes of a machine-wide register file.
void dump_csv(std::ostream& os, const VrfGeometry& g,
              const std::vector<VrfStorage>& lanes, unsigned reg_limit = 32);

} // namespace lanesim::vrf
