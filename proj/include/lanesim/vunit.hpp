#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "lanesim/isa.hpp"
#include "lanesim/pipeline.hpp"

namespace lanesim::vunit {

// Ideal main memory behind the wide port: fixed latency, one beat of
// W = 32*lanes bits per cycle, unbounded capacity.  Little-endian.
class MemoryModel {
public:
  explicit MemoryModel(unsigned latency) : latency_(latency) {}

  uint64_t read8(uint64_t addr) const;
  void write8(uint64_t addr, uint64_t value);
  void read_block(uint64_t addr, void* dst, size_t n) const;
  void write_block(uint64_t addr, const void* src, size_t n);

  unsigned latency() const { return latency_; }
  size_t size() const { return bytes_.size(); }
  const std::vector<uint8_t>& bytes() const { return bytes_; }

  void load_file(const std::string& path, uint64_t base);
  void save_file(const std::string& path, uint64_t base, size_t n) const;

private:
  void ensure(uint64_t end) const {
    if (end > bytes_.size()) bytes_.resize(end, 0);
  }
  unsigned latency_;
  mutable std::vector<uint8_t> bytes_;
};

enum class AddrMode : uint8_t { UnitStride, ConstStride, Indexed };

struct AddressStream {
  AddrMode mode = AddrMode::UnitStride;
  uint64_t base = 0;
  int64_t stride = 0;                  // ConstStride
  std::vector<uint64_t> indices;       // Indexed offsets, element order
  uint64_t count = 0;
  unsigned elem_size = 8;
};

// Ordered element addresses.  Throws ConfigError on a misaligned element:
// none of the bundled kernels generate one, so they are rejected rather
// than silently supported.
std::vector<uint64_t> generate_addresses(const AddressStream& s);

struct Burst {
  uint64_t start;
  uint64_t bytes;
};

// Maximal contiguous runs become single bursts; anything non-contiguous is
// one element transaction each.
std::vector<Burst> coalesce(const std::vector<uint64_t>& addrs,
                            unsigned elem_size);

// Reasons the main sequencer may refuse to issue.  Data hazards are not
// among them: they are handled per element downstream.
enum class StallReason : uint8_t {
  None,
  SequencerFull,   // eight instructions already in flight
  UnitBusy,        // target unit's tracker is full
  SharedPath,      // ALU and slide unit share operand queues
};

struct IssueDecision {
  bool issued = false;
  StallReason reason = StallReason::None;
  uint32_t blocking_id = 0;
};

const char* to_string(StallReason r);

} // namespace lanesim::vunit
