#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lanesim/config.hpp"
#include "lanesim/isa.hpp"
#include "lanesim/vunit.hpp"

namespace lanesim::kernels {

struct MatmulSpec {
  uint32_t n = 16;
  uint32_t tile = 4; // C rows held in registers per pass
};

struct DaxpySpec {
  uint32_t n = 256;
  double alpha = 1.5;
};

struct DconvSpec {
  uint32_t c_out = 64, c_in = 3, k = 7, h = 112, w = 112;
  uint32_t c_out_tile = 8; // accumulator registers per pass
};

enum class KernelKind : uint8_t { Matmul, Daxpy, Dconv };

struct KernelSpec {
  KernelKind kind = KernelKind::Matmul;
  MatmulSpec matmul;
  DaxpySpec daxpy;
  DconvSpec dconv;
  uint64_t seed = 1;
  unsigned sew = 64;

  static KernelSpec make_matmul(uint32_t n, uint32_t tile = 4,
                                uint64_t seed = 1);
  static KernelSpec make_daxpy(uint32_t n, double alpha = 1.5,
                               uint64_t seed = 1);
  static KernelSpec make_dconv(uint32_t c_out = 64, uint32_t c_out_tile = 8,
                               uint64_t seed = 1);
  void validate() const; // throws ConfigError

  // Total double-precision flops (one FMA counts as two operations).
  uint64_t flops() const;
  // Minimum memory traffic in bytes (each operand moved exactly once).
  uint64_t min_traffic_bytes() const;
  const char* name() const;
};

struct Region {
  uint64_t base = 0;
  uint64_t bytes = 0;
};

// A generated kernel: instruction stream plus the memory layout it assumes.
struct KernelBuild {
  isa::Program program;
  Region in_a, in_b, in_c; // matmul A/B/C; daxpy X/Y/alpha; dconv in/w/zeros
  Region out;              // region holding the kernel's result
  uint64_t vl_used = 0;    // widest strip
};

// Deterministic data generator, identical across platforms.
class Rng {
public:
  explicit Rng(uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  uint64_t next() {
    uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // uniform in [-1, 1)
  double uniform() {
    return static_cast<double>(next() >> 11) * (2.0 / 9007199254740992.0) -
           1.0;
  }

private:
  uint64_t s_;
};

// Emit the instruction stream and write seeded input data into memory.
KernelBuild build(const KernelSpec& spec, const MachineConfig& mc,
                  vunit::MemoryModel& mem);

// Functional ground truth, computed from the inputs currently in memory
// with the same operation order the stream performs.
std::vector<double> reference_oracle(const KernelSpec& spec,
                                     const KernelBuild& kb,
                                     const vunit::MemoryModel& mem);

struct FunctionalCheck {
  bool ok = false;
  double max_rel_err = 0.0;
  uint64_t mismatches = 0;
  uint64_t checked = 0;
};

// Compare simulated memory against the oracle at 1e-12 relative tolerance.
FunctionalCheck check_output(const KernelBuild& kb,
                             const vunit::MemoryModel& mem,
                             const std::vector<double>& expected,
                             double rel_tol = 1e-12);

// Stream text (the assembly the machine consumes), for golden tests.
std::string to_text(const KernelBuild& kb);

} // namespace lanesim::kernels
