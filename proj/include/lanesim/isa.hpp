#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lanesim/config.hpp"

namespace lanesim::isa {

// Current vector length configuration.  vl never exceeds vlmax.
struct VecConfig {
  uint64_t vl = 0;
  unsigned sew = 64;
  uint64_t vlmax = 0;

  static VecConfig for_machine(const MachineConfig& mc, unsigned sew = 64) {
    if (!valid_sew(sew)) throw ConfigError("sew must be one of 8/16/32/64");
    return VecConfig{0, sew, mc.vlmax(sew)};
  }
};

// Strip-mining rule: the hardware grants min(requested, vlmax).
VecConfig set_vector_length(uint64_t requested, VecConfig cfg);

enum class VOpcode : uint8_t {
  VLD, VST,     // unit stride
  VLDS, VSTS,   // constant stride
  VLDX, VSTX,   // indexed (gather / scatter)
  VMADD,        // floating multiply-add vd = vs1 * vs2 + vs3
  VADD, VMUL,   // integer, optionally widening
  VINS,         // scalar -> position 0 of every lane
  VEXT,         // element -> scalar core (blocking)
  VSLIDE,       // vd[i] = vs[i + amount]
};

enum class SOpcode : uint8_t { LD, ADD, BRANCH, VDISPATCH };

const char* name(VOpcode op);
const char* name(SOpcode op);

bool is_mem(VOpcode op);
bool is_load(VOpcode op);
bool is_store(VOpcode op);
bool is_sldu(VOpcode op);
bool is_arith(VOpcode op);

// One decoded vector instruction.  Memory addresses and the vector length
// are bound when the instruction is generated; the scalar core is a timing
// model and does not recompute them.
struct VectorInstr {
  VOpcode op{};
  uint8_t vd = 0;
  std::array<uint8_t, 3> vs{};
  uint8_t n_src = 0;
  uint8_t scalar_reg = 0;   // VINS source / VEXT destination
  uint64_t base = 0;        // memory base address
  int64_t stride = 0;       // VLDS/VSTS byte stride
  uint8_t index_vreg = 0;   // VLDX/VSTX offset vector
  int64_t slide_amount = 0; // VSLIDE; VEXT element index
  uint64_t vl = 0;
  uint8_t sew = 64;
  bool widen = false;       // VADD/VMUL writing 2*sew results
  uint32_t id = 0;          // program-order id, unique per program

  bool operator==(const VectorInstr&) const = default;
};

struct ScalarInstr {
  SOpcode op{};
  uint8_t rd = 0;
  uint8_t rs1 = 0;
  uint8_t rs2 = 0;
  bool has_imm = false;
  int64_t imm = 0;
  uint64_t addr = 0;        // LD effective address
  int64_t branch_target = -1;
  std::optional<VectorInstr> vec; // VDISPATCH payload

  bool operator==(const ScalarInstr&) const = default;
};

using Program = std::vector<ScalarInstr>;

// Scalar register names: x0..x31 or the usual ABI aliases (zero, t0, a0, ...).
unsigned scalar_reg_index(std::string_view name);
std::string scalar_reg_name(unsigned index);

// Text form.  `format` emits canonical syntax that `decode` parses back to
// an identical record; `decode` additionally accepts the conventional
// operand aliases used by the bundled kernels (vA, vB0, vB1, vC0..vC3).
std::string format(const ScalarInstr& si);
ScalarInstr decode(std::string_view line, const VecConfig& cfg);

// Whole-program text: one instruction per line, ';' starts a comment.
std::string program_text(const Program& prog);
Program parse_program(std::string_view text, const VecConfig& cfg);

// Assigns fresh sequential vector-instruction ids (program order).
void renumber(Program& prog);

} // namespace lanesim::isa
