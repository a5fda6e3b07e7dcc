#include "lanesim/isa.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

namespace lanesim::isa {

VecConfig set_vector_length(uint64_t requested, VecConfig cfg) {
  cfg.vl = std::min(requested, cfg.vlmax);
  return cfg;
}

const char* name(VOpcode op) {
  switch (op) {
    case VOpcode::VLD: return "vld";
    case VOpcode::VST: return "vst";
    case VOpcode::VLDS: return "vlds";
    case VOpcode::VSTS: return "vsts";
    case VOpcode::VLDX: return "vldx";
    case VOpcode::VSTX: return "vstx";
    case VOpcode::VMADD: return "vmadd";
    case VOpcode::VADD: return "vadd";
    case VOpcode::VMUL: return "vmul";
    case VOpcode::VINS: return "vins";
    case VOpcode::VEXT: return "vext";
    case VOpcode::VSLIDE: return "vslide";
  }
  return "?";
}

const char* name(SOpcode op) {
  switch (op) {
    case SOpcode::LD: return "ld";
    case SOpcode::ADD: return "add";
    case SOpcode::BRANCH: return "branch";
    case SOpcode::VDISPATCH: return "vdispatch";
  }
  return "?";
}

bool is_mem(VOpcode op) { return is_load(op) || is_store(op); }
bool is_load(VOpcode op) {
  return op == VOpcode::VLD || op == VOpcode::VLDS || op == VOpcode::VLDX;
}
bool is_store(VOpcode op) {
  return op == VOpcode::VST || op == VOpcode::VSTS || op == VOpcode::VSTX;
}
bool is_sldu(VOpcode op) {
  return op == VOpcode::VINS || op == VOpcode::VEXT || op == VOpcode::VSLIDE;
}
bool is_arith(VOpcode op) {
  return op == VOpcode::VMADD || op == VOpcode::VADD || op == VOpcode::VMUL;
}

namespace {

const char* kAbiNames[32] = {
    "zero", "ra", "sp", "gp", "tp", "t0", "t1", "t2", "s0", "s1", "a0",
    "a1",   "a2", "a3", "a4", "a5", "a6", "a7", "s2", "s3", "s4", "s5",
    "s6",   "s7", "s8", "s9", "s10", "s11", "t3", "t4", "t5", "t6"};

// Operand names the bundled kernel listings use for readability.
const std::map<std::string, unsigned, std::less<>> kVregAliases = {
    {"va", 1},  {"vb0", 2}, {"vb1", 3}, {"vc0", 4},
    {"vc1", 5}, {"vc2", 6}, {"vc3", 7}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string> tokenize(std::string_view line) {
  // strip comment
  auto semi = line.find(';');
  if (semi != std::string_view::npos) line = line.substr(0, semi);
  std::vector<std::string> toks;
  std::string cur;
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!cur.empty()) { toks.push_back(cur); cur.clear(); }
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) toks.push_back(cur);
  return toks;
}

int64_t parse_int(const std::string& tok) {
  std::string t = lower(tok);
  bool neg = false;
  size_t pos = 0;
  if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
    neg = t[0] == '-';
    pos = 1;
  }
  int base = 10;
  if (t.size() >= pos + 2 && t[pos] == '0' && t[pos + 1] == 'x') {
    base = 16;
    pos += 2;
  }
  uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(t.data() + pos, t.data() + t.size(), value, base);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw DecodeError("bad numeric literal '" + tok + "'");
  return neg ? -static_cast<int64_t>(value) : static_cast<int64_t>(value);
}

unsigned parse_vreg(const std::string& tok) {
  std::string t = lower(tok);
  if (auto it = kVregAliases.find(t); it != kVregAliases.end()) return it->second;
  if (t.size() >= 2 && t[0] == 'v') {
    unsigned idx = 0;
    auto [ptr, ec] = std::from_chars(t.data() + 1, t.data() + t.size(), idx);
    if (ec == std::errc() && ptr == t.data() + t.size()) {
      if (idx >= 32)
        throw DecodeError("vector register id out of range: '" + tok + "'");
      return idx;
    }
  }
  throw DecodeError("expected vector register, got '" + tok + "'");
}

// "off(reg)" memory operand used by scalar loads.
std::pair<int64_t, unsigned> parse_mem_operand(const std::string& tok) {
  auto open = tok.find('(');
  auto close = tok.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw DecodeError("expected offset(reg) operand, got '" + tok + "'");
  int64_t off = parse_int(tok.substr(0, open));
  unsigned reg = scalar_reg_index(tok.substr(open + 1, close - open - 1));
  return {off, reg};
}

void expect_args(const std::vector<std::string>& t, size_t n) {
  if (t.size() != n + 1)
    throw DecodeError("'" + t[0] + "' expects " + std::to_string(n) +
                      " operands, got " + std::to_string(t.size() - 1));
}

} // namespace

unsigned scalar_reg_index(std::string_view sv) {
  std::string t = lower(sv);
  for (unsigned i = 0; i < 32; ++i)
    if (t == kAbiNames[i]) return i;
  if (t.size() >= 2 && t[0] == 'x') {
    unsigned idx = 0;
    auto [ptr, ec] = std::from_chars(t.data() + 1, t.data() + t.size(), idx);
    if (ec == std::errc() && ptr == t.data() + t.size() && idx < 32) return idx;
  }
  throw DecodeError("unknown scalar register '" + std::string(sv) + "'");
}

std::string scalar_reg_name(unsigned index) {
  SIM_CHECK(index < 32);
  return kAbiNames[index];
}

std::string format(const ScalarInstr& si) {
  std::ostringstream os;
  auto hex = [](uint64_t v) {
    std::ostringstream h;
    h << "0x" << std::hex << v;
    return h.str();
  };
  switch (si.op) {
    case SOpcode::LD:
      os << "ld " << scalar_reg_name(si.rd) << ", " << hex(si.addr) << "("
         << scalar_reg_name(si.rs1) << ")";
      break;
    case SOpcode::ADD:
      os << "add " << scalar_reg_name(si.rd) << ", " << scalar_reg_name(si.rs1)
         << ", ";
      if (si.has_imm)
        os << si.imm;
      else
        os << scalar_reg_name(si.rs2);
      break;
    case SOpcode::BRANCH:
      os << "branch " << si.branch_target;
      break;
    case SOpcode::VDISPATCH: {
      const VectorInstr& v = *si.vec;
      os << name(v.op);
      if (v.widen) os << ".w";
      os << " ";
      auto vreg = [](unsigned r) { return "v" + std::to_string(r); };
      switch (v.op) {
        case VOpcode::VLD:
        case VOpcode::VST:
          os << vreg(v.vd) << ", " << hex(v.base);
          break;
        case VOpcode::VLDS:
        case VOpcode::VSTS:
          os << vreg(v.vd) << ", " << hex(v.base) << ", " << v.stride;
          break;
        case VOpcode::VLDX:
        case VOpcode::VSTX:
          os << vreg(v.vd) << ", " << hex(v.base) << ", " << vreg(v.index_vreg);
          break;
        case VOpcode::VMADD:
          os << vreg(v.vd) << ", " << vreg(v.vs[0]) << ", " << vreg(v.vs[1])
             << ", " << vreg(v.vs[2]);
          break;
        case VOpcode::VADD:
        case VOpcode::VMUL:
          os << vreg(v.vd) << ", " << vreg(v.vs[0]) << ", " << vreg(v.vs[1]);
          break;
        case VOpcode::VINS:
          os << vreg(v.vd) << ", " << scalar_reg_name(v.scalar_reg) << ", zero";
          break;
        case VOpcode::VEXT:
          os << scalar_reg_name(v.scalar_reg) << ", " << vreg(v.vs[0]) << ", "
             << v.slide_amount;
          break;
        case VOpcode::VSLIDE:
          os << vreg(v.vd) << ", " << vreg(v.vs[0]) << ", " << v.slide_amount;
          break;
      }
      break;
    }
  }
  return os.str();
}

ScalarInstr decode(std::string_view line, const VecConfig& cfg) {
  auto toks = tokenize(line);
  if (toks.empty()) throw DecodeError("empty instruction");
  std::string mn = lower(toks[0]);
  bool widen = false;
  if (mn.size() > 2 && mn.substr(mn.size() - 2) == ".w") {
    widen = true;
    mn = mn.substr(0, mn.size() - 2);
  }

  ScalarInstr si;
  auto vec = [&](VOpcode op) {
    if (widen && op != VOpcode::VADD && op != VOpcode::VMUL)
      throw DecodeError("'.w' only applies to vadd/vmul");
    if (is_mem(op) && cfg.sew != 64)
      throw DecodeError("memory operations support sew=64 only");
    VectorInstr v;
    v.op = op;
    v.vl = cfg.vl;
    v.sew = static_cast<uint8_t>(cfg.sew);
    v.widen = widen;
    si.op = SOpcode::VDISPATCH;
    si.vec = v;
    return &*si.vec;
  };

  if (mn == "ld") {
    expect_args(toks, 2);
    si.op = SOpcode::LD;
    si.rd = static_cast<uint8_t>(scalar_reg_index(toks[1]));
    auto [off, reg] = parse_mem_operand(toks[2]);
    si.rs1 = static_cast<uint8_t>(reg);
    si.addr = static_cast<uint64_t>(off);
    return si;
  }
  if (mn == "add") {
    expect_args(toks, 3);
    si.op = SOpcode::ADD;
    si.rd = static_cast<uint8_t>(scalar_reg_index(toks[1]));
    si.rs1 = static_cast<uint8_t>(scalar_reg_index(toks[2]));
    try {
      si.rs2 = static_cast<uint8_t>(scalar_reg_index(toks[3]));
    } catch (const DecodeError&) {
      si.has_imm = true;
      si.imm = parse_int(toks[3]);
    }
    return si;
  }
  if (mn == "branch") {
    expect_args(toks, 1);
    si.op = SOpcode::BRANCH;
    si.branch_target = parse_int(toks[1]);
    return si;
  }
  if (mn == "vld" || mn == "vst") {
    expect_args(toks, 2);
    auto* v = vec(mn == "vld" ? VOpcode::VLD : VOpcode::VST);
    v->vd = static_cast<uint8_t>(parse_vreg(toks[1]));
    v->base = static_cast<uint64_t>(parse_int(toks[2]));
    return si;
  }
  if (mn == "vlds" || mn == "vsts") {
    expect_args(toks, 3);
    auto* v = vec(mn == "vlds" ? VOpcode::VLDS : VOpcode::VSTS);
    v->vd = static_cast<uint8_t>(parse_vreg(toks[1]));
    v->base = static_cast<uint64_t>(parse_int(toks[2]));
    v->stride = parse_int(toks[3]);
    return si;
  }
  if (mn == "vldx" || mn == "vstx") {
    expect_args(toks, 3);
    auto* v = vec(mn == "vldx" ? VOpcode::VLDX : VOpcode::VSTX);
    v->vd = static_cast<uint8_t>(parse_vreg(toks[1]));
    v->base = static_cast<uint64_t>(parse_int(toks[2]));
    v->index_vreg = static_cast<uint8_t>(parse_vreg(toks[3]));
    return si;
  }
  if (mn == "vmadd") {
    expect_args(toks, 4);
    auto* v = vec(VOpcode::VMADD);
    v->vd = static_cast<uint8_t>(parse_vreg(toks[1]));
    v->vs = {static_cast<uint8_t>(parse_vreg(toks[2])),
             static_cast<uint8_t>(parse_vreg(toks[3])),
             static_cast<uint8_t>(parse_vreg(toks[4]))};
    v->n_src = 3;
    return si;
  }
  if (mn == "vadd" || mn == "vmul") {
    expect_args(toks, 3);
    auto* v = vec(mn == "vadd" ? VOpcode::VADD : VOpcode::VMUL);
    if (widen && cfg.sew == 64)
      throw DecodeError("no widening form above sew=32");
    v->vd = static_cast<uint8_t>(parse_vreg(toks[1]));
    v->vs = {static_cast<uint8_t>(parse_vreg(toks[2])),
             static_cast<uint8_t>(parse_vreg(toks[3])), 0};
    v->n_src = 2;
    return si;
  }
  if (mn == "vins") {
    expect_args(toks, 3);
    auto* v = vec(VOpcode::VINS);
    if (cfg.sew != 64) throw DecodeError("vins requires sew=64");
    v->vd = static_cast<uint8_t>(parse_vreg(toks[1]));
    v->scalar_reg = static_cast<uint8_t>(scalar_reg_index(toks[2]));
    // third operand is the position, always element zero
    if (lower(toks[3]) != "zero" && parse_int(toks[3]) != 0)
      throw DecodeError("vins only supports position zero");
    si.rs1 = v->scalar_reg;
    return si;
  }
  if (mn == "vext") {
    expect_args(toks, 3);
    auto* v = vec(VOpcode::VEXT);
    if (cfg.sew != 64) throw DecodeError("vext requires sew=64");
    v->scalar_reg = static_cast<uint8_t>(scalar_reg_index(toks[1]));
    v->vs = {static_cast<uint8_t>(parse_vreg(toks[2])), 0, 0};
    v->n_src = 1;
    v->slide_amount = parse_int(toks[3]);
    si.rd = v->scalar_reg;
    return si;
  }
  if (mn == "vslide") {
    expect_args(toks, 3);
    auto* v = vec(VOpcode::VSLIDE);
    if (cfg.sew != 64) throw DecodeError("vslide requires sew=64");
    v->vd = static_cast<uint8_t>(parse_vreg(toks[1]));
    v->vs = {static_cast<uint8_t>(parse_vreg(toks[2])), 0, 0};
    v->n_src = 1;
    v->slide_amount = parse_int(toks[3]);
    return si;
  }
  throw DecodeError("unknown mnemonic '" + toks[0] + "'");
}

std::string program_text(const Program& prog) {
  std::string out;
  for (const auto& si : prog) {
    out += format(si);
    out += '\n';
  }
  return out;
}

Program parse_program(std::string_view text, const VecConfig& cfg) {
  Program prog;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!tokenize(line).empty()) prog.push_back(decode(line, cfg));
    start = end + 1;
  }
  renumber(prog);
  return prog;
}

void renumber(Program& prog) {
  uint32_t next = 0;
  for (auto& si : prog)
    if (si.vec) si.vec->id = next++;
}

} // namespace lanesim::isa
