#include "lanesim/kernels.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace lanesim::kernels {

namespace {

// Vector register conventions shared with the text-format aliases.
constexpr unsigned kVA = 1;  // broadcast scalar
constexpr unsigned kVB0 = 2; // streaming operand, double buffered
constexpr unsigned kVB1 = 3;
constexpr unsigned kVC = 4;  // accumulators (matmul: 4..4+t-1)
constexpr unsigned kVSl0 = 8, kVSl1 = 9; // shifted rows (dconv)
constexpr unsigned kVZero = 11;          // resident zero vector (dconv)
constexpr unsigned kVA1 = 12;            // second broadcast register (dconv)
constexpr unsigned kVAcc = 16;           // dconv accumulators

constexpr unsigned kT0 = 5;  // scalar temp (ABI t0)
constexpr unsigned kA0 = 10; // pointer chase registers (a0, a1, a3)
constexpr unsigned kA1 = 11;
constexpr unsigned kA3 = 13;

constexpr uint64_t kBaseAlign = 0x1000;

uint64_t align_up(uint64_t v) { return (v + kBaseAlign - 1) & ~(kBaseAlign - 1); }

struct Emitter {
  isa::Program prog;
  uint64_t vl = 0;
  unsigned sew = 64;

  // bubble-slot fillers: instructions placed into the load-use gap of the
  // {ld, add, vins, vmadd} pattern so the steady-state group stays at five
  // cycles; leftovers are appended after the group
  std::vector<isa::ScalarInstr> fillers;

  void ld(unsigned rd, uint64_t addr, unsigned rs1 = 0) {
    isa::ScalarInstr s;
    s.op = isa::SOpcode::LD;
    s.rd = static_cast<uint8_t>(rd);
    s.rs1 = static_cast<uint8_t>(rs1);
    s.addr = addr;
    prog.push_back(s);
  }
  void add(unsigned rd, unsigned rs1, int64_t imm) {
    isa::ScalarInstr s;
    s.op = isa::SOpcode::ADD;
    s.rd = static_cast<uint8_t>(rd);
    s.rs1 = static_cast<uint8_t>(rs1);
    s.has_imm = true;
    s.imm = imm;
    prog.push_back(s);
  }
  isa::ScalarInstr vec(isa::VOpcode op) {
    isa::ScalarInstr s;
    s.op = isa::SOpcode::VDISPATCH;
    isa::VectorInstr v;
    v.op = op;
    v.vl = vl;
    v.sew = static_cast<uint8_t>(sew);
    s.vec = v;
    return s;
  }
  void vld(unsigned vd, uint64_t base, uint64_t vl_override = 0) {
    isa::ScalarInstr s = vec(isa::VOpcode::VLD);
    s.vec->vd = static_cast<uint8_t>(vd);
    s.vec->base = base;
    if (vl_override) s.vec->vl = vl_override;
    prog.push_back(s);
  }
  void vst(unsigned vd, uint64_t base) {
    isa::ScalarInstr s = vec(isa::VOpcode::VST);
    s.vec->vd = static_cast<uint8_t>(vd);
    s.vec->base = base;
    prog.push_back(s);
  }
  void vins(unsigned vd, unsigned rs) {
    isa::ScalarInstr s = vec(isa::VOpcode::VINS);
    s.vec->vd = static_cast<uint8_t>(vd);
    s.vec->scalar_reg = static_cast<uint8_t>(rs);
    s.rs1 = static_cast<uint8_t>(rs);
    prog.push_back(s);
  }
  void vmadd(unsigned vd, unsigned vs1, unsigned vs2, unsigned vs3) {
    isa::ScalarInstr s = vec(isa::VOpcode::VMADD);
    s.vec->vd = static_cast<uint8_t>(vd);
    s.vec->vs = {static_cast<uint8_t>(vs1), static_cast<uint8_t>(vs2),
                 static_cast<uint8_t>(vs3)};
    s.vec->n_src = 3;
    prog.push_back(s);
  }
  void vslide(unsigned vd, unsigned vs, int64_t amount) {
    isa::ScalarInstr s = vec(isa::VOpcode::VSLIDE);
    s.vec->vd = static_cast<uint8_t>(vd);
    s.vec->vs = {static_cast<uint8_t>(vs), 0, 0};
    s.vec->n_src = 1;
    s.vec->slide_amount = amount;
    prog.push_back(s);
  }

  void queue_filler(isa::ScalarInstr s) { fillers.push_back(std::move(s)); }
  void emit_filler_or_bubble() {
    if (!fillers.empty()) {
      prog.push_back(fillers.front());
      fillers.erase(fillers.begin());
    }
    // nothing to fill: the load-use bubble stays a real stall
  }
  void flush_fillers() {
    for (auto& s : fillers) prog.push_back(std::move(s));
    fillers.clear();
  }
};

void write_doubles(vunit::MemoryModel& mem, uint64_t base,
                   const std::vector<double>& v) {
  mem.write_block(base, v.data(), v.size() * 8);
}

std::vector<double> read_doubles(const vunit::MemoryModel& mem, uint64_t base,
                                 size_t n) {
  std::vector<double> v(n);
  mem.read_block(base, v.data(), n * 8);
  return v;
}

// --------------------------------------------------------------------------
// MATMUL: C <- A*B + C, row major, tiled over `t` C rows, strip-mined
// columns, software-pipelined B row loads.

KernelBuild build_matmul(const KernelSpec& spec, const MachineConfig& mc,
                         vunit::MemoryModel& mem) {
  const uint32_t n = spec.matmul.n;
  const uint32_t t = spec.matmul.tile;
  const uint64_t vlmax = mc.vlmax(64);
  const uint64_t rowb = static_cast<uint64_t>(n) * 8;

  KernelBuild kb;
  kb.in_a.base = 0x10000;
  kb.in_a.bytes = rowb * n;
  kb.in_b.base = align_up(kb.in_a.base + kb.in_a.bytes);
  kb.in_b.bytes = rowb * n;
  kb.in_c.base = align_up(kb.in_b.base + kb.in_b.bytes);
  kb.in_c.bytes = rowb * n;
  kb.out = kb.in_c;

  Rng rng(spec.seed);
  std::vector<double> data(static_cast<size_t>(n) * n);
  for (auto& x : data) x = rng.uniform();
  write_doubles(mem, kb.in_a.base, data);
  for (auto& x : data) x = rng.uniform();
  write_doubles(mem, kb.in_b.base, data);
  for (auto& x : data) x = rng.uniform();
  write_doubles(mem, kb.in_c.base, data);

  Emitter em;
  em.sew = 64;

  for (uint64_t c = 0; c < n; c += em.vl) {
    em.vl = std::min<uint64_t>(n - c, vlmax);
    kb.vl_used = std::max(kb.vl_used, em.vl);
    for (uint32_t r = 0; r < n; r += t) {
      const uint32_t rows = std::min(t, n - r);
      auto c_addr = [&](uint32_t j) {
        return kb.in_c.base + (static_cast<uint64_t>(r) + j) * rowb + c * 8;
      };
      auto b_addr = [&](uint32_t i) { return kb.in_b.base + i * rowb + c * 8; };
      auto a_addr = [&](uint32_t j, uint32_t i) {
        return kb.in_a.base + (static_cast<uint64_t>(r) + j) * rowb + i * 8;
      };

      // phase I: read the C tile
      for (uint32_t j = 0; j < rows; ++j) {
        em.vld(kVC + j, c_addr(j));
        em.add(kA3, kA3, static_cast<int64_t>(rowb));
      }
      // phase II prologue: first row of B
      em.vld(kVB0, b_addr(0));
      em.add(kA1, kA1, static_cast<int64_t>(rowb));

      for (uint32_t i = 0; i < n; ++i) {
        const unsigned cur = (i % 2 == 0) ? kVB0 : kVB1;
        const unsigned nxt = (i % 2 == 0) ? kVB1 : kVB0;
        if (i + 1 < n) {
          // next B row load and its pointer bump ride in the load-use
          // bubbles of the first two groups
          em.queue_filler([&] {
            isa::ScalarInstr s = em.vec(isa::VOpcode::VLD);
            s.vec->vd = static_cast<uint8_t>(nxt);
            s.vec->base = b_addr(i + 1);
            return s;
          }());
          em.queue_filler([&] {
            isa::ScalarInstr s;
            s.op = isa::SOpcode::ADD;
            s.rd = kA1;
            s.rs1 = kA1;
            s.has_imm = true;
            s.imm = static_cast<int64_t>(rowb);
            return s;
          }());
        }
        for (uint32_t j = 0; j < rows; ++j) {
          em.ld(kT0, a_addr(j, i), kA0);
          // bump to the next A element; the last row rewinds to the top of
          // the tile, one column over
          int64_t bump = (j + 1 < rows)
                             ? static_cast<int64_t>(rowb)
                             : 8 - static_cast<int64_t>(rowb) * (rows - 1);
          em.add(kA0, kA0, bump);
          em.emit_filler_or_bubble();
          em.vins(kVA, kT0);
          em.vmadd(kVC + j, kVA, cur, kVC + j);
        }
        em.flush_fillers();
      }

      // phase III: write the C tile back
      for (uint32_t j = 0; j < rows; ++j) {
        em.vst(kVC + j, c_addr(j));
        em.add(kA3, kA3, static_cast<int64_t>(rowb));
      }
    }
  }
  kb.program = std::move(em.prog);
  isa::renumber(kb.program);
  return kb;
}

std::vector<double> oracle_matmul(const KernelSpec& spec, const KernelBuild& kb,
                                  const vunit::MemoryModel& mem) {
  const uint32_t n = spec.matmul.n;
  auto a = read_doubles(mem, kb.in_a.base, static_cast<size_t>(n) * n);
  auto b = read_doubles(mem, kb.in_b.base, static_cast<size_t>(n) * n);
  auto c = read_doubles(mem, kb.in_c.base, static_cast<size_t>(n) * n);
  // per output element the i-accumulation order matches the stream
  for (uint32_t r = 0; r < n; ++r)
    for (uint32_t x = 0; x < n; ++x) {
      double acc = c[static_cast<size_t>(r) * n + x];
      for (uint32_t i = 0; i < n; ++i)
        acc = std::fma(a[static_cast<size_t>(r) * n + i],
                       b[static_cast<size_t>(i) * n + x], acc);
      c[static_cast<size_t>(r) * n + x] = acc;
    }
  return c;
}

// --------------------------------------------------------------------------
// DAXPY: Y <- alpha*X + Y, strip-mined.

KernelBuild build_daxpy(const KernelSpec& spec, const MachineConfig& mc,
                        vunit::MemoryModel& mem) {
  const uint32_t n = spec.daxpy.n;
  const uint64_t vlmax = mc.vlmax(64);

  KernelBuild kb;
  kb.in_a.base = 0x10000; // X
  kb.in_a.bytes = static_cast<uint64_t>(n) * 8;
  kb.in_b.base = align_up(kb.in_a.base + std::max<uint64_t>(kb.in_a.bytes, 8));
  kb.in_b.bytes = static_cast<uint64_t>(n) * 8; // Y
  kb.in_c.base = align_up(kb.in_b.base + std::max<uint64_t>(kb.in_b.bytes, 8));
  kb.in_c.bytes = 8; // alpha
  kb.out = kb.in_b;

  Rng rng(spec.seed);
  std::vector<double> data(n);
  for (auto& x : data) x = rng.uniform();
  if (n) write_doubles(mem, kb.in_a.base, data);
  for (auto& x : data) x = rng.uniform();
  if (n) write_doubles(mem, kb.in_b.base, data);
  mem.write8(kb.in_c.base, std::bit_cast<uint64_t>(spec.daxpy.alpha));

  Emitter em;
  em.sew = 64;
  for (uint64_t c = 0; c < n; c += em.vl) {
    em.vl = std::min<uint64_t>(n - c, vlmax);
    kb.vl_used = std::max(kb.vl_used, em.vl);
    em.ld(kT0, kb.in_c.base);
    em.add(kA0, kA0, 8); // fills one load-use slot
    em.vins(kVA, kT0);
    em.vld(kVB0, kb.in_a.base + c * 8); // X strip
    em.add(kA0, kA0, static_cast<int64_t>(em.vl) * 8);
    em.vld(kVB1, kb.in_b.base + c * 8); // Y strip
    em.add(kA1, kA1, static_cast<int64_t>(em.vl) * 8);
    em.vmadd(kVB1, kVA, kVB0, kVB1);
    em.vst(kVB1, kb.in_b.base + c * 8);
    em.add(kA3, kA3, static_cast<int64_t>(em.vl) * 8);
  }
  kb.program = std::move(em.prog);
  isa::renumber(kb.program);
  return kb;
}

std::vector<double> oracle_daxpy(const KernelSpec& spec, const KernelBuild& kb,
                                 const vunit::MemoryModel& mem) {
  const uint32_t n = spec.daxpy.n;
  auto x = read_doubles(mem, kb.in_a.base, n);
  auto y = read_doubles(mem, kb.in_b.base, n);
  double alpha = std::bit_cast<double>(mem.read8(kb.in_c.base));
  for (uint32_t i = 0; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
  return y;
}

// --------------------------------------------------------------------------
// DCONV: direct convolution, row vectorized (vl = image width), output
// channels tiled over the accumulator registers, padded input loaded once
// per (channel, kernel row) and realigned with slides.

struct DconvDims {
  uint32_t co, ci, k, h, w, t;
  uint32_t hp() const { return h + k - 1; } // padded height
  uint32_t wp() const { return w + k - 1; }
};

KernelBuild build_dconv(const KernelSpec& spec, const MachineConfig& mc,
                        vunit::MemoryModel& mem) {
  const DconvDims d{spec.dconv.c_out, spec.dconv.c_in, spec.dconv.k,
                    spec.dconv.h,     spec.dconv.w,   spec.dconv.c_out_tile};
  if (mc.vlmax(64) < d.wp())
    throw ConfigError("machine vector length too short for the image width");

  KernelBuild kb;
  kb.in_a.base = 0x10000; // padded input [ci][hp][wp]
  kb.in_a.bytes = static_cast<uint64_t>(d.ci) * d.hp() * d.wp() * 8;
  kb.in_b.base = align_up(kb.in_a.base + kb.in_a.bytes); // weights
  kb.in_b.bytes = static_cast<uint64_t>(d.co) * d.ci * d.k * d.k * 8;
  kb.in_c.base = align_up(kb.in_b.base + kb.in_b.bytes); // zero row
  kb.in_c.bytes = static_cast<uint64_t>(d.w) * 8;
  kb.out.base = align_up(kb.in_c.base + kb.in_c.bytes);
  kb.out.bytes = static_cast<uint64_t>(d.co) * d.h * d.w * 8;

  Rng rng(spec.seed);
  {
    // interior is random, the pad ring is zero
    std::vector<double> in(kb.in_a.bytes / 8, 0.0);
    uint32_t pad = (d.k - 1) / 2;
    for (uint32_t c = 0; c < d.ci; ++c)
      for (uint32_t y = 0; y < d.h; ++y)
        for (uint32_t x = 0; x < d.w; ++x)
          in[(static_cast<size_t>(c) * d.hp() + y + pad) * d.wp() + x + pad] =
              rng.uniform();
    write_doubles(mem, kb.in_a.base, in);
    std::vector<double> wts(kb.in_b.bytes / 8);
    for (auto& x : wts) x = rng.uniform();
    write_doubles(mem, kb.in_b.base, wts);
    std::vector<double> zeros(d.w, 0.0);
    write_doubles(mem, kb.in_c.base, zeros);
  }

  auto in_addr = [&](uint32_t c, uint32_t y) {
    return kb.in_a.base + (static_cast<size_t>(c) * d.hp() + y) * d.wp() * 8;
  };
  auto w_addr = [&](uint32_t co, uint32_t c, uint32_t kh, uint32_t kw) {
    return kb.in_b.base +
           (((static_cast<size_t>(co) * d.ci + c) * d.k + kh) * d.k + kw) * 8;
  };
  auto out_addr = [&](uint32_t co, uint32_t y) {
    return kb.out.base + (static_cast<size_t>(co) * d.h + y) * d.w * 8;
  };

  Emitter em;
  em.sew = 64;
  em.vl = d.w;
  kb.vl_used = d.w;

  // a zero vector stays resident; each output row's first tap accumulates
  // onto it instead of reloading cleared accumulators
  em.vld(kVZero, kb.in_c.base);
  em.add(kA3, kA3, 0);

  unsigned in_pp = 0, sl_pp = 0;
  em.vld(kVB0, in_addr(0, 0), d.wp());
  em.add(kA1, kA1, static_cast<int64_t>(d.wp()) * 8);

  for (uint32_t co0 = 0; co0 < d.co; co0 += d.t) {
    for (uint32_t y = 0; y < d.h; ++y) {
      bool first_slide = true;
      for (uint32_t c = 0; c < d.ci; ++c) {
        for (uint32_t kh = 0; kh < d.k; ++kh) {
          const unsigned vin = in_pp == 0 ? kVB0 : kVB1;
          bool more_rows = !(c + 1 == d.ci && kh + 1 == d.k);
          for (uint32_t kw = 0; kw < d.k; ++kw) {
            const unsigned vsl = sl_pp == 0 ? kVSl0 : kVSl1;
            sl_pp ^= 1;
            // the shift runs at the padded width so x + kw stays in range
            isa::ScalarInstr s = em.vec(isa::VOpcode::VSLIDE);
            s.vec->vd = static_cast<uint8_t>(vsl);
            s.vec->vs = {static_cast<uint8_t>(vin), 0, 0};
            s.vec->n_src = 1;
            s.vec->slide_amount = kw;
            s.vec->vl = d.wp();
            if (first_slide) {
              em.prog.push_back(s);
              first_slide = false;
            } else {
              // rides in the load-use bubble of the first group using it
              em.queue_filler(s);
            }
            bool first_tap = c == 0 && kh == 0 && kw == 0;
            for (uint32_t j = 0; j < d.t; ++j) {
              // two broadcast registers alternate so the next weight
              // transfer is not serialized behind the previous multiply-add
              const unsigned va = (j % 2 == 0) ? kVA : kVA1;
              em.ld(kT0, w_addr(co0 + j, c, kh, kw), kA0);
              em.add(kA0, kA0, static_cast<int64_t>(d.k) * 8);
              em.emit_filler_or_bubble();
              em.vins(va, kT0);
              em.vmadd(kVAcc + j, va, vsl, first_tap ? kVZero : kVAcc + j);
            }
          }
          em.flush_fillers();
          if (more_rows) {
            // next padded row, double buffered ahead of its first shift
            uint32_t nc = kh + 1 < d.k ? c : c + 1;
            uint32_t nkh = kh + 1 < d.k ? kh + 1 : 0;
            in_pp ^= 1;
            em.vld(in_pp == 0 ? kVB0 : kVB1, in_addr(nc, y + nkh), d.wp());
            em.add(kA1, kA1, static_cast<int64_t>(d.wp()) * 8);
          }
        }
      }
      em.flush_fillers();
      // the next row block's first input row goes ahead of the stores so
      // its latency hides under the write-back
      bool last_block = co0 + d.t >= d.co && y + 1 == d.h;
      if (!last_block) {
        uint32_t ny = y + 1 < d.h ? y + 1 : 0;
        in_pp ^= 1;
        em.vld(in_pp == 0 ? kVB0 : kVB1, in_addr(0, ny), d.wp());
        em.add(kA1, kA1, static_cast<int64_t>(d.wp()) * 8);
      }
      // phase III
      for (uint32_t j = 0; j < d.t; ++j) {
        em.vst(kVAcc + j, out_addr(co0 + j, y));
        em.add(kA3, kA3, static_cast<int64_t>(d.w) * 8);
      }
    }
  }
  kb.program = std::move(em.prog);
  isa::renumber(kb.program);
  return kb;
}

std::vector<double> oracle_dconv(const KernelSpec& spec, const KernelBuild& kb,
                                 const vunit::MemoryModel& mem) {
  const DconvDims d{spec.dconv.c_out, spec.dconv.c_in, spec.dconv.k,
                    spec.dconv.h,     spec.dconv.w,   spec.dconv.c_out_tile};
  auto in = read_doubles(mem, kb.in_a.base, kb.in_a.bytes / 8);
  auto wt = read_doubles(mem, kb.in_b.base, kb.in_b.bytes / 8);
  std::vector<double> out(kb.out.bytes / 8, 0.0);
  for (uint32_t co = 0; co < d.co; ++co)
    for (uint32_t y = 0; y < d.h; ++y)
      for (uint32_t x = 0; x < d.w; ++x) {
        double acc = 0.0;
        for (uint32_t c = 0; c < d.ci; ++c)
          for (uint32_t kh = 0; kh < d.k; ++kh)
            for (uint32_t kw = 0; kw < d.k; ++kw) {
              double w = wt[(((static_cast<size_t>(co) * d.ci + c) * d.k + kh) *
                             d.k) + kw];
              double v = in[(static_cast<size_t>(c) * d.hp() + y + kh) * d.wp() +
                            x + kw];
              acc = std::fma(w, v, acc);
            }
        out[(static_cast<size_t>(co) * d.h + y) * d.w + x] = acc;
      }
  return out;
}

} // namespace

KernelSpec KernelSpec::make_matmul(uint32_t n, uint32_t tile, uint64_t seed) {
  KernelSpec s;
  s.kind = KernelKind::Matmul;
  s.matmul = {n, tile};
  s.seed = seed;
  return s;
}
KernelSpec KernelSpec::make_daxpy(uint32_t n, double alpha, uint64_t seed) {
  KernelSpec s;
  s.kind = KernelKind::Daxpy;
  s.daxpy = {n, alpha};
  s.seed = seed;
  return s;
}
KernelSpec KernelSpec::make_dconv(uint32_t c_out, uint32_t c_out_tile,
                                  uint64_t seed) {
  KernelSpec s;
  s.kind = KernelKind::Dconv;
  s.dconv.c_out = c_out;
  s.dconv.c_out_tile = c_out_tile;
  s.seed = seed;
  return s;
}

void KernelSpec::validate() const {
  if (sew != 64) throw ConfigError("the bundled kernels are double precision");
  switch (kind) {
    case KernelKind::Matmul:
      if (matmul.n < 1) throw ConfigError("matmul needs n >= 1");
      if (matmul.tile < 1 || matmul.tile > 8)
        throw ConfigError("matmul tile must be in [1, 8]");
      break;
    case KernelKind::Daxpy:
      break;
    case KernelKind::Dconv: {
      if (dconv.c_in < 1 || dconv.c_out < 1 || dconv.k < 1 || !(dconv.k % 2))
        throw ConfigError("convolution needs odd k and nonzero channels");
      if (dconv.c_out_tile < 1 || dconv.c_out_tile > 16 ||
          dconv.c_out % dconv.c_out_tile)
        throw ConfigError("c_out tile must divide c_out and fit the registers");
      break;
    }
  }
}

uint64_t KernelSpec::flops() const {
  switch (kind) {
    case KernelKind::Matmul:
      return 2ull * matmul.n * matmul.n * matmul.n;
    case KernelKind::Daxpy:
      return 2ull * daxpy.n;
    case KernelKind::Dconv:
      return 2ull * dconv.c_out * dconv.c_in * dconv.k * dconv.k * dconv.h *
             dconv.w;
  }
  return 0;
}

uint64_t KernelSpec::min_traffic_bytes() const {
  switch (kind) {
    case KernelKind::Matmul:
      return 32ull * matmul.n * matmul.n; // A + B in, C in and out
    case KernelKind::Daxpy:
      return 24ull * daxpy.n; // X in, Y in and out
    case KernelKind::Dconv: {
      uint64_t hp = dconv.h + dconv.k - 1, wp = dconv.w + dconv.k - 1;
      return 8ull * (dconv.c_in * hp * wp + dconv.c_out * dconv.h * dconv.w);
    }
  }
  return 0;
}

const char* KernelSpec::name() const {
  switch (kind) {
    case KernelKind::Matmul: return "matmul";
    case KernelKind::Daxpy: return "daxpy";
    case KernelKind::Dconv: return "dconv";
  }
  return "?";
}

KernelBuild build(const KernelSpec& spec, const MachineConfig& mc,
                  vunit::MemoryModel& mem) {
  spec.validate();
  switch (spec.kind) {
    case KernelKind::Matmul: return build_matmul(spec, mc, mem);
    case KernelKind::Daxpy: return build_daxpy(spec, mc, mem);
    case KernelKind::Dconv: return build_dconv(spec, mc, mem);
  }
  throw ConfigError("unknown kernel");
}

std::vector<double> reference_oracle(const KernelSpec& spec,
                                     const KernelBuild& kb,
                                     const vunit::MemoryModel& mem) {
  switch (spec.kind) {
    case KernelKind::Matmul: return oracle_matmul(spec, kb, mem);
    case KernelKind::Daxpy: return oracle_daxpy(spec, kb, mem);
    case KernelKind::Dconv: return oracle_dconv(spec, kb, mem);
  }
  throw ConfigError("unknown kernel");
}

FunctionalCheck check_output(const KernelBuild& kb,
                             const vunit::MemoryModel& mem,
                             const std::vector<double>& expected,
                             double rel_tol) {
  FunctionalCheck fc;
  fc.checked = expected.size();
  auto got = read_doubles(mem, kb.out.base, expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    double e = expected[i], g = got[i];
    double denom = std::max(std::abs(e), 1.0);
    double rel = std::abs(g - e) / denom;
    fc.max_rel_err = std::max(fc.max_rel_err, rel);
    if (!(rel <= rel_tol)) ++fc.mismatches;
  }
  fc.ok = fc.mismatches == 0;
  return fc;
}

std::string to_text(const KernelBuild& kb) {
  return isa::program_text(kb.program);
}

} // namespace lanesim::kernels
