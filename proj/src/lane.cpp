#include "lanesim/lane.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace lanesim::lane {

bool op_is_widening(BundleOp op) {
  return op == BundleOp::IAddW || op == BundleOp::IMulW;
}
bool op_is_pipelined(BundleOp op) {
  return op != BundleOp::FDiv && op != BundleOp::FSqrt;
}

float half_to_float(uint16_t h) {
  uint32_t sign = (h >> 15) & 1u;
  uint32_t exp = (h >> 10) & 0x1fu;
  uint32_t frac = h & 0x3ffu;
  uint32_t out;
  if (exp == 0) {
    if (frac == 0) {
      out = sign << 31;
    } else {
      // subnormal: normalize
      int e = -1;
      do {
        frac <<= 1;
        ++e;
      } while (!(frac & 0x400u));
      out = (sign << 31) | ((127 - 15 - e) << 23) | ((frac & 0x3ffu) << 13);
    }
  } else if (exp == 0x1f) {
    out = (sign << 31) | 0x7f800000u | (frac << 13);
  } else {
    out = (sign << 31) | ((exp - 15 + 127) << 23) | (frac << 13);
  }
  return std::bit_cast<float>(out);
}

uint16_t float_to_half(float f) {
  uint32_t x = std::bit_cast<uint32_t>(f);
  uint32_t sign = (x >> 16) & 0x8000u;
  int32_t exp = static_cast<int32_t>((x >> 23) & 0xffu) - 127 + 15;
  uint32_t frac = x & 0x7fffffu;
  if (((x >> 23) & 0xffu) == 0xffu)
    return static_cast<uint16_t>(sign | 0x7c00u | (frac ? 0x200u : 0));
  if (exp >= 0x1f) return static_cast<uint16_t>(sign | 0x7c00u); // overflow -> inf
  if (exp <= 0) {
    if (exp < -10) return static_cast<uint16_t>(sign);
    frac |= 0x800000u;
    unsigned shift = static_cast<unsigned>(14 - exp);
    uint32_t half = frac >> shift;
    // round to nearest even
    uint32_t rem = frac & ((1u << shift) - 1);
    uint32_t mid = 1u << (shift - 1);
    if (rem > mid || (rem == mid && (half & 1))) ++half;
    return static_cast<uint16_t>(sign | half);
  }
  uint32_t half = (static_cast<uint32_t>(exp) << 10) | (frac >> 13);
  uint32_t rem = frac & 0x1fffu;
  if (rem > 0x1000u || (rem == 0x1000u && (half & 1))) ++half;
  return static_cast<uint16_t>(sign | half);
}

namespace {

template <typename T>
uint64_t map_subwords(const std::array<uint64_t, 3>& ops, unsigned n_sub,
                      T fn) {
  uint64_t out = 0;
  unsigned bits = 64 / n_sub;
  uint64_t mask = bits == 64 ? ~0ull : ((1ull << bits) - 1);
  for (unsigned i = 0; i < n_sub; ++i) {
    uint64_t a = (ops[0] >> (i * bits)) & mask;
    uint64_t b = (ops[1] >> (i * bits)) & mask;
    uint64_t c = (ops[2] >> (i * bits)) & mask;
    out |= (fn(a, b, c) & mask) << (i * bits);
  }
  return out;
}

double as_f64(uint64_t v) { return std::bit_cast<double>(v); }
uint64_t from_f64(double v) { return std::bit_cast<uint64_t>(v); }
float as_f32(uint64_t v) {
  return std::bit_cast<float>(static_cast<uint32_t>(v));
}

uint64_t fma_bundle(const std::array<uint64_t, 3>& ops, unsigned sew) {
  switch (sew) {
    case 64:
      return from_f64(std::fma(as_f64(ops[0]), as_f64(ops[1]), as_f64(ops[2])));
    case 32: {
      uint64_t out = 0;
      for (unsigned i = 0; i < 2; ++i) {
        float a = as_f32(ops[0] >> (32 * i));
        float b = as_f32(ops[1] >> (32 * i));
        float c = as_f32(ops[2] >> (32 * i));
        out |= static_cast<uint64_t>(
                   std::bit_cast<uint32_t>(std::fmaf(a, b, c)))
               << (32 * i);
      }
      return out;
    }
    case 16: {
      uint64_t out = 0;
      for (unsigned i = 0; i < 4; ++i) {
        float a = half_to_float(static_cast<uint16_t>(ops[0] >> (16 * i)));
        float b = half_to_float(static_cast<uint16_t>(ops[1] >> (16 * i)));
        float c = half_to_float(static_cast<uint16_t>(ops[2] >> (16 * i)));
        out |= static_cast<uint64_t>(float_to_half(std::fmaf(a, b, c)))
               << (16 * i);
      }
      return out;
    }
    default:
      throw ConfigError("floating point needs sew 16/32/64");
  }
}

// Promote a sew-wide bundle to 2*sew: low half of inputs -> lo word,
// high half -> hi word, sign-extended.
BundleResult widen_bundle(const std::array<uint64_t, 3>& ops, unsigned sew,
                          bool mul) {
  if (sew >= 64)
    throw ConfigError("no promotion above 64-bit elements");
  unsigned n_in = 64 / sew;
  unsigned out_bits = sew * 2;
  uint64_t in_mask = (1ull << sew) - 1;
  uint64_t out_mask = out_bits == 64 ? ~0ull : ((1ull << out_bits) - 1);
  auto sext = [&](uint64_t v) {
    uint64_t sign_bit = 1ull << (sew - 1);
    return (v ^ sign_bit) - sign_bit;
  };
  BundleResult r;
  r.widened = true;
  for (unsigned i = 0; i < n_in; ++i) {
    uint64_t a = sext((ops[0] >> (i * sew)) & in_mask);
    uint64_t b = sext((ops[1] >> (i * sew)) & in_mask);
    uint64_t v = (mul ? a * b : a + b) & out_mask;
    unsigned out_idx = i % (n_in / 2);
    if (i < n_in / 2)
      r.lo |= v << (out_idx * out_bits);
    else
      r.hi |= v << (out_idx * out_bits);
  }
  return r;
}

} // namespace

BundleResult execute_bundle(FUKind kind, BundleOp op,
                            const std::array<uint64_t, 3>& operands,
                            unsigned sew) {
  if (!valid_sew(sew)) throw ConfigError("bad sew");
  switch (op) {
    case BundleOp::IAdd:
      if (kind != FUKind::ALU) throw ConfigError("integer add runs on the ALU");
      return {map_subwords(operands, 64 / sew,
                           [](uint64_t a, uint64_t b, uint64_t) { return a + b; }),
              0, false};
    case BundleOp::IMul:
      if (kind != FUKind::MUL) throw ConfigError("integer mul runs on the MUL");
      return {map_subwords(operands, 64 / sew,
                           [](uint64_t a, uint64_t b, uint64_t) { return a * b; }),
              0, false};
    case BundleOp::IAddW:
      if (kind != FUKind::ALU) throw ConfigError("integer add runs on the ALU");
      return widen_bundle(operands, sew, false);
    case BundleOp::IMulW:
      if (kind != FUKind::MUL) throw ConfigError("integer mul runs on the MUL");
      return widen_bundle(operands, sew, true);
    case BundleOp::Fma:
      if (kind != FUKind::FPU) throw ConfigError("fma runs on the FPU");
      return {fma_bundle(operands, sew), 0, false};
    case BundleOp::FDiv:
      if (kind != FUKind::FPU) throw ConfigError("divide runs on the FPU");
      if (sew != 64) throw ConfigError("divide supports sew=64 only");
      return {from_f64(as_f64(operands[0]) / as_f64(operands[1])), 0, false};
    case BundleOp::FSqrt:
      if (kind != FUKind::FPU) throw ConfigError("sqrt runs on the FPU");
      if (sew != 64) throw ConfigError("sqrt supports sew=64 only");
      return {from_f64(std::sqrt(as_f64(operands[0]))), 0, false};
  }
  throw ConfigError("unknown bundle op");
}

} // namespace lanesim::lane
