#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>

#include "lanesim/kernels.hpp"
#include "lanesim/lane.hpp"
#include "lanesim/machine.hpp"

using namespace lanesim;
using namespace lanesim::lane;

namespace {
uint64_t f64(double v) { return std::bit_cast<uint64_t>(v); }
double as_f64(uint64_t v) { return std::bit_cast<double>(v); }
uint64_t pack32(uint32_t lo, uint32_t hi) {
  return uint64_t(lo) | (uint64_t(hi) << 32);
}
} // namespace

TEST_CASE("fused multiply-add on doubles") {
  auto r = execute_bundle(FUKind::FPU, BundleOp::Fma,
                          {f64(2.0), f64(3.0), f64(1.0)}, 64);
  CHECK(as_f64(r.lo) == 7.0);
  CHECK(!r.widened);
}

TEST_CASE("one bundle carries two 32-bit results per cycle") {
  uint64_t a = pack32(7, 100);
  uint64_t b = pack32(5, 200);
  auto r = execute_bundle(FUKind::ALU, BundleOp::IAdd, {a, b, 0}, 32);
  CHECK(uint32_t(r.lo) == 12);
  CHECK(uint32_t(r.lo >> 32) == 300);
  // and four 16-bit / eight 8-bit sub-elements
  auto r16 = execute_bundle(FUKind::ALU, BundleOp::IAdd,
                            {0x0001000200030004ull, 0x0010002000300040ull, 0},
                            16);
  CHECK(r16.lo == 0x0011002200330044ull);
  auto r8 = execute_bundle(FUKind::MUL, BundleOp::IMul,
                           {0x0202020202020202ull, 0x0303030303030303ull, 0},
                           8);
  CHECK(r8.lo == 0x0606060606060606ull);
}

TEST_CASE("integer arithmetic wraps") {
  auto r = execute_bundle(FUKind::ALU, BundleOp::IAdd, {~0ull, 1, 0}, 64);
  CHECK(r.lo == 0);
}

TEST_CASE("promotions read sew and write 2*sew") {
  // 2x32 -> 2x64
  uint64_t a = pack32(uint32_t(-3), 7);
  uint64_t b = pack32(5, 11);
  auto r = execute_bundle(FUKind::ALU, BundleOp::IAddW, {a, b, 0}, 32);
  CHECK(r.widened);
  CHECK(int64_t(r.lo) == 2);  // -3 + 5
  CHECK(int64_t(r.hi) == 18); // 7 + 11
  auto m = execute_bundle(FUKind::MUL, BundleOp::IMulW, {a, b, 0}, 32);
  CHECK(int64_t(m.lo) == -15);
  CHECK(int64_t(m.hi) == 77);
  // no promotion above 64 bits
  CHECK_THROWS_AS(execute_bundle(FUKind::ALU, BundleOp::IAddW, {1, 2, 0}, 64),
                  ConfigError);
}

TEST_CASE("half precision round trip and fma") {
  CHECK(half_to_float(float_to_half(1.0f)) == 1.0f);
  CHECK(half_to_float(float_to_half(-2.5f)) == -2.5f);
  CHECK(half_to_float(float_to_half(0.0f)) == 0.0f);
  uint64_t a = float_to_half(2.0f);
  uint64_t b = float_to_half(3.0f);
  uint64_t c = float_to_half(1.0f);
  auto r = execute_bundle(FUKind::FPU, BundleOp::Fma, {a, b, c}, 16);
  CHECK(half_to_float(uint16_t(r.lo)) == 7.0f);
}

TEST_CASE("ops are bound to their unit") {
  CHECK_THROWS_AS(execute_bundle(FUKind::FPU, BundleOp::IAdd, {1, 2, 0}, 64),
                  ConfigError);
  CHECK_THROWS_AS(execute_bundle(FUKind::ALU, BundleOp::Fma, {1, 2, 3}, 64),
                  ConfigError);
  CHECK_THROWS_AS(execute_bundle(FUKind::ALU, BundleOp::IMul, {1, 2, 0}, 64),
                  ConfigError);
}

TEST_CASE("divide and square root values") {
  auto d =
      execute_bundle(FUKind::FPU, BundleOp::FDiv, {f64(10.0), f64(4.0), 0}, 64);
  CHECK(as_f64(d.lo) == 2.5);
  auto s = execute_bundle(FUKind::FPU, BundleOp::FSqrt, {f64(81.0), 0, 0}, 64);
  CHECK(as_f64(s.lo) == 9.0);
}

TEST_CASE("pipeline: results exit depth cycles after acceptance, in order") {
  UnitPipeline p(5, 8);
  REQUIRE(p.can_accept(10));
  p.accept(10, 1, 0, 111);
  p.accept(11, 1, 1, 222);
  CHECK(!p.has_output(14));
  REQUIRE(p.has_output(15));
  CHECK(p.pop_output().value == 111);
  CHECK(!p.has_output(15));
  CHECK(p.has_output(16));
}

TEST_CASE("non-pipelined ops block the unit for their full occupancy") {
  UnitPipeline p(5, 8);
  p.accept(10, 1, 0, 0, 12); // a divide
  CHECK(!p.can_accept(11));
  CHECK(!p.can_accept(21));
  CHECK(p.can_accept(22));
}

TEST_CASE("throughput law: one bundle per cycle when nothing blocks") {
  // A long unit-stride load feeding a multiply-add: once the pipe fills,
  // the FPU retires one bundle per lane per cycle.
  MachineConfig mc;
  mc.lanes = 4;
  Machine m(mc);
  const uint64_t vl = 256;
  for (uint64_t i = 0; i < vl; ++i) {
    m.memory().write8(0x10000 + 8 * i, f64(1.0));
    m.memory().write8(0x20000 + 8 * i, f64(2.0));
  }
  isa::VecConfig vc =
      isa::set_vector_length(vl, isa::VecConfig::for_machine(mc));
  m.set_program(isa::parse_program(R"(
    vld v2, 0x10000
    vld v4, 0x20000
    vmadd v4, v2, v2, v4
    vst v4, 0x30000
  )", vc));
  RunStats st = m.run();
  CHECK(st.dpflops == 2 * vl);
  // 64 bundles per lane; comfortably under two cycles per bundle on
  // average, including memory latency and drain
  CHECK(st.cycles < 2 * (vl / mc.lanes) + 100);
  for (uint64_t i = 0; i < vl; ++i)
    CHECK(as_f64(m.memory().read8(0x30000 + 8 * i)) == 3.0);
}

TEST_CASE("chaining: the consumer trails the producer without forwarding") {
  MachineConfig mc;
  mc.lanes = 4;
  Machine m(mc);
  const uint64_t vl = 64;
  for (uint64_t i = 0; i < vl; ++i) {
    m.memory().write8(0x10000 + 8 * i, f64(double(i)));
    m.memory().write8(0x20000 + 8 * i, f64(1.0));
  }
  isa::VecConfig vc =
      isa::set_vector_length(vl, isa::VecConfig::for_machine(mc));
  m.set_program(isa::parse_program(R"(
    vld v4, 0x20000
    vld v2, 0x10000
    vmadd v4, v2, v2, v4
  )", vc));
  RunStats st = m.run();

  // independent bound from a naive schedule: the second load's last element
  // leaves memory after the first load's beats, the request latency and one
  // beat per element pair; it then walks the realign path, one bank grant,
  // the operand queue and the FPU pipe, and the write-back queue drains
  uint64_t beats = vl * 8 / mc.bytes_per_beat();
  uint64_t dispatch = 4;
  uint64_t last_delivery = dispatch + 2 + (mc.mem_latency + 1) + 2 * beats +
                           mc.load_commit_latency;
  uint64_t naive_finish = last_delivery + 2 + mc.fpu_depth + 4;
  CHECK(st.cycles <= naive_finish + mc.retire_notice + 4);
  for (uint64_t i = 0; i < vl; ++i)
    CHECK(as_f64(m.peek_vreg(4, i)) == double(i) * double(i) + 1.0);
}

TEST_CASE("integer streams run on the ALU and MUL") {
  MachineConfig mc;
  mc.lanes = 2;
  Machine m(mc);
  const uint64_t vl = 16;
  isa::VecConfig vc =
      isa::set_vector_length(vl, isa::VecConfig::for_machine(mc));
  for (uint64_t i = 0; i < vl; ++i) {
    m.poke_vreg(2, i, i);
    m.poke_vreg(3, i, 3);
  }
  m.set_program(isa::parse_program(R"(
    vadd v4, v2, v3
    vmul v5, v2, v3
  )", vc));
  m.run();
  for (uint64_t i = 0; i < vl; ++i) {
    CHECK(m.peek_vreg(4, i) == i + 3);
    CHECK(m.peek_vreg(5, i) == i * 3);
  }
}
