#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>

#include "lanesim/machine.hpp"
#include "lanesim/perf.hpp"

using namespace lanesim;

namespace {
MachineConfig cfg(unsigned lanes) {
  MachineConfig mc;
  mc.lanes = lanes;
  return mc;
}
double as_f64(uint64_t v) { return std::bit_cast<double>(v); }
} // namespace

TEST_CASE("a single load flows from memory into the register file") {
  MachineConfig mc = cfg(4);
  Machine m(mc);
  for (uint64_t i = 0; i < 16; ++i)
    m.memory().write8(0x1000 + 8 * i, std::bit_cast<uint64_t>(double(i + 1)));
  RunStats st = run_assembly(mc, "vld v2, 0x1000", 16);
  CHECK(st.bytes_loaded == 128);

  Machine m2(mc);
  for (uint64_t i = 0; i < 16; ++i)
    m2.memory().write8(0x1000 + 8 * i, std::bit_cast<uint64_t>(double(i + 1)));
  isa::VecConfig vc = isa::set_vector_length(16, isa::VecConfig::for_machine(mc));
  m2.set_program(isa::parse_program("vld v2, 0x1000", vc));
  m2.run();
  for (uint64_t i = 0; i < 16; ++i)
    CHECK(as_f64(m2.peek_vreg(2, i)) == double(i + 1));
}

TEST_CASE("load, broadcast, multiply-add and store produce correct values") {
  MachineConfig mc = cfg(4);
  Machine m(mc);
  const uint64_t vl = 16;
  for (uint64_t i = 0; i < vl; ++i) {
    m.memory().write8(0x1000 + 8 * i, std::bit_cast<uint64_t>(double(i)));
    m.memory().write8(0x2000 + 8 * i, std::bit_cast<uint64_t>(1.0));
  }
  m.memory().write8(0x3000, std::bit_cast<uint64_t>(3.0));
  isa::VecConfig vc = isa::set_vector_length(vl, isa::VecConfig::for_machine(mc));
  m.set_program(isa::parse_program(R"(
    ld t0, 0x3000(zero)
    vins v1, t0, zero
    vld v2, 0x1000       ; x
    vld v4, 0x2000       ; acc = 1.0
    vmadd v4, v1, v2, v4 ; acc = 3*x + 1
    vst v4, 0x4000
  )", vc));
  RunStats st = m.run();
  CHECK(st.dpflops == 2 * vl);
  for (uint64_t i = 0; i < vl; ++i)
    CHECK(as_f64(m.memory().read8(0x4000 + 8 * i)) == 3.0 * double(i) + 1.0);
}

TEST_CASE("runs are deterministic") {
  MachineConfig mc = cfg(8);
  auto spec = kernels::KernelSpec::make_matmul(16, 4, 7);
  perf::SimReport a = perf::run_kernel(spec, mc);
  perf::SimReport b = perf::run_kernel(spec, mc);
  CHECK(a.cycles == b.cycles);
  CHECK(a.dpflops == b.dpflops);
  CHECK(perf::to_json(a) == perf::to_json(b));
}

TEST_CASE("the slide unit inserts, extracts and slides") {
  MachineConfig mc = cfg(4);
  Machine m(mc);
  const uint64_t vl = 8;
  for (uint64_t i = 0; i < vl; ++i)
    m.memory().write8(0x1000 + 8 * i, std::bit_cast<uint64_t>(double(i + 1)));
  m.memory().write8(0x3000, std::bit_cast<uint64_t>(42.0));
  isa::VecConfig vc = isa::set_vector_length(vl, isa::VecConfig::for_machine(mc));
  m.set_program(isa::parse_program(R"(
    vld v2, 0x1000
    vslide v3, v2, 1
    vst v3, 0x4000
  )", vc));
  m.run();
  // v3[i] = v2[i+1] for in-range slots; the tail keeps its previous value
  for (uint64_t i = 0; i + 1 < vl; ++i)
    CHECK(as_f64(m.memory().read8(0x4000 + 8 * i)) == double(i + 2));
}

TEST_CASE("an empty vector length is legal no-work") {
  MachineConfig mc = cfg(2);
  RunStats st = run_assembly(mc, "vld v2, 0x1000\nvmadd v4, v1, v2, v4", 0);
  CHECK(st.dpflops == 0);
  CHECK(st.bytes_loaded == 0);
}
