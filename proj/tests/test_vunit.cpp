#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <numeric>

#include "lanesim/machine.hpp"
#include "lanesim/vunit.hpp"

using namespace lanesim;
using namespace lanesim::vunit;

namespace {
uint64_t f64(double v) { return std::bit_cast<uint64_t>(v); }
double as_f64(uint64_t v) { return std::bit_cast<double>(v); }
} // namespace

TEST_CASE("unit stride addresses") {
  AddressStream s;
  s.base = 0x1000;
  s.count = 4;
  auto a = generate_addresses(s);
  CHECK(a == std::vector<uint64_t>{0x1000, 0x1008, 0x1010, 0x1018});
}

TEST_CASE("constant stride addresses") {
  AddressStream s;
  s.mode = AddrMode::ConstStride;
  s.base = 0;
  s.stride = 256;
  s.count = 3;
  auto a = generate_addresses(s);
  CHECK(a == std::vector<uint64_t>{0, 256, 512});
}

TEST_CASE("indexed addresses follow the offset vector") {
  AddressStream s;
  s.mode = AddrMode::Indexed;
  s.base = 0x100;
  s.indices = {24, 0, 8};
  s.count = 3;
  auto a = generate_addresses(s);
  // cross-check against a naive per-element loop
  for (size_t k = 0; k < s.indices.size(); ++k)
    CHECK(a[k] == s.base + s.indices[k]);
}

TEST_CASE("misaligned elements are rejected") {
  AddressStream s;
  s.base = 0x1001;
  s.count = 1;
  CHECK_THROWS_AS(generate_addresses(s), ConfigError);
  s.base = 0x1000;
  s.mode = AddrMode::ConstStride;
  s.stride = 12;
  s.count = 2;
  CHECK_THROWS_AS(generate_addresses(s), ConfigError);
}

TEST_CASE("contiguous runs coalesce into single bursts") {
  {
    // 64 contiguous doubles form one burst; at four lanes the port moves
    // 16 bytes per cycle, so the data takes 32 cycles
    std::vector<uint64_t> a(64);
    std::iota(a.begin(), a.end(), 0);
    for (auto& x : a) x = 0x1000 + x * 8;
    auto b = coalesce(a, 8);
    REQUIRE(b.size() == 1);
    CHECK(b[0].start == 0x1000);
    CHECK(b[0].bytes == 512);
    MachineConfig mc;
    mc.lanes = 4;
    CHECK(b[0].bytes / mc.bytes_per_beat() == 32);
  }
  {
    auto b = coalesce({0x2000}, 8);
    REQUIRE(b.size() == 1);
    CHECK(b[0].bytes == 8);
  }
  {
    // stride 16 never merges
    std::vector<uint64_t> a;
    for (int i = 0; i < 8; ++i) a.push_back(0x3000 + 16 * i);
    auto b = coalesce(a, 8);
    CHECK(b.size() == 8);
  }
}

TEST_CASE("strided element transactions cost about one element per cycle") {
  MachineConfig mc;
  mc.lanes = 4;
  Machine m(mc);
  for (int i = 0; i < 8; ++i)
    m.memory().write8(0x1000 + 16 * i, f64(double(i)));
  isa::VecConfig vc = isa::set_vector_length(8, isa::VecConfig::for_machine(mc));
  m.set_program(isa::parse_program("vlds v2, 0x1000, 16", vc));
  RunStats st = m.run();
  for (uint64_t i = 0; i < 8; ++i)
    CHECK(as_f64(m.peek_vreg(2, i)) == double(i));
  // analytic: latency plus one transaction per element, plus the front end
  // and drain overheads
  CHECK(st.cycles >= mc.mem_latency + 8);
  CHECK(st.cycles <= mc.mem_latency + 8 + 24);
  CHECK(st.port_beats == 8);
}

TEST_CASE("gather and scatter run through the index register") {
  MachineConfig mc;
  mc.lanes = 2;
  Machine m(mc);
  std::vector<uint64_t> offs{24, 0, 8, 16};
  for (int i = 0; i < 4; ++i)
    m.memory().write8(0x1000 + 8 * i, f64(double(i)));
  isa::VecConfig vc = isa::set_vector_length(4, isa::VecConfig::for_machine(mc));
  for (uint64_t i = 0; i < 4; ++i) m.poke_vreg(5, i, offs[i]);
  m.set_program(isa::parse_program(R"(
    vldx v2, 0x1000, v5
    vstx v2, 0x2000, v5
  )", vc));
  m.run();
  for (uint64_t i = 0; i < 4; ++i) {
    CHECK(as_f64(m.peek_vreg(2, i)) == double(offs[i] / 8));
    CHECK(as_f64(m.memory().read8(0x2000 + offs[i])) == double(offs[i] / 8));
  }
}

TEST_CASE("the sequencer stalls the ninth concurrent instruction") {
  // eight slow loads fill the sequencer; the ninth instruction waits
  MachineConfig mc;
  mc.lanes = 2;
  mc.unit_tracker_slots = 8; // isolate the sequencer limit
  Machine m(mc);
  isa::VecConfig vc =
      isa::set_vector_length(64, isa::VecConfig::for_machine(mc));
  std::string text;
  for (int i = 0; i < 9; ++i)
    text += "vld v" + std::to_string(2 + i) + ", " +
            std::to_string(0x1000 + i * 0x1000) + "\n";
  m.set_program(isa::parse_program(text, vc));
  RunStats st = m.run();
  REQUIRE(st.issues.size() == 9);
  bool seq_full = false;
  for (const auto& ir : st.issues)
    if (ir.first_stall == vunit::StallReason::SequencerFull) seq_full = true;
  CHECK(seq_full);

  // an empty machine issues in one cycle after decode
  CHECK(st.issues[0].issued - st.issues[0].acknowledged <= 1);
}

TEST_CASE("write-after-write is recorded, not stalled") {
  MachineConfig mc;
  mc.lanes = 2;
  Machine m(mc);
  isa::VecConfig vc =
      isa::set_vector_length(32, isa::VecConfig::for_machine(mc));
  m.set_program(isa::parse_program(R"(
    vld v3, 0x1000
    vmadd v3, v4, v5, v3
  )", vc));
  RunStats st = m.run();
  REQUIRE(st.issues.size() == 2);
  // the multiply-add issued while the load was still in flight, carrying a
  // hazard record instead of waiting
  CHECK(st.issues[1].waw_producer == int32_t(st.issues[0].dyn_id));
  CHECK(st.issues[1].first_stall == vunit::StallReason::None);
}

TEST_CASE("slides, inserts and extracts") {
  MachineConfig mc;
  mc.lanes = 4;
  Machine m(mc);
  const uint64_t vl = 8;
  isa::VecConfig vc = isa::set_vector_length(vl, isa::VecConfig::for_machine(mc));
  for (uint64_t i = 0; i < vl; ++i) m.poke_vreg(2, i, f64(double(i + 1)));
  for (uint64_t i = 0; i < vl; ++i) m.poke_vreg(3, i, f64(-1.0));
  m.memory().write8(0x3000, f64(42.0));
  m.set_program(isa::parse_program(R"(
    vslide v3, v2, 0      ; identity copy
    vslide v4, v2, 3
    ld t0, 0x3000(zero)
    vins v5, t0, zero
    vext t1, v2, 5
  )", vc));
  m.run();
  for (uint64_t i = 0; i < vl; ++i)
    CHECK(as_f64(m.peek_vreg(3, i)) == double(i + 1));
  for (uint64_t i = 0; i + 3 < vl; ++i)
    CHECK(as_f64(m.peek_vreg(4, i)) == double(i + 4));
  // the broadcast lands in position zero of every lane
  for (unsigned lane = 0; lane < mc.lanes; ++lane)
    CHECK(as_f64(m.peek_vreg(5, lane)) == 42.0);
}

TEST_CASE("an all-out-of-range slide leaves the destination untouched") {
  MachineConfig mc;
  mc.lanes = 2;
  Machine m(mc);
  isa::VecConfig vc = isa::set_vector_length(4, isa::VecConfig::for_machine(mc));
  for (uint64_t i = 0; i < 4; ++i) m.poke_vreg(4, i, f64(9.0));
  m.set_program(isa::parse_program("vslide v4, v2, 4", vc));
  m.run();
  for (uint64_t i = 0; i < 4; ++i) CHECK(as_f64(m.peek_vreg(4, i)) == 9.0);
}

TEST_CASE("a log-tree of slides and adds reduces a vector") {
  // 64 integers summed with 6 slide+add stages equals the scalar sum
  MachineConfig mc;
  mc.lanes = 4;
  Machine m(mc);
  const uint64_t vl = 64;
  isa::VecConfig vc = isa::set_vector_length(vl, isa::VecConfig::for_machine(mc));
  uint64_t expect = 0;
  for (uint64_t i = 0; i < vl; ++i) {
    m.poke_vreg(2, i, 3 * i + 1);
    expect += 3 * i + 1;
  }
  std::string text;
  for (uint64_t step = 32; step >= 1; step /= 2) {
    text += "vslide v3, v2, " + std::to_string(step) + "\n";
    text += "vadd v2, v2, v3\n";
  }
  m.set_program(isa::parse_program(text, vc));
  m.run();
  CHECK(m.peek_vreg(2, 0) == expect);
}

TEST_CASE("reading an element back blocks the scalar core") {
  MachineConfig mc;
  mc.lanes = 2;
  Machine m(mc);
  isa::VecConfig vc = isa::set_vector_length(4, isa::VecConfig::for_machine(mc));
  m.poke_vreg(2, 3, f64(7.5));
  // the adds after the extract cannot issue until the value returns
  m.set_program(isa::parse_program(R"(
    vext t1, v2, 3
    add a0, t1, 0
    add a1, a1, 1
  )", vc));
  RunStats st = m.run();
  REQUIRE(st.issue_timeline.size() == 3);
  CHECK(st.issue_timeline[1].cycle - st.issue_timeline[0].cycle > 3);
}

TEST_CASE("the memory port never exceeds one beat per cycle") {
  MachineConfig mc;
  mc.lanes = 4;
  Machine m(mc);
  const uint64_t vl = 128;
  for (uint64_t i = 0; i < 2 * vl; ++i)
    m.memory().write8(0x10000 + 8 * i, f64(1.0));
  isa::VecConfig vc = isa::set_vector_length(vl, isa::VecConfig::for_machine(mc));
  m.set_program(isa::parse_program(R"(
    vld v2, 0x10000
    vld v3, 0x10400
    vst v2, 0x20000
    vst v3, 0x20400
  )", vc));
  RunStats st = m.run();
  // bandwidth ceiling: bytes moved never exceed W/8 per cycle
  CHECK(st.bytes_loaded + st.bytes_stored <=
        uint64_t(mc.bytes_per_beat()) * st.cycles);
  CHECK(st.port_beats <= st.cycles);
  CHECK(st.bytes_loaded == vl * 16);
  CHECK(st.bytes_stored == vl * 16);
}
