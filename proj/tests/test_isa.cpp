#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lanesim/isa.hpp"
#include "lanesim/kernels.hpp"

using namespace lanesim;
using namespace lanesim::isa;

namespace {
MachineConfig cfg_with_lanes(unsigned lanes) {
  MachineConfig mc;
  mc.lanes = lanes;
  return mc;
}
} // namespace

TEST_CASE("vlmax follows the register file geometry") {
  // 16 KiB per lane over 32 registers leaves 64 doubles per register per
  // lane, so vlmax = 64 * lanes at sew=64
  CHECK(cfg_with_lanes(2).vlmax(64) == 128);
  CHECK(cfg_with_lanes(4).vlmax(64) == 256);
  CHECK(cfg_with_lanes(16).vlmax(64) == 1024);
}

TEST_CASE("set_vector_length clamps to vlmax") {
  auto vc2 = VecConfig::for_machine(cfg_with_lanes(2), 64);
  CHECK(set_vector_length(256, vc2).vl == 128);
  CHECK(set_vector_length(0, vc2).vl == 0);
  CHECK(set_vector_length(0, vc2).sew == 64);

  auto vc16 = VecConfig::for_machine(cfg_with_lanes(16), 64);
  CHECK(set_vector_length(100, vc16).vl == 100);
}

TEST_CASE("vlmax scales linearly in lanes and inversely in sew") {
  for (unsigned lanes : {1u, 2u, 4u, 8u, 16u}) {
    auto mc = cfg_with_lanes(lanes);
    CHECK(mc.vlmax(64) == 64 * lanes);
    CHECK(mc.vlmax(32) == 2 * mc.vlmax(64));
    CHECK(mc.vlmax(16) == 4 * mc.vlmax(64));
    CHECK(mc.vlmax(8) == 8 * mc.vlmax(64));
  }
}

TEST_CASE("decode accepts the kernel listing syntax") {
  auto vc = set_vector_length(32, VecConfig::for_machine(cfg_with_lanes(4)));

  ScalarInstr si = decode("vmadd vC0, vA, vB0, vC0", vc);
  REQUIRE(si.op == SOpcode::VDISPATCH);
  const VectorInstr& v = *si.vec;
  CHECK(v.op == VOpcode::VMADD);
  CHECK(v.vd == 4);
  CHECK(v.vs == std::array<uint8_t, 3>{1, 2, 4});
  CHECK(v.vl == 32);

  ScalarInstr ins = decode("vins vA, t0, zero", vc);
  CHECK(ins.vec->op == VOpcode::VINS);
  CHECK(ins.vec->vd == 1);
  CHECK(ins.vec->scalar_reg == scalar_reg_index("t0"));

  ScalarInstr ld = decode("ld t0, 0x1000(zero)", vc);
  CHECK(ld.op == SOpcode::LD);
  CHECK(ld.addr == 0x1000);

  ScalarInstr add = decode("add a1, a1, a3", vc);
  CHECK(add.op == SOpcode::ADD);
  CHECK(!add.has_imm);
}

TEST_CASE("decode rejects bad input") {
  auto vc = set_vector_length(8, VecConfig::for_machine(cfg_with_lanes(4)));
  // the unknown mnemonic is named in the error
  try {
    decode("vxyz v0", vc);
    FAIL("expected a decode error");
  } catch (const DecodeError& e) {
    CHECK(std::string(e.what()).find("vxyz") != std::string::npos);
  }
  CHECK_THROWS_AS(decode("vld v32, 0x1000", vc), DecodeError);
  CHECK_THROWS_AS(decode("vmadd v1, v2, v3", vc), DecodeError); // arity
  CHECK_THROWS_AS(decode("", vc), DecodeError);
  auto vc32 = set_vector_length(8, VecConfig::for_machine(cfg_with_lanes(4), 32));
  CHECK_THROWS_AS(decode("vld v1, 0x1000", vc32), DecodeError); // sew
  auto vc64 = vc;
  CHECK_THROWS_AS(decode("vadd.w v1, v2, v3", vc64), DecodeError);
}

TEST_CASE("decode after format is the identity on every supported shape") {
  auto vc = set_vector_length(16, VecConfig::for_machine(cfg_with_lanes(4)));
  std::vector<std::string> lines = {
      "ld t0, 0x10008(zero)",
      "add a0, a0, 64",
      "add a1, a1, a3",
      "branch 12",
      "vld v2, 0x20000",
      "vst v4, 0x30000",
      "vlds v5, 0x40000, 256",
      "vsts v6, 0x50000, -16",
      "vldx v7, 0x60000, v8",
      "vstx v9, 0x60000, v10",
      "vmadd v4, v1, v2, v4",
      "vadd v11, v12, v13",
      "vmul v14, v15, v16",
      "vins v1, t0, zero",
      "vext t1, v4, 5",
      "vslide v3, v2, 1",
  };
  for (const auto& line : lines) {
    CAPTURE(line);
    ScalarInstr a = decode(line, vc);
    ScalarInstr b = decode(format(a), vc);
    CHECK(a == b);
  }
}

TEST_CASE("generated kernels round-trip through the text format") {
  MachineConfig mc = cfg_with_lanes(4);
  vunit::MemoryModel mem(mc.mem_latency);
  auto kb = kernels::build(kernels::KernelSpec::make_matmul(8, 4), mc, mem);
  auto vc = set_vector_length(8, VecConfig::for_machine(mc));
  Program again = parse_program(kernels::to_text(kb), vc);
  REQUIRE(again.size() == kb.program.size());
  for (size_t i = 0; i < again.size(); ++i) {
    CAPTURE(i);
    // ids are re-assigned by parse; compare the rest
    ScalarInstr a = kb.program[i], b = again[i];
    if (a.vec) a.vec->id = b.vec->id;
    CHECK(a == b);
  }
}
