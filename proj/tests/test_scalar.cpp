#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lanesim/kernels.hpp"
#include "lanesim/scalar.hpp"

using namespace lanesim;
using namespace lanesim::isa;
using namespace lanesim::scalar;

namespace {

VecConfig vc(unsigned lanes, uint64_t vl) {
  MachineConfig mc;
  mc.lanes = lanes;
  return set_vector_length(vl, VecConfig::for_machine(mc));
}

// The four-instruction inner loop of the matrix kernel: load an element,
// bump the pointer, broadcast, multiply-add.
Program listing_body(unsigned iterations, uint64_t vl_, bool preload_t0) {
  VecConfig c = vc(4, vl_);
  Program p;
  if (preload_t0) p.push_back(decode("ld t0, 0x100(zero)", c));
  for (unsigned i = 0; i < iterations; ++i) {
    if (!preload_t0) p.push_back(decode("ld t0, 0x100(zero)", c));
    p.push_back(decode("add a0, a0, 8", c));
    p.push_back(decode("vins vA, t0, zero", c));
    p.push_back(decode("vmadd vC0, vA, vB0, vC0", c));
    if (preload_t0) p.push_back(decode("add a1, a1, 8", c));
  }
  renumber(p);
  return p;
}

} // namespace

TEST_CASE("the four-instruction loop body runs in five cycles") {
  FreeSink sink;
  Program p = listing_body(10, 32, false);
  auto tl = run_scalar_stream(p, sink);
  // one bubble per iteration: the broadcast waits on the two-cycle load
  auto gaps = measure_issue_gap(tl, VOpcode::VMADD, 1);
  CHECK(gaps.mean == doctest::Approx(5.0));
  CHECK(gaps.max == 5);
  CHECK(gaps.mode == 5);
}

TEST_CASE("removing the load dependence shortens the loop to four cycles") {
  FreeSink sink;
  Program p = listing_body(10, 32, true);
  auto tl = run_scalar_stream(p, sink);
  auto gaps = measure_issue_gap(tl, VOpcode::VMADD, 1);
  CHECK(gaps.mean == doctest::Approx(4.0));
  CHECK(gaps.max == 4);
}

TEST_CASE("independent adds issue every cycle") {
  VecConfig c = vc(4, 8);
  Program p;
  for (int i = 0; i < 20; ++i) p.push_back(decode("add a0, a1, 8", c));
  renumber(p);
  FreeSink sink;
  auto tl = run_scalar_stream(p, sink);
  REQUIRE(tl.size() == 20);
  for (size_t i = 1; i < tl.size(); ++i)
    CHECK(tl[i].cycle - tl[i - 1].cycle == 1);
}

TEST_CASE("program order is preserved") {
  FreeSink sink;
  Program p = listing_body(6, 32, false);
  auto tl = run_scalar_stream(p, sink);
  REQUIRE(tl.size() == p.size());
  for (size_t i = 1; i < tl.size(); ++i) {
    CHECK(tl[i].cycle > tl[i - 1].cycle);
    CHECK(tl[i].index == tl[i - 1].index + 1);
  }
  // dispatches never reorder: vector ids are monotone
  uint32_t prev = 0;
  bool first = true;
  for (const auto& ev : tl) {
    if (ev.op != SOpcode::VDISPATCH) continue;
    if (!first) CHECK(ev.vec_id > prev);
    prev = ev.vec_id;
    first = false;
  }
}

TEST_CASE("the generated matrix kernel issues one FMA every five cycles") {
  MachineConfig mc;
  mc.lanes = 4;
  vunit::MemoryModel mem(mc.mem_latency);
  auto kb = kernels::build(kernels::KernelSpec::make_matmul(32, 4), mc, mem);
  FreeSink sink;
  auto tl = run_scalar_stream(kb.program, sink,
                              ScalarPipeModel{1, 2, 2, 4},
                              [&](uint64_t a) { return mem.read8(a); });
  // steady state: skip the first block's warm-up
  auto gaps = measure_issue_gap(
      tl,
      [](const IssueEvent& ev) {
        return ev.op == SOpcode::VDISPATCH && ev.vop == VOpcode::VMADD;
      },
      8);
  CHECK(gaps.mode == 5);
  // mean stays close to five: phase boundaries add a handful of larger gaps
  CHECK(gaps.mean < 5.9);
}

TEST_CASE("a full dispatch queue back-pressures the stream") {
  // a sink that never drains: the fifth dispatch must stall forever, so we
  // model a sink with limited total capacity
  struct BoundedSink : VectorIntake {
    size_t cap = 4;
    std::vector<uint64_t> cycles;
    bool can_accept() const override { return cycles.size() < cap; }
    void push(const DispatchPacket&, uint64_t c) override {
      cycles.push_back(c);
    }
  } sink;
  VecConfig c = vc(4, 8);
  Program p;
  for (int i = 0; i < 6; ++i) p.push_back(decode("vins vA, zero, zero", c));
  renumber(p);
  ScalarCore core(ScalarPipeModel{}, &p, &sink, {});
  for (uint64_t cy = 0; cy < 50 && !core.done(); ++cy) core.step(cy);
  CHECK(sink.cycles.size() == 4);
  CHECK(!core.done());
}

TEST_CASE("issue gaps against a brute-force scan of the same log") {
  MachineConfig mc;
  mc.lanes = 2;
  vunit::MemoryModel mem(mc.mem_latency);
  auto kb = kernels::build(kernels::KernelSpec::make_daxpy(256, 1.5), mc, mem);
  FreeSink sink;
  auto tl = run_scalar_stream(kb.program, sink, ScalarPipeModel{},
                              [&](uint64_t a) { return mem.read8(a); });
  auto gaps = measure_issue_gap(tl, VOpcode::VMADD, 0);

  // independent oracle: a naive pass over the event log
  std::vector<uint64_t> cycles;
  for (const auto& ev : tl)
    if (ev.op == SOpcode::VDISPATCH && ev.vop == VOpcode::VMADD)
      cycles.push_back(ev.cycle);
  REQUIRE(cycles.size() >= 2);
  uint64_t total = 0, mx = 0;
  for (size_t i = 1; i < cycles.size(); ++i) {
    uint64_t g = cycles[i] - cycles[i - 1];
    total += g;
    mx = std::max(mx, g);
  }
  CHECK(gaps.mean ==
        doctest::Approx(double(total) / double(cycles.size() - 1)));
  CHECK(gaps.max == mx);
  CHECK(gaps.samples == cycles.size() - 1);
}

TEST_CASE("a gap needs at least two matching issues") {
  FreeSink sink;
  Program p = listing_body(1, 8, false);
  auto tl = run_scalar_stream(p, sink);
  CHECK_THROWS_AS(measure_issue_gap(tl, VOpcode::VMADD, 0), MeasureError);
}
