#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "lanesim/vrf.hpp"

using namespace lanesim;
using namespace lanesim::vrf;

namespace {
VrfGeometry geom(unsigned lanes, bool shift = true) {
  MachineConfig mc;
  mc.lanes = lanes;
  mc.bank_shift = shift;
  return VrfGeometry::from(mc);
}
} // namespace

TEST_CASE("element mapping shifts the starting bank per register") {
  VrfGeometry g = geom(1);
  CHECK(map_element(0, 0, g) == VrfAddress{0, 0, 0});
  CHECK(map_element(1, 0, g).bank == 1);
  // v2 element 14: bank (14+2) mod 8, row 2*8 + 14/8
  VrfAddress a = map_element(2, 14, g);
  CHECK(a.bank == 0);
  CHECK(a.row == 17);
}

TEST_CASE("mapping matches the shifted layout for the first registers") {
  // enumerate the layout pattern: register r, element e (single lane), the
  // bank is (e + r) mod 8 and rows advance every 8 elements
  VrfGeometry g = geom(1);
  for (unsigned r = 0; r < 4; ++r)
    for (uint64_t e = 0; e < 16; ++e) {
      VrfAddress a = map_element(r, e, g);
      CHECK(a.bank == (e + r) % 8);
      CHECK(a.row == r * 8 + e / 8);
      CHECK(a.lane == 0);
    }
  // without the shift all registers start at bank 0
  VrfGeometry flat = geom(1, false);
  for (unsigned r = 0; r < 4; ++r) CHECK(map_element(r, 0, flat).bank == 0);
}

TEST_CASE("element interleave and bounds") {
  VrfGeometry g = geom(4);
  for (uint64_t e = 0; e < 64; ++e)
    CHECK(map_element(0, e, g).lane == e % 4);
  CHECK_THROWS_AS(map_element(0, g.words_per_vreg_lane * 4, g), ConfigError);
  CHECK_THROWS_AS(map_element(32, 0, g), ConfigError);
}

TEST_CASE("mapping is a bijection over each register's storage") {
  VrfGeometry g = geom(4);
  std::set<std::tuple<unsigned, unsigned, unsigned>> seen;
  for (unsigned r = 0; r < g.num_vregs; ++r) {
    uint64_t n = static_cast<uint64_t>(g.words_per_vreg_lane) * g.lanes;
    for (uint64_t e = 0; e < n; ++e) {
      VrfAddress a = map_element(r, e, g);
      CHECK(a.bank < g.banks);
      CHECK(a.row < g.num_vregs * g.rows_per_vreg());
      CHECK(seen.insert({a.lane, a.bank, a.row}).second);
    }
  }
}

TEST_CASE("high priority wins, round robin within a level") {
  BankArbiter arb(8);
  arb.submit(0, {0, 0, 0, false, Prio::High}); // e.g. an FPU read
  arb.submit(0, {8, 1, 8, false, Prio::Low});  // a memory-side access
  arb.arbitrate();
  REQUIRE(arb.granted(0) == 0);
  CHECK(arb.request(0, arb.granted(0)).prio == Prio::High);
  arb.clear();

  arb.submit(3, {5, 2, 16, true, Prio::Low});
  arb.arbitrate();
  CHECK(arb.granted(3) == 0); // single request is granted
}

TEST_CASE("round robin is fair over a contended bank") {
  BankArbiter arb(8);
  // three requesters contend for bank 0 every cycle for 300 cycles
  std::array<int, 3> grants{};
  for (int c = 0; c < 300; ++c) {
    arb.clear();
    for (unsigned r = 0; r < 3; ++r)
      arb.submit(0, {r, 0, 0, false, Prio::High});
    arb.arbitrate();
    ++grants[static_cast<size_t>(arb.granted(0))];
  }
  for (int g : grants) {
    CHECK(g >= 99);
    CHECK(g <= 101);
  }
}

TEST_CASE("shifted start banks remove the first-element conflict") {
  // eight units each read element 0 of v0..v7 in the same cycle
  auto conflicts = [](bool shift) {
    VrfGeometry g = geom(1, shift);
    BankArbiter arb(8);
    for (unsigned r = 0; r < 8; ++r) {
      VrfAddress a = map_element(r, 0, g);
      arb.submit(a.bank, {r, r, a.row, false, Prio::High});
    }
    arb.arbitrate();
    return arb.conflicts();
  };
  CHECK(conflicts(true) == 0);  // one request per bank
  CHECK(conflicts(false) == 7); // all pile onto bank 0
}

TEST_CASE("operand queue is a bounded fifo") {
  OperandQueue q(2);
  CHECK(q.push({0, 0, 11, 0}));
  CHECK(q.push({0, 1, 22, 0}));
  CHECK(!q.push({0, 2, 33, 0})); // full is reported, not fatal
  CHECK(q.pop().data == 11);
  CHECK(q.pop().data == 22);
  CHECK(q.empty());
  CHECK_THROWS_AS(q.pop(), InvariantError);
}
