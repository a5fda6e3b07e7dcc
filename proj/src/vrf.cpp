#include "lanesim/vrf.hpp"

#include <bit>
#include <ostream>

namespace lanesim::vrf {

VrfAddress map_element(unsigned reg, uint64_t element, const VrfGeometry& g,
                       unsigned sew) {
  if (reg >= g.num_vregs) throw ConfigError("register id out of range");
  if (!valid_sew(sew)) throw ConfigError("bad sew");
  uint64_t vlmax =
      static_cast<uint64_t>(g.words_per_vreg_lane) * (64 / sew) * g.lanes;
  if (element >= vlmax) throw ConfigError("element index beyond vlmax");
  unsigned lane = static_cast<unsigned>(element % g.lanes);
  uint64_t local = element / g.lanes;       // element index within the lane
  uint64_t word = local / (64 / sew);       // 64-bit word within the register
  VrfAddress a = map_word(reg, word, g);
  a.lane = lane;
  return a;
}

VrfAddress map_word(unsigned reg, uint64_t word, const VrfGeometry& g) {
  SIM_CHECK(reg < g.num_vregs && word < g.words_per_vreg_lane);
  unsigned bank = g.bank_shift
                      ? static_cast<unsigned>((word + reg) % g.banks)
                      : static_cast<unsigned>(word % g.banks);
  unsigned row =
      reg * g.rows_per_vreg() + static_cast<unsigned>(word / g.banks);
  return VrfAddress{0, bank, row};
}

BankArbiter::BankArbiter(unsigned banks)
    : banks_(banks),
      pending_(banks),
      granted_(banks, -1),
      rr_high_(banks, 0),
      rr_low_(banks, 0) {}

void BankArbiter::submit(unsigned bank, const BankRequest& req) {
  SIM_CHECK(bank < banks_);
  pending_[bank].push_back(req);
}

void BankArbiter::arbitrate() {
  for (unsigned b = 0; b < banks_; ++b) {
    auto& reqs = pending_[b];
    granted_[b] = -1;
    if (reqs.empty()) continue;

    // Single-port law: exactly one grant per bank per cycle.
    int winner = -1;
    bool winner_high = false;
    for (Prio level : {Prio::High, Prio::Low}) {
      unsigned& ptr = level == Prio::High ? rr_high_[b] : rr_low_[b];
      unsigned best_dist = ~0u;
      for (size_t i = 0; i < reqs.size(); ++i) {
        if (reqs[i].prio != level) continue;
        // round-robin distance from the pointer
        unsigned dist = (reqs[i].requester + 64 - ptr) % 64;
        if (dist < best_dist) {
          best_dist = dist;
          winner = static_cast<int>(i);
        }
      }
      if (winner >= 0) {
        winner_high = level == Prio::High;
        break;
      }
    }
    SIM_CHECK(winner >= 0);
    granted_[b] = winner;
    ++grants_;
    conflicts_ += reqs.size() - 1;
    unsigned& ptr = winner_high ? rr_high_[b] : rr_low_[b];
    ptr = (reqs[static_cast<size_t>(winner)].requester + 1) % 64;
  }
}

void BankArbiter::clear() {
  for (auto& v : pending_) v.clear();
  for (auto& g : granted_) g = -1;
}

void dump_csv(std::ostream& os, const VrfGeometry& g,
              const std::vector<VrfStorage>& lanes, unsigned reg_limit) {
  os << "register,element,lane,bank,row,value\n";
  for (unsigned reg = 0; reg < reg_limit && reg < g.num_vregs; ++reg) {
    uint64_t n = static_cast<uint64_t>(g.words_per_vreg_lane) * g.lanes;
    for (uint64_t e = 0; e < n; ++e) {
      VrfAddress a = map_element(reg, e, g, 64);
      uint64_t raw = lanes[a.lane].read(reg, static_cast<unsigned>(e / g.lanes));
      os << reg << ',' << e << ',' << a.lane << ',' << a.bank << ',' << a.row
         << ',' << std::bit_cast<double>(raw) << '\n';
    }
  }
}

} // namespace lanesim::vrf
