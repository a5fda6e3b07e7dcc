#include "lanesim/pipeline.hpp"

namespace lanesim {

const char* unit_name(Unit u) {
  switch (u) {
    case Unit::FPU: return "fpu";
    case Unit::MUL: return "mul";
    case Unit::ALU: return "alu";
    case Unit::SLDU: return "sldu";
    case Unit::VLSU: return "vlsu";
  }
  return "?";
}

bool can_read(const ProgressTable& t, const InFlight& f, unsigned s,
              unsigned lane, uint32_t word) {
  int32_t prod = f.srcs[s].raw_producer;
  if (prod < 0) return true;
  uint32_t pid = static_cast<uint32_t>(prod);
  if (t.retired(pid)) return true;
  const InFlight& p = t.at(pid);
  if (word >= p.write_slots[lane]) return true; // outside producer's range
  return p.writes_done[lane] > word;
}

bool can_write(const ProgressTable& t, const InFlight& f, unsigned lane,
               uint32_t word) {
  if (f.waw_producer >= 0) {
    uint32_t pid = static_cast<uint32_t>(f.waw_producer);
    if (!t.retired(pid)) {
      const InFlight& p = t.at(pid);
      if (word < p.write_slots[lane] && p.writes_done[lane] <= word)
        return false;
    }
  }
  for (const WarReader& r : f.war_readers) {
    if (t.retired(r.reader_id)) continue;
    const InFlight& p = t.at(r.reader_id);
    uint32_t base = p.src_base[lane][r.src_idx];
    uint32_t count = p.src_slots[lane][r.src_idx];
    if (word < base || word >= base + count) continue; // reader never touches it
    if (p.reads_done[lane][r.src_idx] <= word - base) return false;
  }
  return true;
}

uint32_t lane_words(uint64_t vl, unsigned sew, unsigned lane, unsigned lanes) {
  if (vl == 0 || lane >= lanes) return 0;
  // elements e < vl with e % lanes == lane
  uint64_t elems = (vl + lanes - 1 - lane) / lanes;
  if (lane >= vl) elems = 0;
  uint64_t per_word = 64 / sew;
  return static_cast<uint32_t>((elems + per_word - 1) / per_word);
}

} // namespace lanesim
