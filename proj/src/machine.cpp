#include "lanesim/machine.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <ostream>

#include "lanesim/lane.hpp"
#include "lanesim/pipeline.hpp"

namespace lanesim {

namespace {

// What to do with a granted bank access.
enum class GrantTag : uint8_t {
  FuRead,
  FuWrite,
  VlsuStoreRead,
  VlsuIndexRead,
  VlsuLoadWrite,
  SlduRead,
  SlduWrite,
};

struct StagedReq {
  GrantTag tag;
  unsigned requester;
  vrf::Prio prio;
  bool is_write;
  unsigned reg = 0;
  uint32_t word = 0;
  uint32_t id = 0;   // dyn instruction id
  unsigned src = 0;  // source slot for reads
  unsigned engine = 0;
  uint64_t value = 0;
};

struct WbEntry {
  uint32_t id;
  unsigned reg;
  uint32_t word;
  uint64_t value;
};

// FPU+MUL share their operand and write-back queues; the ALU has its own
// set (two of its queues double as the slide unit's read ports).
enum EngineIdx : unsigned { kEngFpuMul = 0, kEngAlu = 1, kNumEngines = 2 };

struct UnitEngine {
  std::vector<uint32_t> assigned; // dyn ids, issue order, append-only
  size_t exec_head = 0;
  std::array<size_t, 3> req_pos{};
  std::array<uint32_t, 3> req_slot{};
  std::vector<vrf::OperandQueue> srcq;
  std::deque<WbEntry> wbq;
  lane::UnitPipeline pipe_a; // FPU (or ALU)
  lane::UnitPipeline pipe_b; // MUL (unused for the ALU engine)
  uint32_t last_instr = ~0u; // for the instruction hand-over gap
  uint64_t last_accept = 0;

  UnitEngine(unsigned qdepth, unsigned depth_a, unsigned depth_b)
      : srcq(3, vrf::OperandQueue(qdepth)),
        pipe_a(depth_a, 8),
        pipe_b(depth_b, 8) {}
};

struct LaneCtx {
  vrf::VrfStorage store;
  vrf::BankArbiter arb;
  std::vector<UnitEngine> eng;
  std::vector<std::vector<StagedReq>> staged; // per bank, this cycle

  LaneCtx(const vrf::VrfGeometry& g, const MachineConfig& mc)
      : store(g), arb(g.banks) {
    eng.emplace_back(mc.opq_fpu, mc.fpu_depth, mc.mul_depth);
    eng.emplace_back(mc.opq_alu, mc.alu_depth, mc.alu_depth);
    staged.resize(g.banks);
  }
};

struct LoadWrite {
  uint32_t id;
  unsigned reg;
  uint32_t word;
  uint64_t value;
  uint64_t ready_at;
};

struct MemOp {
  uint32_t id = 0;
  bool load = false;
  vunit::AddrMode mode = vunit::AddrMode::UnitStride;
  unsigned reg = 0;
  uint64_t vl = 0;
  std::vector<uint64_t> addrs;
  uint64_t addr_ready = 0;
  bool needs_index = false;
  std::vector<uint64_t> idx_vals;
  std::vector<uint8_t> idx_have;
  uint64_t idx_collected = 0;

  bool request_sent = false;
  uint64_t request_cycle = 0;
  uint64_t beats_total = 0;
  uint64_t beats_done = 0;
  uint64_t last_beat = 0;
  bool beats_complete = false;
  bool ack_done = false;

  // store gather
  std::vector<uint64_t> elem_vals;
  std::vector<uint8_t> elem_have;
  uint64_t gathered = 0;
};

struct SldWrite {
  unsigned reg;
  uint32_t word;
  uint64_t value;
  uint64_t ready_at;
};

struct SldOp {
  uint32_t id = 0;
  uint64_t arrival = 0;      // cycle the op entered the unit's window
  uint64_t hazard_clear = 0; // first cycle every lane's hazards were clear
  bool started = false;
};

// Deferred progress bump: a write lands in the banks before the lanes'
// operand fetch may observe it.
struct PendingCommit {
  uint32_t id;
  unsigned lane;
  uint32_t word;
  uint64_t at;
};

} // namespace

// ---------------------------------------------------------------------------

class Engine : public scalar::VectorIntake {
public:
  Engine(MachineConfig cfg)
      : cfg_(cfg),
        geom_(vrf::VrfGeometry::from(cfg)),
        mem_(cfg.mem_latency) {
    for (unsigned l = 0; l < cfg_.lanes; ++l) lanes_.emplace_back(geom_, cfg_);
    vlsu_buf_.resize(cfg_.lanes);
    sld_writes_.resize(cfg_.lanes);
    unit_count_.fill(0);
  }

  // -- VectorIntake ---------------------------------------------------------
  bool can_accept() const override {
    return intake_.size() < cfg_.intake_depth;
  }
  void push(const scalar::DispatchPacket& pkt, uint64_t cycle) override {
    SIM_CHECK(can_accept());
    uint32_t dyn = next_dyn_id_++;
    intake_.push_back({pkt, dyn});
    stats_.dispatch_events.push_back({dyn, cycle, 0});
    IssueRecord rec;
    rec.dyn_id = dyn;
    rec.program_id = pkt.instr.id;
    rec.op = pkt.instr.op;
    rec.dispatched = cycle;
    rec.acknowledged = rec.issued = rec.retired = 0;
    issue_records_.push_back(rec);
  }

  // -- simulation -----------------------------------------------------------
  RunStats run(const isa::Program& prog, uint64_t max_cycles, bool trace);
  uint64_t cycle() const { return cycle_; }

  vunit::MemoryModel& memory() { return mem_; }
  const vunit::MemoryModel& memory() const { return mem_; }

  uint64_t peek_vreg(unsigned reg, uint64_t element) const {
    vrf::VrfAddress a = vrf::map_element(reg, element, geom_, 64);
    return lanes_[a.lane].store.read(reg, static_cast<unsigned>(element / cfg_.lanes));
  }
  void poke_vreg(unsigned reg, uint64_t element, uint64_t raw) {
    vrf::VrfAddress a = vrf::map_element(reg, element, geom_, 64);
    lanes_[a.lane].store.write(reg, static_cast<unsigned>(element / cfg_.lanes),
                               raw, vrf::VrfStorage::kNoWriter, 0);
  }
  void dump_vrf(std::ostream& os, unsigned reg_limit) const {
    std::vector<vrf::VrfStorage> stores;
    for (const auto& l : lanes_) stores.push_back(l.store);
    vrf::dump_csv(os, geom_, stores, reg_limit);
  }

  const MachineConfig& config() const { return cfg_; }

private:
  void step();
  void phase_requests();
  void phase_arbitrate();
  void phase_execute();
  void phase_sldu();
  void phase_vlsu_port();
  void phase_sequencer();
  void phase_metrics();

  void stage_fu_requests(unsigned l);
  void stage_wb_requests(unsigned l);
  void stage_vlsu_requests();
  void stage_sldu_requests();

  void issue_instruction(const scalar::DispatchPacket& pkt, uint32_t dyn);
  bool structural_stall(const isa::VectorInstr& v, vunit::StallReason* why,
                        uint32_t* blocker) const;
  void retire_pass();
  void apply_grant(unsigned l, const StagedReq& r);

  unsigned epw(unsigned sew) const { return 64 / sew; }
  uint64_t lane_elems(uint64_t vl, unsigned l) const {
    if (l >= vl) return 0;
    return (vl + cfg_.lanes - 1 - l) / cfg_.lanes;
  }
  unsigned bank_of(unsigned reg, uint32_t word) const {
    return vrf::map_word(reg, word, geom_).bank;
  }
  Unit engine_unit(const InFlight& f) const { return f.unit; }
  unsigned engine_of(Unit u) const {
    return (u == Unit::FPU || u == Unit::MUL) ? kEngFpuMul : kEngAlu;
  }

  MachineConfig cfg_;
  vrf::VrfGeometry geom_;
  vunit::MemoryModel mem_;
  std::vector<LaneCtx> lanes_;

  // front end
  struct IntakeEntry {
    scalar::DispatchPacket pkt;
    uint32_t dyn;
  };
  std::deque<IntakeEntry> intake_;
  std::optional<IntakeEntry> decode_reg_;
  uint32_t next_dyn_id_ = 0;

  // sequencer state
  ProgressTable table_;
  std::vector<uint32_t> active_;               // dyn ids in flight
  std::array<int, 32> last_writer_{};          // dyn id + 1, 0 = none
  std::array<std::vector<WarReader>, 32> readers_;
  std::array<bool, 32> scalar_shape_{};
  std::array<unsigned, 4> unit_count_{}; // fpumul, alu, sldu, vlsu

  // VLSU
  std::deque<MemOp> memops_;
  std::vector<std::deque<LoadWrite>> vlsu_buf_;
  uint64_t port_busy_until_ = 0;

  // SLDU
  std::deque<SldOp> sldops_;
  std::vector<std::deque<SldWrite>> sld_writes_;
  std::vector<PendingCommit> pending_commits_;
  bool vext_outstanding_ = false;

  // scalar
  std::unique_ptr<scalar::ScalarCore> score_;

  uint64_t cycle_ = 0;
  uint64_t last_progress_ = 0;
  bool trace_ = false;

  // per-cycle activity
  struct CycleActivity {
    std::vector<uint8_t> fpu, mul, alu, sldu;
    bool ld_beat = false, st_beat = false;
    void reset(unsigned lanes) {
      fpu.assign(lanes, 0);
      mul.assign(lanes, 0);
      alu.assign(lanes, 0);
      sldu.assign(lanes, 0);
      ld_beat = st_beat = false;
    }
  } act_;
  struct WindowAccum {
    uint64_t start = 0;
    uint64_t fpu = 0, mul = 0, alu = 0, sldu = 0, ld = 0, st = 0;
    uint64_t cycles = 0;
  } win_;

  RunStats stats_;
  std::vector<IssueRecord> issue_records_;

  friend class ::lanesim::Machine;
};

// ---------------------------------------------------------------------------
// issue

bool Engine::structural_stall(const isa::VectorInstr& v,
                              vunit::StallReason* why,
                              uint32_t* blocker) const {
  if (active_.size() >= cfg_.seq_slots) {
    *why = vunit::StallReason::SequencerFull;
    *blocker = active_.empty() ? 0 : active_.front();
    return true;
  }
  unsigned tracker;
  bool is_sldu_op = isa::is_sldu(v.op);
  bool is_alu_op = v.op == isa::VOpcode::VADD;
  if (isa::is_mem(v.op)) tracker = 3;
  else if (is_sldu_op) tracker = 2;
  else if (is_alu_op) tracker = 1;
  else tracker = 0;
  if (unit_count_[tracker] >= cfg_.unit_tracker_slots) {
    *why = vunit::StallReason::UnitBusy;
    *blocker = 0;
    for (uint32_t id : active_) {
      const InFlight& f = table_.at(id);
      unsigned t = f.unit == Unit::VLSU   ? 3
                   : f.unit == Unit::SLDU ? 2
                   : f.unit == Unit::ALU  ? 1
                                          : 0;
      if (t == tracker) { *blocker = id; break; }
    }
    return true;
  }
  // The slide unit borrows two ALU operand queues: the two kinds of
  // instruction cannot be in flight together.
  if (is_sldu_op && unit_count_[1] > 0) {
    *why = vunit::StallReason::SharedPath;
    return true;
  }
  if (is_alu_op && unit_count_[2] > 0) {
    *why = vunit::StallReason::SharedPath;
    return true;
  }
  return false;
}

void Engine::issue_instruction(const scalar::DispatchPacket& pkt,
                               uint32_t dyn) {
  const isa::VectorInstr& v = pkt.instr;
  InFlight& f = table_.add(dyn);
  f.instr = v;
  f.scalar_bits = pkt.scalar_value;
  f.issue_cycle = cycle_;
  f.issued = true;

  unsigned L = cfg_.lanes;
  f.exec_slots.assign(L, 0);
  f.write_slots.assign(L, 0);
  f.src_slots.assign(L, {0, 0, 0});
  f.src_base.assign(L, {0, 0, 0});
  f.writes_done.assign(L, 0);
  f.reads_done.assign(L, {0, 0, 0});
  f.exec_done_.assign(L, 0);
  f.scalar_vals_.assign(L, {0, 0, 0});
  f.vins_granted_.assign(L, 0);

  auto words = [&](uint64_t vl, unsigned sew, unsigned l) {
    return lane_words(vl, sew, l, L);
  };

  switch (v.op) {
    case isa::VOpcode::VMADD:
    case isa::VOpcode::VADD:
    case isa::VOpcode::VMUL: {
      f.unit = v.op == isa::VOpcode::VMADD ? Unit::FPU
               : v.op == isa::VOpcode::VADD ? Unit::ALU
                                            : Unit::MUL;
      for (unsigned s = 0; s < v.n_src; ++s) {
        SrcDesc d;
        d.reg = v.vs[s];
        d.scalar_read = scalar_shape_[d.reg];
        f.srcs.push_back(d);
      }
      for (unsigned l = 0; l < L; ++l) {
        uint32_t in_words = words(v.vl, v.sew, l);
        f.exec_slots[l] = in_words;
        f.write_slots[l] =
            v.widen ? words(v.vl, v.sew * 2, l) : in_words;
        for (unsigned s = 0; s < v.n_src; ++s)
          f.src_slots[l][s] =
              f.srcs[s].scalar_read ? (in_words ? 1 : 0) : in_words;
      }
      break;
    }
    case isa::VOpcode::VINS: {
      f.unit = Unit::SLDU;
      if (v.vl > 0)
        for (unsigned l = 0; l < L; ++l) f.write_slots[l] = 1;
      break;
    }
    case isa::VOpcode::VEXT: {
      f.unit = Unit::SLDU;
      SrcDesc d;
      d.reg = v.vs[0];
      f.srcs.push_back(d);
      uint64_t e = static_cast<uint64_t>(v.slide_amount);
      unsigned lane = static_cast<unsigned>(e % L);
      f.src_slots[lane][0] = 1;
      f.src_base[lane][0] = static_cast<uint32_t>(e / L);
      break;
    }
    case isa::VOpcode::VSLIDE: {
      f.unit = Unit::SLDU;
      SrcDesc d;
      d.reg = v.vs[0];
      f.srcs.push_back(d);
      uint64_t amt = static_cast<uint64_t>(v.slide_amount);
      // read source elements [amt, vl), write destinations [0, vl-amt)
      for (uint64_t se = std::min(amt, v.vl); se < v.vl; ++se) {
        unsigned l = static_cast<unsigned>(se % L);
        uint32_t w = static_cast<uint32_t>(se / L);
        if (f.src_slots[l][0] == 0) f.src_base[l][0] = w;
        ++f.src_slots[l][0];
      }
      for (unsigned l = 0; l < L; ++l)
        f.write_slots[l] =
            words(v.vl > amt ? v.vl - amt : 0, 64, l);
      break;
    }
    default: { // memory
      f.unit = Unit::VLSU;
      bool load = isa::is_load(v.op);
      unsigned s = 0;
      if (isa::is_store(v.op)) {
        SrcDesc d;
        d.reg = v.vd; // store data register
        f.srcs.push_back(d);
        for (unsigned l = 0; l < L; ++l)
          f.src_slots[l][0] = words(v.vl, 64, l);
        s = 1;
      }
      bool indexed = v.op == isa::VOpcode::VLDX || v.op == isa::VOpcode::VSTX;
      if (indexed) {
        SrcDesc d;
        d.reg = v.index_vreg;
        f.srcs.push_back(d);
        for (unsigned l = 0; l < L; ++l)
          f.src_slots[l][s] = words(v.vl, 64, l);
      }
      if (load)
        for (unsigned l = 0; l < L; ++l)
          f.write_slots[l] = words(v.vl, 64, l);

      MemOp op;
      op.id = dyn;
      op.load = load;
      op.mode = (v.op == isa::VOpcode::VLD || v.op == isa::VOpcode::VST)
                    ? vunit::AddrMode::UnitStride
                : (v.op == isa::VOpcode::VLDS || v.op == isa::VOpcode::VSTS)
                    ? vunit::AddrMode::ConstStride
                    : vunit::AddrMode::Indexed;
      op.reg = v.vd;
      op.vl = v.vl;
      op.addr_ready = cycle_ + 1; // address generation
      op.needs_index = indexed;
      if (indexed) {
        op.idx_vals.assign(v.vl, 0);
        op.idx_have.assign(v.vl, 0);
      } else {
        vunit::AddressStream st;
        st.mode = op.mode;
        st.base = v.base;
        st.stride = v.stride;
        st.count = v.vl;
        st.elem_size = 8;
        op.addrs = vunit::generate_addresses(st);
      }
      if (!load) {
        op.elem_vals.assign(v.vl, 0);
        op.elem_have.assign(v.vl, 0);
      }
      if (op.mode == vunit::AddrMode::UnitStride) {
        uint64_t bytes = v.vl * 8;
        op.beats_total = (bytes + cfg_.bytes_per_beat() - 1) / cfg_.bytes_per_beat();
      } else {
        op.beats_total = v.vl; // one element transaction per cycle
      }
      if (op.beats_total == 0) {
        op.beats_complete = true;
        op.request_sent = true;
        op.last_beat = cycle_;
      }
      if (!load) op.request_sent = true; // stores pay no request latency
      memops_.push_back(std::move(op));
      break;
    }
  }

  // hazard bookkeeping (RAW on each source, WAW/WAR on the destination)
  for (unsigned s = 0; s < f.srcs.size(); ++s) {
    unsigned reg = f.srcs[s].reg;
    if (last_writer_[reg] > 0) {
      f.srcs[s].raw_producer = last_writer_[reg] - 1;
      ++issue_records_[dyn].n_raw;
    }
    readers_[reg].push_back({dyn, static_cast<uint8_t>(s)});
  }
  bool writes_reg = !f.write_slots.empty() &&
                    std::any_of(f.write_slots.begin(), f.write_slots.end(),
                                [](uint32_t w) { return w > 0; });
  if (writes_reg) {
    unsigned reg = f.instr.vd;
    if (last_writer_[reg] > 0) f.waw_producer = last_writer_[reg] - 1;
    for (const WarReader& r : readers_[reg])
      if (r.reader_id != dyn) f.war_readers.push_back(r); // not itself
    issue_records_[dyn].waw_producer = f.waw_producer;
    issue_records_[dyn].n_war = static_cast<unsigned>(f.war_readers.size());
    readers_[reg].clear();
    last_writer_[reg] = static_cast<int>(dyn) + 1;
    scalar_shape_[reg] = v.op == isa::VOpcode::VINS;
  }

  active_.push_back(dyn);
  unsigned tracker = f.unit == Unit::VLSU   ? 3
                     : f.unit == Unit::SLDU ? 2
                     : f.unit == Unit::ALU  ? 1
                                            : 0;
  ++unit_count_[tracker];

  if (f.unit == Unit::FPU || f.unit == Unit::MUL || f.unit == Unit::ALU) {
    unsigned e = engine_of(f.unit);
    for (auto& lane : lanes_) lane.eng[e].assigned.push_back(dyn);
  }
  if (f.unit == Unit::SLDU) {
    SldOp op;
    op.id = dyn;
    sldops_.push_back(op);
    if (v.op == isa::VOpcode::VEXT) vext_outstanding_ = true;
  }

  issue_records_[dyn].issued = cycle_;
}

void Engine::retire_pass() {
  for (size_t i = 0; i < active_.size();) {
    uint32_t id = active_[i];
    InFlight& f = table_.at(id);
    bool done = false;
    switch (f.unit) {
      case Unit::FPU:
      case Unit::MUL:
      case Unit::ALU: {
        bool exec_ok = true;
        for (unsigned l = 0; l < cfg_.lanes; ++l)
          if (f.exec_done_[l] < f.exec_slots[l]) exec_ok = false;
        done = exec_ok && f.writes_complete();
        break;
      }
      case Unit::SLDU:
        done = f.aux_done_ ||
               (f.instr.op != isa::VOpcode::VEXT && f.writes_complete() &&
                f.reads_complete() && f.sldu_started_);
        break;
      case Unit::VLSU:
        done = f.aux_done_;
        break;
    }
    // completion reaches the sequencer a couple of cycles later
    if (done && f.done_cycle_ == 0) f.done_cycle_ = cycle_ + 1;
    if (!done || cycle_ < f.done_cycle_ + cfg_.retire_notice) {
      ++i;
      continue;
    }
    f.retired = true;
    f.retire_cycle = cycle_;
    issue_records_[id].retired = cycle_;
    unsigned tracker = f.unit == Unit::VLSU   ? 3
                       : f.unit == Unit::SLDU ? 2
                       : f.unit == Unit::ALU  ? 1
                                              : 0;
    --unit_count_[tracker];
    active_.erase(active_.begin() + static_cast<long>(i));
    last_progress_ = cycle_;
  }
  table_.trim();
}

// ---------------------------------------------------------------------------
// request staging

void Engine::stage_fu_requests(unsigned l) {
  LaneCtx& lane = lanes_[l];
  for (unsigned e = 0; e < kNumEngines; ++e) {
    UnitEngine& eng = lane.eng[e];
    for (unsigned s = 0; s < 3; ++s) {
      // advance the cursor past finished source streams
      while (eng.req_pos[s] < eng.assigned.size()) {
        uint32_t id = eng.assigned[eng.req_pos[s]];
        const InFlight& f = table_.at(id);
        if (s >= f.srcs.size() || eng.req_slot[s] >= f.src_slots[l][s]) {
          ++eng.req_pos[s];
          eng.req_slot[s] = 0;
          continue;
        }
        break;
      }
      if (eng.req_pos[s] >= eng.assigned.size()) continue;
      uint32_t id = eng.assigned[eng.req_pos[s]];
      const InFlight& f = table_.at(id);
      if (eng.srcq[s].full()) continue;
      uint32_t word = f.src_base[l][s] + eng.req_slot[s];
      if (!can_read(table_, f, s, l, word)) continue; // chaining throttle
      StagedReq r;
      r.tag = GrantTag::FuRead;
      r.requester = (e == kEngFpuMul ? lane::kReqFpuSrc0 : lane::kReqAluSrc0) + s;
      r.prio = vrf::Prio::High;
      r.is_write = false;
      r.reg = f.srcs[s].reg;
      r.word = word;
      r.id = id;
      r.src = s;
      r.engine = e;
      lane.staged[bank_of(r.reg, word)].push_back(r);
    }
    // write-back queue head
    if (!eng.wbq.empty()) {
      const WbEntry& wb = eng.wbq.front();
      const InFlight& f = table_.at(wb.id);
      if (can_write(table_, f, l, wb.word)) {
        StagedReq r;
        r.tag = GrantTag::FuWrite;
        r.requester = e == kEngFpuMul ? lane::kReqFpuWb : lane::kReqAluWb;
        r.prio = vrf::Prio::High;
        r.is_write = true;
        r.reg = wb.reg;
        r.word = wb.word;
        r.id = wb.id;
        r.engine = e;
        r.value = wb.value;
        lane.staged[bank_of(r.reg, r.word)].push_back(r);
      }
    }
  }
}

void Engine::stage_vlsu_requests() {
  // store gather + index reads: oldest op needing them
  const MemOp* gather_op = nullptr;
  for (const MemOp& op : memops_) {
    if (!op.load && op.gathered < op.vl) { gather_op = &op; break; }
  }
  if (gather_op) {
    const InFlight& f = table_.at(gather_op->id);
    for (unsigned l = 0; l < cfg_.lanes; ++l) {
      uint32_t next = f.reads_done[l][0];
      if (next >= f.src_slots[l][0]) continue;
      if (!can_read(table_, f, 0, l, next)) continue;
      StagedReq r;
      r.tag = GrantTag::VlsuStoreRead;
      r.requester = lane::kReqVlsuStore;
      r.prio = vrf::Prio::Low;
      r.is_write = false;
      r.reg = f.srcs[0].reg;
      r.word = next;
      r.id = gather_op->id;
      r.src = 0;
      lanes_[l].staged[bank_of(r.reg, next)].push_back(r);
    }
  }
  const MemOp* idx_op = nullptr;
  for (const MemOp& op : memops_)
    if (op.needs_index && op.idx_collected < op.vl) { idx_op = &op; break; }
  if (idx_op) {
    const InFlight& f = table_.at(idx_op->id);
    unsigned s = f.srcs.size() - 1; // index operand
    for (unsigned l = 0; l < cfg_.lanes; ++l) {
      uint32_t next = f.reads_done[l][s];
      if (next >= f.src_slots[l][s]) continue;
      if (!can_read(table_, f, s, l, next)) continue;
      StagedReq r;
      r.tag = GrantTag::VlsuIndexRead;
      r.requester = lane::kReqVlsuIndex;
      r.prio = vrf::Prio::Low;
      r.is_write = false;
      r.reg = f.srcs[s].reg;
      r.word = next;
      r.id = idx_op->id;
      r.src = s;
      lanes_[l].staged[bank_of(r.reg, next)].push_back(r);
    }
  }
  // drain load delivery buffers into the register file
  for (unsigned l = 0; l < cfg_.lanes; ++l) {
    if (vlsu_buf_[l].empty()) continue;
    const LoadWrite& w = vlsu_buf_[l].front();
    if (w.ready_at > cycle_) continue;
    const InFlight& f = table_.at(w.id);
    if (!can_write(table_, f, l, w.word)) continue;
    StagedReq r;
    r.tag = GrantTag::VlsuLoadWrite;
    r.requester = lane::kReqVlsuLoad;
    r.prio = vrf::Prio::Low;
    r.is_write = true;
    r.reg = w.reg;
    r.word = w.word;
    r.id = w.id;
    r.value = w.value;
    lanes_[l].staged[bank_of(r.reg, r.word)].push_back(r);
  }
}

void Engine::stage_sldu_requests() {
  // The front op owns the cross-lane datapath.  A broadcast waiting behind
  // another broadcast may prestage its scalar hand-off, so back-to-back
  // inserts to independent registers pipeline; the hand-off restarts from
  // the point the destination's hazards clear.
  size_t window = 1;
  if (sldops_.size() >= 2 &&
      table_.at(sldops_[0].id).instr.op == isa::VOpcode::VINS &&
      table_.at(sldops_[1].id).instr.op == isa::VOpcode::VINS)
    window = 2;

  for (size_t slot = 0; slot < window && slot < sldops_.size(); ++slot) {
    SldOp& op = sldops_[slot];
    InFlight& f = table_.at(op.id);
    f.sldu_started_ = true;
    if (!op.started) {
      op.started = true;
      op.arrival = cycle_;
    }
    const isa::VectorInstr& v = f.instr;
    if (v.op == isa::VOpcode::VINS) {
      if (op.hazard_clear == 0) {
        bool clear = true;
        for (unsigned l = 0; l < cfg_.lanes; ++l)
          if (!f.vins_granted_[l] && f.write_slots[l] &&
              !can_write(table_, f, l, 0))
            clear = false;
        if (clear) op.hazard_clear = cycle_;
      }
      if (op.hazard_clear == 0) continue;
      // the scalar hand-off takes a few cycles to reach the lanes
      if (cycle_ < std::max(op.arrival, op.hazard_clear) + cfg_.vins_setup)
        continue;
      for (unsigned l = 0; l < cfg_.lanes; ++l) {
        if (f.vins_granted_[l] || f.write_slots[l] == 0) continue;
        if (!can_write(table_, f, l, 0)) continue;
        StagedReq r;
        r.tag = GrantTag::SlduWrite;
        r.requester = lane::kReqSlduWrite;
        r.prio = vrf::Prio::High;
        r.is_write = true;
        r.reg = v.vd;
        r.word = 0;
        r.id = op.id;
        r.value = f.scalar_bits;
        lanes_[l].staged[bank_of(r.reg, 0)].push_back(r);
      }
      continue;
    }
    // reads (VEXT and VSLIDE)
    for (unsigned l = 0; l < cfg_.lanes; ++l) {
      uint32_t next = f.reads_done[l][0];
      if (next >= f.src_slots[l][0]) continue;
      uint32_t word = f.src_base[l][0] + next;
      if (!can_read(table_, f, 0, l, word)) continue;
      StagedReq r;
      r.tag = GrantTag::SlduRead;
      r.requester = lane::kReqAluSrc1; // shared ALU/SLDU queue port
      r.prio = vrf::Prio::High;
      r.is_write = false;
      r.reg = f.srcs[0].reg;
      r.word = word;
      r.id = op.id;
      r.src = 0;
      lanes_[l].staged[bank_of(r.reg, word)].push_back(r);
    }
    // slide writes staged from the cross-lane buffer
    if (v.op == isa::VOpcode::VSLIDE) {
      for (unsigned l = 0; l < cfg_.lanes; ++l) {
        if (sld_writes_[l].empty()) continue;
        const SldWrite& w = sld_writes_[l].front();
        if (w.ready_at > cycle_) continue;
        if (!can_write(table_, f, l, w.word)) continue;
        StagedReq r;
        r.tag = GrantTag::SlduWrite;
        r.requester = lane::kReqSlduWrite;
        r.prio = vrf::Prio::High;
        r.is_write = true;
        r.reg = w.reg;
        r.word = w.word;
        r.id = op.id;
        r.value = w.value;
        lanes_[l].staged[bank_of(r.reg, r.word)].push_back(r);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// arbitration & grants

void Engine::phase_arbitrate() {
  for (unsigned l = 0; l < cfg_.lanes; ++l) {
    LaneCtx& lane = lanes_[l];
    lane.arb.clear();
    for (unsigned b = 0; b < geom_.banks; ++b)
      for (const StagedReq& r : lane.staged[b])
        lane.arb.submit(b, {r.requester, r.reg,
                            vrf::map_word(r.reg, r.word, geom_).row,
                            r.is_write, r.prio});
    lane.arb.arbitrate();
    for (unsigned b = 0; b < geom_.banks; ++b) {
      int g = lane.arb.granted(b);
      // single-port law: at most one grant per bank per cycle
      SIM_CHECK(g < static_cast<int>(lane.staged[b].size()));
      if (g < 0) continue;
      apply_grant(l, lane.staged[b][static_cast<size_t>(g)]);
      last_progress_ = cycle_;
    }
    for (unsigned b = 0; b < geom_.banks; ++b) lane.staged[b].clear();
  }
}

void Engine::apply_grant(unsigned l, const StagedReq& r) {
  LaneCtx& lane = lanes_[l];
  InFlight& f = table_.at(r.id);
  switch (r.tag) {
    case GrantTag::FuRead: {
      uint64_t value = lane.store.read(r.reg, r.word);
      UnitEngine& eng = lane.eng[r.engine];
      if (f.srcs[r.src].scalar_read) {
        f.scalar_vals_[l][r.src] = value;
      } else {
        bool ok = eng.srcq[r.src].push(
            {r.id, eng.req_slot[r.src], value, cycle_ + 1});
        SIM_CHECK(ok);
      }
      ++f.reads_done[l][r.src];
      ++eng.req_slot[r.src];
      break;
    }
    case GrantTag::FuWrite: {
      UnitEngine& eng = lane.eng[r.engine];
      SIM_CHECK(!eng.wbq.empty() && eng.wbq.front().id == r.id);
      SIM_CHECK(f.writes_done[l] == r.word);
      lane.store.write(r.reg, r.word, r.value, r.id, cycle_);
      ++f.writes_done[l];
      eng.wbq.pop_front();
      break;
    }
    case GrantTag::VlsuStoreRead: {
      uint64_t value = lane.store.read(r.reg, r.word);
      for (MemOp& op : memops_) {
        if (op.id != r.id) continue;
        uint64_t elem = static_cast<uint64_t>(r.word) * cfg_.lanes + l;
        SIM_CHECK(elem < op.vl && !op.elem_have[elem]);
        op.elem_vals[elem] = value;
        op.elem_have[elem] = 1;
        ++op.gathered;
        break;
      }
      ++f.reads_done[l][r.src];
      break;
    }
    case GrantTag::VlsuIndexRead: {
      uint64_t value = lane.store.read(r.reg, r.word);
      for (MemOp& op : memops_) {
        if (op.id != r.id) continue;
        uint64_t elem = static_cast<uint64_t>(r.word) * cfg_.lanes + l;
        SIM_CHECK(elem < op.vl && !op.idx_have[elem]);
        op.idx_vals[elem] = value;
        op.idx_have[elem] = 1;
        ++op.idx_collected;
        break;
      }
      ++f.reads_done[l][r.src];
      break;
    }
    case GrantTag::VlsuLoadWrite: {
      SIM_CHECK(!vlsu_buf_[l].empty() && vlsu_buf_[l].front().id == r.id);
      lane.store.write(r.reg, r.word, r.value, r.id, cycle_);
      if (cfg_.load_commit_latency == 0) {
        SIM_CHECK(f.writes_done[l] == r.word);
        ++f.writes_done[l];
      } else {
        // value sits in the realign path before consumers may fetch it
        pending_commits_.push_back(
            {r.id, l, r.word, cycle_ + cfg_.load_commit_latency});
      }
      vlsu_buf_[l].pop_front();
      break;
    }
    case GrantTag::SlduRead: {
      uint64_t value = lane.store.read(r.reg, r.word);
      act_.sldu[l] = 1;
      if (f.instr.op == isa::VOpcode::VEXT) {
        f.vext_value_ = value;
        f.vext_ready_ = true;
      } else {
        // slide: route to the destination lane
        uint64_t se = static_cast<uint64_t>(r.word) * cfg_.lanes + l;
        uint64_t de = se - static_cast<uint64_t>(f.instr.slide_amount);
        unsigned dl = static_cast<unsigned>(de % cfg_.lanes);
        sld_writes_[dl].push_back({f.instr.vd,
                                   static_cast<uint32_t>(de / cfg_.lanes),
                                   value, cycle_ + 1});
      }
      ++f.reads_done[l][r.src];
      break;
    }
    case GrantTag::SlduWrite: {
      SIM_CHECK(f.writes_done[l] == r.word);
      lane.store.write(r.reg, r.word, r.value, r.id, cycle_);
      act_.sldu[l] = 1;
      if (f.instr.op == isa::VOpcode::VINS) {
        // the value is in the bank, but operand fetch observes it only
        // after the broadcast completes
        f.vins_granted_[l] = 1;
        pending_commits_.push_back(
            {r.id, l, r.word, cycle_ + cfg_.vins_commit_latency});
      } else {
        ++f.writes_done[l];
      }
      if (f.instr.op == isa::VOpcode::VSLIDE) {
        SIM_CHECK(!sld_writes_[l].empty());
        sld_writes_[l].pop_front();
      }
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// execution units

void Engine::phase_execute() {
  for (unsigned l = 0; l < cfg_.lanes; ++l) {
    LaneCtx& lane = lanes_[l];
    for (unsigned e = 0; e < kNumEngines; ++e) {
      UnitEngine& eng = lane.eng[e];
      // drain pipelines into the write-back queue, one entry per pipe
      for (lane::UnitPipeline* p : {&eng.pipe_a, &eng.pipe_b}) {
        if (eng.wbq.size() < cfg_.wb_depth && p->has_output(cycle_)) {
          auto out = p->pop_output();
          const InFlight& f = table_.at(out.instr_id);
          eng.wbq.push_back({out.instr_id, f.instr.vd, out.slot, out.value});
        }
      }
      // consume operands for the oldest unfinished instruction
      while (eng.exec_head < eng.assigned.size()) {
        uint32_t id = eng.assigned[eng.exec_head];
        InFlight& f = table_.at(id);
        if (f.exec_done_[l] >= f.exec_slots[l]) {
          ++eng.exec_head;
          continue;
        }
        uint32_t k = f.exec_done_[l];
        // all operands for bundle k present?
        bool ready = true;
        std::array<uint64_t, 3> ops{0, 0, 0};
        for (unsigned s = 0; s < f.srcs.size() && ready; ++s) {
          if (f.srcs[s].scalar_read) {
            if (f.reads_done[l][s] < 1) ready = false;
            else ops[s] = f.scalar_vals_[l][s];
          } else {
            const auto& q = eng.srcq[s];
            if (q.empty() || q.front().ready_at > cycle_) ready = false;
            else {
              SIM_CHECK(q.front().instr_id == id && q.front().slot == k);
              ops[s] = q.front().data;
            }
          }
        }
        if (!ready) break;

        lane::FUKind kind = f.unit == Unit::FPU   ? lane::FUKind::FPU
                            : f.unit == Unit::MUL ? lane::FUKind::MUL
                                                  : lane::FUKind::ALU;
        lane::UnitPipeline& pipe =
            (e == kEngFpuMul && f.unit == Unit::MUL) ? eng.pipe_b : eng.pipe_a;
        // FPU and MUL share queues and never both accept in one cycle:
        // the single consume slot per engine enforces it.
        if (!pipe.can_accept(cycle_)) break;
        // operand queue hand-over between instructions
        if (id != eng.last_instr && eng.last_instr != ~0u &&
            cycle_ < eng.last_accept + 1 + cfg_.fu_switch_gap)
          break;

        lane::BundleOp bop =
            f.instr.op == isa::VOpcode::VMADD ? lane::BundleOp::Fma
            : f.instr.op == isa::VOpcode::VADD
                ? (f.instr.widen ? lane::BundleOp::IAddW : lane::BundleOp::IAdd)
                : (f.instr.widen ? lane::BundleOp::IMulW : lane::BundleOp::IMul);
        lane::BundleResult res =
            lane::execute_bundle(kind, bop, ops, f.instr.sew);
        for (unsigned s = 0; s < f.srcs.size(); ++s)
          if (!f.srcs[s].scalar_read) eng.srcq[s].pop();
        if (res.widened) {
          pipe.accept(cycle_, id, 2 * k, res.lo, 2); // half element rate
          pipe.accept_extra(cycle_, id, 2 * k + 1, res.hi);
        } else {
          pipe.accept(cycle_, id, k, res.lo);
        }
        eng.last_instr = id;
        eng.last_accept = cycle_;
        ++f.exec_done_[l];
        last_progress_ = cycle_;

        // busy accounting and dpflop counting
        if (f.unit == Unit::FPU) {
          act_.fpu[l] = 1;
          uint64_t elems = lane_elems(f.instr.vl, l);
          unsigned per = epw(f.instr.sew);
          uint64_t in_bundle =
              std::min<uint64_t>(per, elems - static_cast<uint64_t>(k) * per);
          stats_.dpflops += 2 * in_bundle;
        } else if (f.unit == Unit::MUL) {
          act_.mul[l] = 1;
        } else {
          act_.alu[l] = 1;
        }
        break; // one bundle per engine per cycle
      }
    }
  }
}

// ---------------------------------------------------------------------------
// slide unit bookkeeping

void Engine::phase_sldu() {
  while (!sldops_.empty()) {
    SldOp& op = sldops_.front();
    InFlight& f = table_.at(op.id);
    if (f.instr.op == isa::VOpcode::VEXT && f.vext_ready_ && !f.aux_done_) {
      score_->deliver_vext(f.instr.scalar_reg, f.vext_value_, cycle_ + 2);
      f.aux_done_ = true;
      vext_outstanding_ = false;
    }
    // completion -> pop, let the next slide-unit instruction start
    bool complete = f.instr.op == isa::VOpcode::VEXT
                        ? f.aux_done_
                        : f.writes_complete() && f.reads_complete();
    if (!complete || !f.sldu_started_) break;
    sldops_.pop_front();
  }
}

// ---------------------------------------------------------------------------
// memory port

void Engine::phase_vlsu_port() {
  // burst request issue: oldest op that has not requested yet
  for (MemOp& op : memops_) {
    if (op.request_sent) continue;
    if (cycle_ < op.addr_ready) break;
    if (op.needs_index && op.idx_collected < op.vl) break;
    if (op.needs_index && op.addrs.empty()) {
      vunit::AddressStream st;
      st.mode = vunit::AddrMode::Indexed;
      st.base = table_.at(op.id).instr.base;
      st.indices = op.idx_vals;
      st.count = op.vl;
      st.elem_size = 8;
      op.addrs = vunit::generate_addresses(st);
    }
    // conservative hazard resolution at instruction granularity: a load
    // does not request its burst while an older instruction still owns
    // its destination register
    const InFlight& f = table_.at(op.id);
    bool blocked = false;
    if (f.waw_producer >= 0 &&
        !table_.retired(static_cast<uint32_t>(f.waw_producer)))
      blocked = true;
    for (const WarReader& r : f.war_readers)
      if (!table_.retired(r.reader_id)) blocked = true;
    // memory ordering vs older stores
    uint64_t lo = op.addrs.empty() ? 0 : *std::min_element(op.addrs.begin(), op.addrs.end());
    uint64_t hi = op.addrs.empty() ? 0 : *std::max_element(op.addrs.begin(), op.addrs.end()) + 8;
    for (const MemOp& older : memops_) {
      if (older.id == op.id) break;
      if (older.load || older.beats_complete) continue;
      if (older.addrs.empty()) { blocked = true; continue; } // addresses unknown yet
      uint64_t olo = *std::min_element(older.addrs.begin(), older.addrs.end());
      uint64_t ohi = *std::max_element(older.addrs.begin(), older.addrs.end()) + 8;
      if (lo < ohi && olo < hi) blocked = true;
    }
    if (!blocked) {
      op.request_sent = true;
      op.request_cycle = cycle_ + 1; // one cycle to send the burst request
      last_progress_ = cycle_;
    }
    break; // only the oldest unrequested op per cycle
  }

  // data beats, strictly in instruction order
  for (MemOp& op : memops_) {
    if (op.beats_complete) continue;
    if (!op.request_sent) break;

    uint64_t earliest = op.load ? op.request_cycle + cfg_.mem_latency : 0;
    if (cycle_ < earliest) break;
    if (port_busy_until_ >= cycle_) break; // one beat per cycle

    if (op.load) {
      // deliver one beat into the lane buffers
      uint64_t first_elem, n_elems;
      if (op.mode == vunit::AddrMode::UnitStride) {
        uint64_t per_beat = cfg_.bytes_per_beat() / 8;
        first_elem = op.beats_done * per_beat;
        n_elems = std::min<uint64_t>(per_beat, op.vl - first_elem);
      } else {
        first_elem = op.beats_done;
        n_elems = 1;
      }
      // back-pressure: every target lane buffer must have room
      bool room = true;
      for (uint64_t k = 0; k < n_elems; ++k) {
        unsigned tl = static_cast<unsigned>((first_elem + k) % cfg_.lanes);
        if (vlsu_buf_[tl].size() >= cfg_.opq_vlsu) { room = false; break; }
      }
      if (!room) break;
      for (uint64_t k = 0; k < n_elems; ++k) {
        uint64_t e = first_elem + k;
        unsigned tl = static_cast<unsigned>(e % cfg_.lanes);
        uint64_t value = mem_.read8(op.addrs[e]);
        vlsu_buf_[tl].push_back({op.id, op.reg,
                                 static_cast<uint32_t>(e / cfg_.lanes), value,
                                 cycle_ + 1});
      }
      stats_.bytes_loaded += n_elems * 8;
      act_.ld_beat = true;
    } else {
      // store: the beat leaves once all its elements are gathered
      uint64_t first_elem, n_elems;
      if (op.mode == vunit::AddrMode::UnitStride) {
        uint64_t per_beat = cfg_.bytes_per_beat() / 8;
        first_elem = op.beats_done * per_beat;
        n_elems = std::min<uint64_t>(per_beat, op.vl - first_elem);
      } else {
        first_elem = op.beats_done;
        n_elems = 1;
      }
      bool have_all = true;
      for (uint64_t k = 0; k < n_elems; ++k)
        if (!op.elem_have[first_elem + k]) { have_all = false; break; }
      if (!have_all) break;
      for (uint64_t k = 0; k < n_elems; ++k) {
        uint64_t e = first_elem + k;
        mem_.write8(op.addrs[e], op.elem_vals[e]);
      }
      stats_.bytes_stored += n_elems * 8;
      act_.st_beat = true;
    }
    port_busy_until_ = cycle_;
    ++stats_.port_beats;
    ++op.beats_done;
    last_progress_ = cycle_;
    if (op.beats_done == op.beats_total) {
      op.beats_complete = true;
      op.last_beat = cycle_;
    }
    break; // single port
  }

  // store acknowledgement and load completion
  while (!memops_.empty()) {
    MemOp& op = memops_.front();
    InFlight& f = table_.at(op.id);
    if (op.load) {
      if (!(op.beats_complete && f.writes_complete())) break;
      f.aux_done_ = true;
    } else {
      if (!op.beats_complete) break;
      if (cycle_ < op.last_beat + cfg_.mem_latency) break; // write response
      f.aux_done_ = true;
    }
    memops_.pop_front();
  }
}

// ---------------------------------------------------------------------------
// sequencer / front end / clock

void Engine::phase_sequencer() {
  retire_pass();
  if (decode_reg_) {
    vunit::StallReason why;
    uint32_t blocker;
    if (!structural_stall(decode_reg_->pkt.instr, &why, &blocker)) {
      issue_instruction(decode_reg_->pkt, decode_reg_->dyn);
      decode_reg_.reset();
      last_progress_ = cycle_;
    } else if (issue_records_[decode_reg_->dyn].first_stall ==
               vunit::StallReason::None) {
      issue_records_[decode_reg_->dyn].first_stall = why;
    }
  }
  if (!decode_reg_ && !intake_.empty()) {
    decode_reg_ = intake_.front();
    intake_.pop_front();
    // acknowledged as soon as the front end decodes it
    issue_records_[decode_reg_->dyn].acknowledged = cycle_;
    stats_.dispatch_events[decode_reg_->dyn].acknowledged = cycle_;
    last_progress_ = cycle_;
  }
}

void Engine::phase_metrics() {
  uint64_t f = 0, m = 0, a = 0, s = 0;
  for (unsigned l = 0; l < cfg_.lanes; ++l) {
    // shared operand queues: multiplier and FPU never accept together
    SIM_CHECK(act_.fpu[l] + act_.mul[l] <= 1);
    f += act_.fpu[l];
    m += act_.mul[l];
    a += act_.alu[l];
    s += act_.sldu[l];
  }
  stats_.fpu_busy += f;
  stats_.mul_busy += m;
  stats_.alu_busy += a;
  stats_.sldu_busy += s;
  win_.fpu += f;
  win_.mul += m;
  win_.alu += a;
  win_.sldu += s;
  win_.ld += act_.ld_beat ? 1 : 0;
  win_.st += act_.st_beat ? 1 : 0;
  ++win_.cycles;
  if (trace_) {
    for (unsigned l = 0; l < cfg_.lanes; ++l) {
      stats_.trace.push_back({cycle_, static_cast<uint8_t>(l), Unit::FPU, act_.fpu[l]});
      stats_.trace.push_back({cycle_, static_cast<uint8_t>(l), Unit::MUL, act_.mul[l]});
      stats_.trace.push_back({cycle_, static_cast<uint8_t>(l), Unit::ALU, act_.alu[l]});
      stats_.trace.push_back({cycle_, static_cast<uint8_t>(l), Unit::SLDU, act_.sldu[l]});
    }
  }
  if (win_.cycles == cfg_.util_window) {
    double n = static_cast<double>(cfg_.util_window);
    double ln = n * cfg_.lanes;
    stats_.windows.push_back({win_.start, win_.fpu / ln, win_.mul / ln,
                              win_.alu / ln, win_.sldu / ln, win_.ld / n,
                              win_.st / n});
    win_ = WindowAccum{};
    win_.start = cycle_ + 1;
  }
}

void Engine::step() {
  act_.reset(cfg_.lanes);

  // deferred write commits that become visible this cycle
  for (size_t i = 0; i < pending_commits_.size();) {
    if (pending_commits_[i].at <= cycle_) {
      InFlight& f = table_.at(pending_commits_[i].id);
      SIM_CHECK(f.writes_done[pending_commits_[i].lane] ==
                pending_commits_[i].word);
      ++f.writes_done[pending_commits_[i].lane];
      pending_commits_.erase(pending_commits_.begin() + static_cast<long>(i));
    } else {
      ++i;
    }
  }

  // A: stage all bank requests using state from the end of last cycle
  for (unsigned l = 0; l < cfg_.lanes; ++l) {
    stage_fu_requests(l);
    stage_wb_requests(l); // no-op (write-backs staged in stage_fu_requests)
  }
  stage_vlsu_requests();
  stage_sldu_requests();

  // B: per-bank arbitration and grant application
  phase_arbitrate();

  // C: functional units consume and produce
  phase_execute();

  // D/E: global units
  phase_sldu();
  phase_vlsu_port();

  // F: sequencer (retire, issue, decode)
  phase_sequencer();

  // G: scalar core
  if (score_ && score_->step(cycle_)) last_progress_ = cycle_;

  // H: metrics
  phase_metrics();

  if (cycle_ - last_progress_ > 20000)
    throw InvariantError("no forward progress for 20000 cycles at cycle " +
                         std::to_string(cycle_));
  ++cycle_;
}

void Engine::stage_wb_requests(unsigned) {}

RunStats Engine::run(const isa::Program& prog, uint64_t max_cycles,
                     bool trace) {
  SIM_CHECK(cycle_ == 0); // one run per machine instance
  trace_ = trace;
  score_ = std::make_unique<scalar::ScalarCore>(
      scalar::ScalarPipeModel{1, cfg_.scalar_ld_latency, 2, cfg_.intake_depth},
      &prog, this, [this](uint64_t addr) { return mem_.read8(addr); });
  win_.start = 0;

  while (cycle_ < max_cycles) {
    bool idle = score_->done() && intake_.empty() && !decode_reg_ &&
                active_.empty() && memops_.empty() && sldops_.empty();
    if (idle) break;
    step();
  }
  SIM_CHECK(score_->done() && active_.empty());

  // flush the final partial utilization window
  if (win_.cycles > 0) {
    double n = static_cast<double>(win_.cycles);
    double ln = n * cfg_.lanes;
    stats_.windows.push_back({win_.start, win_.fpu / ln, win_.mul / ln,
                              win_.alu / ln, win_.sldu / ln, win_.ld / n,
                              win_.st / n});
  }

  stats_.cycles = cycle_;
  stats_.issue_timeline = score_->timeline();
  stats_.issues = issue_records_;
  uint64_t conflicts = 0;
  for (const auto& lane : lanes_) conflicts += lane.arb.conflicts();
  stats_.bank_conflicts = conflicts;
  return stats_;
}

// ---------------------------------------------------------------------------
// Machine facade

Machine::Machine(MachineConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  eng_ = std::make_unique<Engine>(cfg_);
}
Machine::~Machine() = default;
Machine::Machine(Machine&&) noexcept = default;
Machine& Machine::operator=(Machine&&) noexcept = default;

vunit::MemoryModel& Machine::memory() { return eng_->memory(); }
const vunit::MemoryModel& Machine::memory() const { return eng_->memory(); }

void Machine::set_program(isa::Program prog) {
  prog_ = std::move(prog);
}

void Machine::enable_trace(bool on) { trace_ = on; }

RunStats Machine::run(uint64_t max_cycles) {
  return eng_->run(prog_, max_cycles, trace_);
}

uint64_t Machine::cycle() const { return eng_->cycle(); }

uint64_t Machine::peek_vreg(unsigned reg, uint64_t element) const {
  return eng_->peek_vreg(reg, element);
}
void Machine::poke_vreg(unsigned reg, uint64_t element, uint64_t raw) {
  eng_->poke_vreg(reg, element, raw);
}
void Machine::dump_vrf_csv(std::ostream& os, unsigned reg_limit) const {
  eng_->dump_vrf(os, reg_limit);
}

RunStats run_assembly(const MachineConfig& cfg, std::string_view text,
                      uint64_t vl, unsigned sew) {
  isa::VecConfig vc = isa::VecConfig::for_machine(cfg, sew);
  vc = isa::set_vector_length(vl, vc);
  isa::Program prog = isa::parse_program(text, vc);
  Machine m(cfg);
  m.set_program(std::move(prog));
  return m.run();
}

} // namespace lanesim
