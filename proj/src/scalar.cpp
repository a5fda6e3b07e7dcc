#include "lanesim/scalar.hpp"

#include <algorithm>
#include <map>

namespace lanesim::scalar {

ScalarCore::ScalarCore(ScalarPipeModel model, const isa::Program* prog,
                       VectorIntake* sink, LoadFn load)
    : model_(model), prog_(prog), sink_(sink), load_(std::move(load)) {
  ready_.fill(0);
}

bool ScalarCore::step(uint64_t cycle) {
  if (done()) return false;
  if (vext_pending_) return false; // waiting on a vector result

  const isa::ScalarInstr& si = (*prog_)[pc_];

  auto src_ready = [&](unsigned r) { return r == 0 || ready_[r] <= cycle; };

  switch (si.op) {
    case isa::SOpcode::LD: {
      if (!src_ready(si.rs1)) return false;
      if (si.rd != 0) regs_[si.rd] = load_ ? load_(si.addr) : 0;
      // A consumer stalls until the load's execute completes: with the
      // default 2-cycle execute this puts one bubble between the load and a
      // dependent instruction issued two slots later.
      if (si.rd != 0) ready_[si.rd] = cycle + 1 + model_.ld_latency;
      break;
    }
    case isa::SOpcode::ADD: {
      if (!src_ready(si.rs1) || (!si.has_imm && !src_ready(si.rs2)))
        return false;
      uint64_t b = si.has_imm ? static_cast<uint64_t>(si.imm) : regs_[si.rs2];
      if (si.rd != 0) {
        regs_[si.rd] = regs_[si.rs1] + b;
        ready_[si.rd] = cycle + 1;
      }
      break;
    }
    case isa::SOpcode::BRANCH: {
      timeline_.push_back({static_cast<uint32_t>(pc_), si.op, {}, 0, cycle});
      pc_ = static_cast<size_t>(si.branch_target);
      return true;
    }
    case isa::SOpcode::VDISPATCH: {
      const isa::VectorInstr& v = *si.vec;
      // Scalar operands are read at dispatch time.
      if (v.op == isa::VOpcode::VINS && !src_ready(v.scalar_reg)) return false;
      if (!sink_->can_accept()) return false; // intake queue back-pressure
      DispatchPacket pkt;
      pkt.instr = v;
      if (v.op == isa::VOpcode::VINS) pkt.scalar_value = regs_[v.scalar_reg];
      sink_->push(pkt, cycle);
      if (v.op == isa::VOpcode::VEXT) {
        vext_pending_ = true;
        ready_[v.scalar_reg] = ~0ull; // until the value comes back
      }
      break;
    }
  }

  timeline_.push_back({static_cast<uint32_t>(pc_), si.op,
                       si.vec ? si.vec->op : isa::VOpcode{},
                       si.vec ? si.vec->id : 0, cycle});
  ++pc_;
  return true;
}

void ScalarCore::deliver_vext(unsigned rd, uint64_t value,
                              uint64_t ready_cycle) {
  SIM_CHECK(vext_pending_);
  regs_[rd] = value;
  ready_[rd] = ready_cycle;
  vext_pending_ = false;
}

std::vector<IssueEvent> run_scalar_stream(const isa::Program& prog,
                                          VectorIntake& sink,
                                          ScalarPipeModel model, LoadFn load,
                                          uint64_t max_cycles) {
  ScalarCore core(model, &prog, &sink, std::move(load));
  for (uint64_t c = 0; c < max_cycles && !core.done(); ++c) core.step(c);
  SIM_CHECK(core.done());
  return core.timeline();
}

GapStats measure_issue_gap(std::span<const IssueEvent> timeline,
                           std::function<bool(const IssueEvent&)> filter,
                           size_t skip) {
  std::vector<uint64_t> cycles;
  for (const auto& ev : timeline)
    if (filter(ev)) cycles.push_back(ev.cycle);
  if (cycles.size() >= skip) cycles.erase(cycles.begin(),
                                          cycles.begin() + static_cast<long>(skip));
  if (cycles.size() < 2)
    throw MeasureError("need at least two matching issues to measure a gap");

  GapStats st;
  std::map<uint64_t, size_t> hist;
  uint64_t sum = 0;
  for (size_t i = 1; i < cycles.size(); ++i) {
    uint64_t gap = cycles[i] - cycles[i - 1];
    sum += gap;
    st.max = std::max(st.max, gap);
    ++hist[gap];
  }
  st.samples = cycles.size() - 1;
  st.mean = static_cast<double>(sum) / static_cast<double>(st.samples);
  size_t best = 0;
  for (auto& [gap, n] : hist)
    if (n > best) { best = n; st.mode = gap; }
  return st;
}

GapStats measure_issue_gap(std::span<const IssueEvent> timeline,
                           isa::VOpcode vop, size_t skip) {
  return measure_issue_gap(
      timeline,
      [vop](const IssueEvent& ev) {
        return ev.op == isa::SOpcode::VDISPATCH && ev.vop == vop;
      },
      skip);
}

} // namespace lanesim::scalar
