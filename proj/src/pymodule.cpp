#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lanesim/perf.hpp"

namespace py = pybind11;
using namespace lanesim;

namespace {

MachineConfig make_config(unsigned lanes, unsigned mem_latency,
                          unsigned fpu_depth, unsigned opq_depth) {
  MachineConfig mc;
  mc.lanes = lanes;
  mc.mem_latency = mem_latency;
  mc.fpu_depth = fpu_depth;
  mc.opq_fpu = opq_depth;
  mc.validate();
  return mc;
}

kernels::KernelSpec make_spec(const std::string& kernel, uint64_t n,
                              unsigned tile, uint64_t seed) {
  if (kernel == "matmul")
    return kernels::KernelSpec::make_matmul(static_cast<uint32_t>(n), tile,
                                            seed);
  if (kernel == "daxpy")
    return kernels::KernelSpec::make_daxpy(static_cast<uint32_t>(n), 1.5, seed);
  if (kernel == "dconv")
    return kernels::KernelSpec::make_dconv(static_cast<uint32_t>(n),
                                           std::min<unsigned>(tile * 2, 8),
                                           seed);
  throw ConfigError("unknown kernel '" + kernel + "'");
}

py::dict report_dict(const perf::SimReport& r) {
  py::dict d;
  d["kernel"] = r.kernel;
  d["lanes"] = r.lanes;
  d["n"] = r.n;
  d["tile"] = r.tile;
  d["seed"] = r.seed;
  d["cycles"] = r.cycles;
  d["dpflops"] = r.dpflops;
  d["performance"] = r.performance;
  d["fpu_busy_frac"] = r.fpu_busy_frac;
  d["intensity"] = r.intensity;
  d["bound"] = r.bound;
  d["loss_pct"] = r.loss_pct;
  d["delta_mean"] = r.delta_mean;
  d["delta_mode"] = r.delta_mode;
  d["delta_max"] = r.delta_max;
  d["bytes_loaded"] = r.bytes_loaded;
  d["bytes_stored"] = r.bytes_stored;
  d["bank_conflicts"] = r.bank_conflicts;
  d["functional_ok"] = r.functional_ok;
  d["max_rel_err"] = r.max_rel_err;
  py::list wins;
  for (const auto& w : r.windows) {
    py::dict wd;
    wd["start"] = w.start;
    wd["fpu"] = w.fpu;
    wd["ld"] = w.ld;
    wd["st"] = w.st;
    wd["sldu"] = w.sldu;
    wins.append(wd);
  }
  d["windows"] = wins;
  return d;
}

} // namespace

PYBIND11_MODULE(lanesim, m) {
  m.doc() = "cycle-approximate simulator of a lane-scalable vector "
            "coprocessor driven by a single-issue in-order scalar core";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DecodeError>(m, "DecodeError");

  m.def(
      "run_kernel",
      [](const std::string& kernel, uint64_t n, unsigned lanes, unsigned tile,
         uint64_t seed, unsigned mem_latency, unsigned fpu_depth,
         unsigned opq_depth) {
        auto spec = make_spec(kernel, n, tile, seed);
        auto mc = make_config(lanes, mem_latency, fpu_depth, opq_depth);
        return report_dict(perf::run_kernel(spec, mc));
      },
      py::arg("kernel"), py::arg("n"), py::arg("lanes") = 4,
      py::arg("tile") = 4, py::arg("seed") = 1, py::arg("mem_latency") = 10,
      py::arg("fpu_depth") = 5, py::arg("opq_depth") = 4,
      "Run one kernel and return its report as a dict");

  m.def(
      "run_assembly",
      [](const std::string& text, uint64_t vl, unsigned lanes, unsigned sew) {
        MachineConfig mc;
        mc.lanes = lanes;
        mc.validate();
        RunStats st = run_assembly(mc, text, vl, sew);
        py::dict d;
        d["cycles"] = st.cycles;
        d["dpflops"] = st.dpflops;
        d["performance"] = st.performance();
        d["bytes_loaded"] = st.bytes_loaded;
        d["bytes_stored"] = st.bytes_stored;
        return d;
      },
      py::arg("text"), py::arg("vl"), py::arg("lanes") = 4,
      py::arg("sew") = 64, "Assemble and run a program on a fresh machine");

  m.def(
      "kernel_text",
      [](const std::string& kernel, uint64_t n, unsigned lanes, unsigned tile,
         uint64_t seed) {
        auto spec = make_spec(kernel, n, tile, seed);
        MachineConfig mc;
        mc.lanes = lanes;
        mc.validate();
        vunit::MemoryModel mem(mc.mem_latency);
        auto kb = kernels::build(spec, mc, mem);
        return kernels::to_text(kb);
      },
      py::arg("kernel"), py::arg("n"), py::arg("lanes") = 4,
      py::arg("tile") = 4, py::arg("seed") = 1,
      "Instruction stream of a generated kernel, as assembly text");

  m.def(
      "decode",
      [](const std::string& line, uint64_t vl, unsigned sew, unsigned lanes) {
        MachineConfig mc;
        mc.lanes = lanes;
        auto vc = isa::set_vector_length(vl, isa::VecConfig::for_machine(mc, sew));
        isa::ScalarInstr si = isa::decode(line, vc);
        return isa::format(si);
      },
      py::arg("line"), py::arg("vl") = 0, py::arg("sew") = 64,
      py::arg("lanes") = 4, "Decode one instruction and return canonical text");

  m.def("set_vector_length", [](uint64_t requested, unsigned lanes,
                                unsigned sew) {
    MachineConfig mc;
    mc.lanes = lanes;
    auto vc = isa::set_vector_length(requested,
                                     isa::VecConfig::for_machine(mc, sew));
    return vc.vl;
  },
        py::arg("requested"), py::arg("lanes") = 4, py::arg("sew") = 64);

  m.def("intensity", [](const std::string& kernel, uint64_t n) {
    return perf::intensity(make_spec(kernel, n, 4, 1));
  },
        py::arg("kernel"), py::arg("n") = 256);

  m.def("bound", [](unsigned lanes, double I, bool matmul, double delta) {
    return perf::bound(perf::RooflineModel::for_lanes(lanes, delta), I, matmul);
  },
        py::arg("lanes"), py::arg("intensity"), py::arg("matmul") = false,
        py::arg("delta") = 5.0);

  m.def("map_element", [](unsigned reg, uint64_t element, unsigned lanes) {
    MachineConfig mc;
    mc.lanes = lanes;
    auto a = vrf::map_element(reg, element, vrf::VrfGeometry::from(mc), 64);
    return py::make_tuple(a.lane, a.bank, a.row);
  },
        py::arg("reg"), py::arg("element"), py::arg("lanes") = 4);

  m.attr("__version__") = "0.1.0";
}
