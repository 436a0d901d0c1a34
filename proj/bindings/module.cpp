#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "dualsim/driver.hpp"
#include "dualsim/tn.hpp"

namespace py = pybind11;
using namespace dualsim;

namespace {

py::array_t<std::complex<double>> to_numpy(const std::vector<Complex>& v) {
  return py::array_t<std::complex<double>>({static_cast<py::ssize_t>(v.size())}, v.data());
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

BasisState bits_or_zeros(const std::optional<std::string>& bits, int n) {
  if (!bits) return BasisState::zeros(n);
  return BasisState::from_string(*bits);
}

driver::Strategy strategy_from(const std::string& name) {
  if (name == "seq" || name == "sequential") return driver::Strategy::sequential;
  if (name == "alt" || name == "alternating") return driver::Strategy::alternating;
  if (name == "greedy-alt") return driver::Strategy::greedy_alt;
  if (name == "plan") return driver::Strategy::plan;
  throw Error("unknown strategy '" + name + "'");
}

path::Strategy path_strategy_from(const std::string& name) {
  switch (strategy_from(name)) {
    case driver::Strategy::sequential: return path::Strategy::sequential;
    case driver::Strategy::alternating: return path::Strategy::alternating;
    case driver::Strategy::greedy_alt: return path::Strategy::greedy_alt;
    case driver::Strategy::plan: return path::Strategy::plan_translated;
  }
  throw Error("unknown strategy");
}

tn::ContractionPlan make_plan(const tn::TensorNetwork& net, const std::string& kind) {
  if (kind == "greedy") return tn::plan_greedy(net);
  if (kind == "exhaustive") return tn::plan_exhaustive(net);
  throw Error("unknown plan kind '" + kind + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "dualsim: quantum circuit simulation on decision diagrams and tensor networks";
  m.attr("__version__") = DUALSIM_VERSION;

  py::register_exception<Error>(m, "DualsimError", PyExc_ValueError);

  py::class_<Circuit>(m, "Circuit")
      .def_readonly("num_qubits", &Circuit::num_qubits)
      .def_property_readonly("num_gates", [](const Circuit& c) { return c.gates.size(); })
      .def("__eq__", [](const Circuit& a, const Circuit& b) { return a == b; })
      .def("__str__", [](const Circuit& c) { return to_text(c); })
      .def("__repr__", [](const Circuit& c) {
        return "<Circuit qubits=" + std::to_string(c.num_qubits) +
               " gates=" + std::to_string(c.gates.size()) + ">";
      });

  m.def("parse_circuit", &parse_circuit, py::arg("text"),
        "Parse circuit text ('qubits <n>' header, then one gate per line/';').");
  m.def("to_text", &to_text, py::arg("circuit"));
  m.def("invert_circuit", &invert_circuit, py::arg("circuit"));
  m.def("concatenate", &concatenate, py::arg("first"), py::arg("second"));

  m.def(
      "ghz", [](int n) { return driver::generate_benchmark(driver::BenchmarkFamily::ghz, n); },
      py::arg("n"));
  m.def(
      "grover_oracle",
      [](int n) { return driver::generate_benchmark(driver::BenchmarkFamily::grover_oracle, n); },
      py::arg("n"));
  m.def(
      "random_circuit",
      [](int n, std::uint64_t seed, int num_gates, int locality) {
        return driver::generate_benchmark(driver::BenchmarkFamily::random, n, seed,
                                          {num_gates, locality});
      },
      py::arg("n"), py::arg("seed") = 0, py::arg("num_gates") = -1, py::arg("locality") = -1);

  m.def(
      "gate_matrix_of",
      [](const Circuit& c, std::size_t index) {
        if (index >= c.gates.size()) throw Error("gate index out of range");
        const DenseMatrix u = gate_matrix(c.gates[index]);
        const auto dim = static_cast<py::ssize_t>(u.dim);
        return py::array_t<std::complex<double>>({dim, dim}, u.a.data());
      },
      py::arg("circuit"), py::arg("index"), "Dense unitary of one gate of the circuit.");

  // decision-diagram backend
  m.def(
      "dd_statevector",
      [](const Circuit& c, const std::string& strategy, int dense_cap) {
        dd::Package pkg;
        path::SimulationPath p;
        if (strategy == "plan")
          p = path::plan_to_path(tn::plan_greedy(tn::circuit_to_network(
                                     c, BasisState::zeros(c.num_qubits))),
                                 c);
        else
          p = path::default_sequential_path(c);
        const auto res = path::execute_path(c, BasisState::zeros(c.num_qubits), p, pkg);
        auto out = to_numpy(dd::extract_statevector(res.state, dense_cap));
        pkg.dec_ref(res.state);
        return out;
      },
      py::arg("circuit"), py::arg("strategy") = "seq", py::arg("dense_cap") = 20,
      "Full statevector via decision-diagram simulation (input |0...0>).");

  m.def(
      "dd_amplitude",
      [](const Circuit& c, const std::string& bits) {
        dd::Package pkg;
        const auto res = path::execute_path(c, BasisState::zeros(c.num_qubits),
                                            path::default_sequential_path(c), pkg);
        const Complex a = dd::get_amplitude(res.state, BasisState::from_string(bits));
        pkg.dec_ref(res.state);
        return a;
      },
      py::arg("circuit"), py::arg("bits"));

  m.def(
      "dd_state_nodes",
      [](const Circuit& c) {
        dd::Package pkg;
        const auto res = path::execute_path(c, BasisState::zeros(c.num_qubits),
                                            path::default_sequential_path(c), pkg);
        const std::size_t nodes = dd::node_count(res.state);
        pkg.dec_ref(res.state);
        return nodes;
      },
      py::arg("circuit"), "Node count of the final state diagram.");

  m.def(
      "dd_gate_nodes",
      [](const Circuit& c) {
        dd::Package pkg;
        std::size_t nodes = 0;
        for (const Gate& g : c.gates)
          nodes = std::max(nodes, dd::node_count(pkg.gate_dd(g, c.num_qubits)));
        return nodes;
      },
      py::arg("circuit"), "Largest gate-diagram node count in the circuit.");

  m.def(
      "dd_dot",
      [](const Circuit& c) {
        dd::Package pkg;
        const auto res = path::execute_path(c, BasisState::zeros(c.num_qubits),
                                            path::default_sequential_path(c), pkg);
        std::ostringstream os;
        dd::write_dot(res.state, os);
        pkg.dec_ref(res.state);
        return os.str();
      },
      py::arg("circuit"), "Graphviz rendering of the final state diagram.");

  // tensor-network backend
  m.def(
      "tn_amplitude",
      [](const Circuit& c, const std::string& bits, const std::string& plan, int slices,
         int workers) {
        driver::RunConfig cfg;
        cfg.backend = driver::Backend::tn;
        cfg.mode = driver::Mode::amplitude;
        cfg.amp_bits = bits;
        cfg.plan = plan == "exhaustive" ? driver::PlanKind::exhaustive : driver::PlanKind::greedy;
        cfg.slices = slices;
        cfg.workers = workers;
        return driver::run(cfg, c).tn.amplitude;
      },
      py::arg("circuit"), py::arg("bits"), py::arg("plan") = "greedy", py::arg("slices") = 0,
      py::arg("workers") = 1);

  m.def(
      "tn_statevector",
      [](const Circuit& c, const std::string& plan) {
        const auto net = tn::circuit_to_network(c, BasisState::zeros(c.num_qubits));
        return to_numpy(tn::contract(net, make_plan(net, plan)).data);
      },
      py::arg("circuit"), py::arg("plan") = "greedy");

  m.def(
      "tn_plan_cost",
      [](const Circuit& c, const std::optional<std::string>& bits, const std::string& plan) {
        const auto net = tn::circuit_to_network(
            c, BasisState::zeros(c.num_qubits),
            bits ? std::optional<BasisState>(BasisState::from_string(*bits)) : std::nullopt);
        const auto cost = tn::plan_cost(net, make_plan(net, plan));
        py::dict d;
        d["flops"] = cost.flops;
        d["max_intermediate"] = cost.max_intermediate;
        d["max_rank"] = cost.max_rank;
        return d;
      },
      py::arg("circuit"), py::arg("bits") = std::nullopt, py::arg("plan") = "greedy",
      "A-priori contraction cost of the circuit's network.");

  // equivalence checking
  m.def(
      "check_equivalence",
      [](const Circuit& g, const Circuit& g2, const std::optional<std::string>& bits,
         const std::string& strategy, int ratio) {
        path::EquivalenceOptions opts;
        opts.strategy = path_strategy_from(strategy);
        opts.ratio = ratio;
        const auto v = path::check_equivalence(g, g2, bits_or_zeros(bits, g.num_qubits), opts);
        py::dict d;
        d["fidelity"] = v.fidelity;
        d["equivalent"] = v.equivalent;
        d["peak_nodes"] = v.metrics.peak_nodes;
        d["final_nodes"] = v.metrics.final_nodes;
        return d;
      },
      py::arg("circuit"), py::arg("other"), py::arg("bits") = std::nullopt,
      py::arg("strategy") = "alt", py::arg("ratio") = 1,
      "Fidelity |<bits|G G2^-1|bits>|^2 and the equivalence verdict.");

  // full driver
  m.def(
      "run",
      [](const Circuit& c, const std::string& backend, const std::string& mode,
         const std::optional<std::string>& bits, const std::optional<Circuit>& second,
         const std::string& strategy, int ratio, const std::string& plan, int slices, int workers,
         std::uint64_t seed) {
        driver::RunConfig cfg;
        cfg.tol = driver::Tolerances::from_env();
        if (backend == "dd")
          cfg.backend = driver::Backend::dd;
        else if (backend == "tn")
          cfg.backend = driver::Backend::tn;
        else if (backend == "both")
          cfg.backend = driver::Backend::both;
        else
          throw Error("unknown backend '" + backend + "'");
        if (mode == "full") {
          cfg.mode = driver::Mode::full;
        } else if (mode == "amp") {
          cfg.mode = driver::Mode::amplitude;
          if (!bits) throw Error("amp mode needs bits");
          cfg.amp_bits = *bits;
        } else if (mode == "fidelity") {
          cfg.mode = driver::Mode::fidelity;
          if (!second) throw Error("fidelity mode needs a second circuit");
          cfg.second = *second;
        } else {
          throw Error("unknown mode '" + mode + "'");
        }
        cfg.strategy = strategy_from(strategy);
        cfg.alt_ratio = ratio;
        cfg.plan = plan == "exhaustive" ? driver::PlanKind::exhaustive : driver::PlanKind::greedy;
        cfg.slices = slices;
        cfg.workers = workers;
        cfg.seed = seed;
        return json_to_py(driver::run(cfg, c).to_json());
      },
      py::arg("circuit"), py::arg("backend") = "dd", py::arg("mode") = "full",
      py::arg("bits") = std::nullopt, py::arg("second") = std::nullopt,
      py::arg("strategy") = "seq", py::arg("ratio") = 1, py::arg("plan") = "greedy",
      py::arg("slices") = 0, py::arg("workers") = 1, py::arg("seed") = 0,
      "Run the driver and return the machine-readable report as a dict.");

  m.def(
      "sweep",
      [](const std::string& family, int lo, int hi, const std::string& metric,
         std::uint64_t seed) {
        const auto rows =
            driver::scaling_sweep(driver::family_from_name(family), lo, hi, metric, seed);
        py::list out;
        for (const auto& row : rows) out.append(py::make_tuple(row.n, row.value));
        return out;
      },
      py::arg("family"), py::arg("lo"), py::arg("hi"), py::arg("metric"), py::arg("seed") = 0,
      "Scaling sweep rows as (n, value) tuples.");
}
