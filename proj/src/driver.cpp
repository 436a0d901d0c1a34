#include "dualsim/driver.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <iomanip>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "dualsim/tn.hpp"

#ifndef DUALSIM_VERSION
#define DUALSIM_VERSION "0.1.0"
#endif

namespace dualsim::driver {

using nlohmann::json;

namespace {

double env_double(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (v == nullptr) return fallback;
  char* end = nullptr;
  const double parsed = std::strtod(v, &end);
  if (end == v || parsed <= 0) throw Error(std::string(name) + " must be a positive number");
  return parsed;
}

int env_int(const char* name, int fallback) {
  const char* v = std::getenv(name);
  if (v == nullptr) return fallback;
  const int parsed = std::atoi(v);
  if (parsed <= 0) throw Error(std::string(name) + " must be a positive integer");
  return parsed;
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::dd: return "dd";
    case Backend::tn: return "tn";
    case Backend::both: return "both";
  }
  return "?";
}

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::full: return "full";
    case Mode::amplitude: return "amp";
    case Mode::fidelity: return "fidelity";
  }
  return "?";
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::sequential: return "seq";
    case Strategy::alternating: return "alt";
    case Strategy::greedy_alt: return "greedy-alt";
    case Strategy::plan: return "plan";
  }
  return "?";
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void validate_config(const RunConfig& cfg, const Circuit& circuit) {
  if (cfg.mode == Mode::amplitude &&
      static_cast<int>(cfg.amp_bits.size()) != circuit.num_qubits)
    throw Error("amplitude mode needs a basis string of length " +
                std::to_string(circuit.num_qubits));
  if (cfg.mode == Mode::fidelity) {
    if (!cfg.second) throw Error("fidelity mode needs a second circuit");
    if (cfg.second->num_qubits != circuit.num_qubits)
      throw Error("fidelity mode circuits must have equal qubit counts");
  }
  if (cfg.mode != Mode::fidelity &&
      (cfg.strategy == Strategy::alternating || cfg.strategy == Strategy::greedy_alt))
    throw Error("alternating strategies only apply to fidelity mode");
  if (cfg.workers < 1) throw Error("worker count must be at least 1");
  if (cfg.slices < 0) throw Error("slice count cannot be negative");
  if (cfg.alt_ratio < 1) throw Error("alternation ratio must be at least 1");
}

path::Strategy to_path_strategy(Strategy s) {
  switch (s) {
    case Strategy::sequential: return path::Strategy::sequential;
    case Strategy::alternating: return path::Strategy::alternating;
    case Strategy::greedy_alt: return path::Strategy::greedy_alt;
    case Strategy::plan: return path::Strategy::plan_translated;
  }
  throw Error("unknown strategy");
}

BackendResult run_dd(const RunConfig& cfg, const Circuit& circuit) {
  BackendResult r;
  const Stopwatch clock;
  const BasisState input = BasisState::zeros(circuit.num_qubits);

  if (cfg.mode == Mode::fidelity) {
    path::EquivalenceOptions opts;
    opts.strategy = to_path_strategy(cfg.strategy);
    opts.ratio = cfg.alt_ratio;
    opts.eps_eq = cfg.tol.eps_eq;
    opts.package.eps = cfg.tol.eps_num;
    const path::EquivalenceVerdict verdict =
        path::check_equivalence(circuit, *cfg.second, input, opts);
    r.fidelity = verdict.fidelity;
    r.equivalent = verdict.equivalent;
    r.peak_nodes = verdict.metrics.peak_nodes;
    r.final_nodes = verdict.metrics.final_nodes;
  } else {
    dd::Package pkg({.eps = cfg.tol.eps_num});
    path::SimulationPath p;
    if (cfg.strategy == Strategy::plan) {
      const tn::TensorNetwork net = tn::circuit_to_network(circuit, input);
      const tn::ContractionPlan plan = cfg.plan == PlanKind::greedy
                                           ? tn::plan_greedy(net)
                                           : tn::plan_exhaustive(net);
      p = path::plan_to_path(plan, circuit);
    } else {
      p = path::default_sequential_path(circuit);
    }
    const path::PathResult res = path::execute_path(circuit, input, p, pkg);
    r.peak_nodes = res.metrics.peak_nodes;
    r.final_nodes = res.metrics.final_nodes;
    if (cfg.mode == Mode::amplitude) {
      r.amplitude = dd::get_amplitude(res.state, BasisState::from_string(cfg.amp_bits));
    } else if (circuit.num_qubits <= cfg.tol.n_dense) {
      r.state = dd::extract_statevector(res.state, cfg.tol.n_dense);
    }
    pkg.dec_ref(res.state);
  }
  r.ran = true;
  r.wall_ms = clock.ms();
  return r;
}

/// Contracts the (possibly sliced) network on a small worker pool; slice
/// results are summed in fixed assignment order regardless of worker count.
tn::Tensor contract_sliced(const tn::TensorNetwork& net, const tn::ContractionPlan& plan,
                           int slices, int workers, int* num_slices_out) {
  std::vector<std::string> labels = tn::sliceable_labels(net);
  const int k = std::min<int>(slices, static_cast<int>(labels.size()));
  labels.resize(k);
  std::vector<tn::SliceAssignment> parts = tn::slice(net, labels);
  if (num_slices_out != nullptr) *num_slices_out = static_cast<int>(parts.size());

  std::vector<tn::Tensor> results(parts.size());
  const int pool = std::max(1, std::min<int>(workers, static_cast<int>(parts.size())));
  if (pool == 1) {
    for (std::size_t i = 0; i < parts.size(); ++i) results[i] = tn::contract(parts[i].net, plan);
  } else {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= parts.size()) return;
        results[i] = tn::contract(parts[i].net, plan);
      }
    };
    std::vector<std::thread> threads;
    threads.reserve(pool - 1);
    for (int t = 0; t < pool - 1; ++t) threads.emplace_back(work);
    work();
    for (auto& t : threads) t.join();
  }

  tn::Tensor sum = std::move(results.front());
  for (std::size_t i = 1; i < results.size(); ++i)
    for (std::size_t e = 0; e < sum.data.size(); ++e) sum.data[e] += results[i].data[e];
  return sum;
}

BackendResult run_tn(const RunConfig& cfg, const Circuit& circuit) {
  BackendResult r;
  const Stopwatch clock;
  const int n = circuit.num_qubits;
  const BasisState input = BasisState::zeros(n);

  if (cfg.mode == Mode::full && n > cfg.tol.n_dense) {
    r.refused = true;
    r.refusal = "full-state contraction of " + std::to_string(n) +
                " qubits would build a rank-" + std::to_string(n) +
                " tensor beyond the dense cap of " + std::to_string(cfg.tol.n_dense);
    r.wall_ms = clock.ms();
    return r;
  }

  tn::TensorNetwork net;
  if (cfg.mode == Mode::full) {
    net = tn::circuit_to_network(circuit, input);
  } else if (cfg.mode == Mode::amplitude) {
    net = tn::circuit_to_network(circuit, input, BasisState::from_string(cfg.amp_bits));
  } else {
    const Circuit miter = concatenate(circuit, invert_circuit(*cfg.second));
    net = tn::circuit_to_network(miter, input, input);
  }

  const tn::ContractionPlan plan =
      cfg.plan == PlanKind::greedy ? tn::plan_greedy(net) : tn::plan_exhaustive(net);
  const tn::PlanCost cost = tn::plan_cost(net, plan);
  r.plan_flops = cost.flops;
  r.max_intermediate = cost.max_intermediate;
  r.max_rank = cost.max_rank;

  const tn::Tensor out = contract_sliced(net, plan, cfg.slices, cfg.workers, &r.num_slices);

  if (cfg.mode == Mode::full) {
    r.state = out.data;  // open indices are ordered highest qubit first
  } else if (cfg.mode == Mode::amplitude) {
    r.amplitude = out.scalar();
  } else {
    r.fidelity = std::norm(out.scalar());
    r.equivalent = std::abs(1.0 - r.fidelity) <= cfg.tol.eps_eq;
  }
  r.ran = true;
  r.wall_ms = clock.ms();
  return r;
}

}  // namespace

Tolerances Tolerances::from_env() {
  Tolerances t;
  t.eps_num = env_double("DUALSIM_EPS_NUM", t.eps_num);
  t.eps_eq = env_double("DUALSIM_EPS_EQ", t.eps_eq);
  t.n_dense = env_int("DUALSIM_N_DENSE", t.n_dense);
  return t;
}

RunReport run(const RunConfig& cfg, const Circuit& circuit) {
  validate_config(cfg, circuit);
  RunReport report;
  report.config = cfg;
  report.num_qubits = circuit.num_qubits;
  report.num_gates = circuit.gates.size();

  if (cfg.backend == Backend::dd || cfg.backend == Backend::both)
    report.dd = run_dd(cfg, circuit);
  if (cfg.backend == Backend::tn || cfg.backend == Backend::both)
    report.tn = run_tn(cfg, circuit);

  if (cfg.backend == Backend::both && report.dd.ran && report.tn.ran) {
    double dev = 0.0;
    if (cfg.mode == Mode::full) {
      for (std::size_t i = 0; i < report.dd.state.size(); ++i)
        dev = std::max(dev, std::abs(report.dd.state[i] - report.tn.state[i]));
    } else if (cfg.mode == Mode::amplitude) {
      dev = std::abs(report.dd.amplitude - report.tn.amplitude);
    } else {
      dev = std::abs(report.dd.fidelity - report.tn.fidelity);
    }
    report.crosscheck_dev = dev;
    report.crosscheck_ok = dev <= cfg.tol.eps_num;
  }
  return report;
}

namespace {

json complex_json(const Complex& c) { return json::array({c.real(), c.imag()}); }

json result_json(const BackendResult& r, const RunConfig& cfg) {
  json j;
  j["ran"] = r.ran;
  if (r.refused) {
    j["refused"] = true;
    j["refusal"] = r.refusal;
    return j;
  }
  if (!r.ran) return j;
  j["wall_ms"] = r.wall_ms;
  if (cfg.mode == Mode::full) {
    if (!r.state.empty()) {
      json state = json::array();
      for (const auto& a : r.state) state.push_back(complex_json(a));
      j["state"] = state;
    }
  } else if (cfg.mode == Mode::amplitude) {
    j["amplitude"] = complex_json(r.amplitude);
  } else {
    j["fidelity"] = r.fidelity;
    j["equivalent"] = r.equivalent;
  }
  if (r.peak_nodes != 0 || r.final_nodes != 0) {
    j["peak_nodes"] = r.peak_nodes;
    j["final_nodes"] = r.final_nodes;
  }
  if (r.plan_flops != 0) {
    j["plan_flops"] = r.plan_flops;
    j["max_intermediate"] = r.max_intermediate;
    j["max_rank"] = r.max_rank;
    j["slices"] = r.num_slices;
  }
  return j;
}

}  // namespace

json RunReport::to_json() const {
  json j;
  j["schema"] = schema;
  j["tool"] = {{"name", "dualsim"}, {"version", DUALSIM_VERSION}};
  json cfg_json = {
      {"backend", backend_name(config.backend)},
      {"mode", mode_name(config.mode)},
      {"strategy", strategy_name(config.strategy)},
      {"plan", config.plan == PlanKind::greedy ? "greedy" : "exhaustive"},
      {"slices", config.slices},
      {"workers", config.workers},
      {"seed", config.seed},
      {"eps_num", config.tol.eps_num},
      {"eps_eq", config.tol.eps_eq},
      {"n_dense", config.tol.n_dense},
  };
  if (config.mode == Mode::amplitude) cfg_json["amp_bits"] = config.amp_bits;
  if (config.strategy == Strategy::alternating) cfg_json["alt_ratio"] = config.alt_ratio;
  j["config"] = cfg_json;
  j["circuit"] = {{"qubits", num_qubits}, {"gates", num_gates}};
  if (config.backend == Backend::dd || config.backend == Backend::both)
    j["dd"] = result_json(dd, config);
  if (config.backend == Backend::tn || config.backend == Backend::both)
    j["tn"] = result_json(tn, config);
  if (config.backend == Backend::both) {
    j["crosscheck"] = {{"ok", crosscheck_ok}, {"max_deviation", crosscheck_dev}};
  }
  return j;
}

void RunReport::print_summary(std::ostream& os) const {
  const std::streamsize old_precision = os.precision(10);
  os << "circuit: " << num_qubits << " qubits, " << num_gates << " gates\n";
  auto print_backend = [&](const char* name, const BackendResult& r) {
    if (!r.ran && !r.refused) return;
    os << name << ": ";
    if (r.refused) {
      os << "refused (" << r.refusal << ")\n";
      return;
    }
    switch (config.mode) {
      case Mode::full:
        if (!r.state.empty()) {
          os << "full state (" << r.state.size() << " amplitudes)";
        } else {
          os << "full state kept as a diagram (" << r.final_nodes
             << " nodes; beyond the dense cap)";
        }
        break;
      case Mode::amplitude: {
        os << "amplitude[" << config.amp_bits << "] = " << r.amplitude.real();
        if (r.amplitude.imag() != 0.0) os << (r.amplitude.imag() < 0 ? " - " : " + ")
                                          << std::abs(r.amplitude.imag()) << "i";
        break;
      }
      case Mode::fidelity:
        os << "fidelity = " << r.fidelity << (r.equivalent ? " (equivalent)" : " (NOT equivalent)");
        break;
    }
    os << "  [" << r.wall_ms << " ms";
    if (r.peak_nodes != 0) os << ", peak nodes " << r.peak_nodes;
    if (r.plan_flops != 0)
      os << ", plan flops " << r.plan_flops << ", max intermediate " << r.max_intermediate
         << ", slices " << r.num_slices;
    os << "]\n";
  };
  print_backend("dd", dd);
  print_backend("tn", tn);
  if (config.backend == Backend::both)
    os << "cross-check: " << (crosscheck_ok ? "ok" : "DIVERGED")
       << " (max deviation " << crosscheck_dev << ")\n";
  os.precision(old_precision);
}

BenchmarkFamily family_from_name(const std::string& name) {
  if (name == "ghz") return BenchmarkFamily::ghz;
  if (name == "grover-oracle") return BenchmarkFamily::grover_oracle;
  if (name == "random") return BenchmarkFamily::random;
  throw Error("unsupported benchmark family '" + name + "'");
}

const char* family_name(BenchmarkFamily f) {
  switch (f) {
    case BenchmarkFamily::ghz: return "ghz";
    case BenchmarkFamily::grover_oracle: return "grover-oracle";
    case BenchmarkFamily::random: return "random";
  }
  return "?";
}

Circuit generate_benchmark(BenchmarkFamily family, int n, std::uint64_t seed,
                           const RandomOptions& opts) {
  if (n < 1) throw Error("benchmark circuits need at least one qubit");
  Circuit c(n);
  switch (family) {
    case BenchmarkFamily::ghz: {
      c.add(Gate::single(GateKind::H, n - 1));
      for (int q = n - 1; q >= 1; --q) c.add(Gate::cx(q, q - 1));
      return c;
    }
    case BenchmarkFamily::grover_oracle: {
      if (n < 2) throw Error("grover-oracle needs at least two qubits");
      std::vector<int> controls;
      for (int q = n - 1; q >= 1; --q) controls.push_back(q);
      c.add(Gate::mcx(std::move(controls), 0));
      return c;
    }
    case BenchmarkFamily::random: {
      // raw mt19937_64 draws keep seeded circuits identical across platforms
      std::mt19937_64 rng(seed);
      auto pick = [&](std::uint64_t bound) { return static_cast<int>(rng() % bound); };
      auto angle = [&] {
        return 2.0 * std::numbers::pi * static_cast<double>(rng() >> 11) * 0x1.0p-53;
      };
      const int num_gates = opts.num_gates < 0 ? 3 * n : opts.num_gates;
      const int locality = opts.locality;
      constexpr GateKind plain[] = {GateKind::X, GateKind::Y,  GateKind::Z,   GateKind::H,
                                    GateKind::S, GateKind::Sdg, GateKind::T,  GateKind::Tdg};
      constexpr GateKind rot[] = {GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::P};
      constexpr GateKind twoq[] = {GateKind::CX, GateKind::CZ, GateKind::SWAP};
      for (int i = 0; i < num_gates; ++i) {
        const int family_pick = n >= 2 ? pick(3) : pick(2);
        if (family_pick == 0) {
          c.add(Gate::single(plain[pick(8)], pick(n)));
        } else if (family_pick == 1) {
          c.add(Gate::rotation(rot[pick(4)], angle(), pick(n)));
        } else {
          const GateKind kind = twoq[pick(3)];
          const int a = pick(n);
          std::vector<int> partners;
          for (int b = 0; b < n; ++b)
            if (b != a && (locality < 0 || std::abs(a - b) <= locality)) partners.push_back(b);
          if (partners.empty()) partners.push_back(a == 0 ? 1 : a - 1);
          const int b = partners[pick(partners.size())];
          if (kind == GateKind::SWAP)
            c.add(Gate::swap(a, b));
          else if (kind == GateKind::CX)
            c.add(Gate::cx(a, b));
          else
            c.add(Gate::cz(a, b));
        }
      }
      return c;
    }
  }
  throw Error("unsupported benchmark family");
}

std::vector<SweepRow> scaling_sweep(BenchmarkFamily family, int n_lo, int n_hi,
                                    const std::string& metric, std::uint64_t seed) {
  if (n_lo < 1 || n_hi < n_lo) throw Error("invalid qubit range");
  std::vector<SweepRow> rows;
  for (int n = n_lo; n <= n_hi; ++n) {
    if (family == BenchmarkFamily::grover_oracle && n < 2) continue;
    const Circuit c = generate_benchmark(family, n, seed);
    double value = 0.0;
    if (metric == "dd-gate-nodes") {
      dd::Package pkg;
      std::size_t nodes = 0;
      for (const Gate& g : c.gates) nodes = std::max(nodes, dd::node_count(pkg.gate_dd(g, n)));
      value = static_cast<double>(nodes);
    } else if (metric == "dd-state-nodes") {
      dd::Package pkg;
      const path::PathResult res =
          path::execute_path(c, BasisState::zeros(n), path::default_sequential_path(c), pkg);
      value = static_cast<double>(dd::node_count(res.state));
      pkg.dec_ref(res.state);
    } else if (metric == "tn-gate-tensor-elements") {
      // shape arithmetic only: a k-qubit gate tensor holds 4^k entries
      std::uint64_t elems = 0;
      for (const Gate& g : c.gates)
        elems = std::max(elems, std::uint64_t{1} << (2 * g.arity()));
      value = static_cast<double>(elems);
    } else {
      throw Error("unknown sweep metric '" + metric + "'");
    }
    rows.push_back({n, value});
  }
  return rows;
}

void write_csv(const std::vector<SweepRow>& rows, const std::string& metric, std::ostream& os) {
  os << "n," << metric << "\n";
  char buf[64];
  for (const auto& row : rows) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, row.value);
    (void)ec;
    os << row.n << ',' << std::string_view(buf, ptr - buf) << "\n";
  }
}

}  // namespace dualsim::driver
