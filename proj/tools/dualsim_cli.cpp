#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dualsim/driver.hpp"

#ifndef DUALSIM_VERSION
#define DUALSIM_VERSION "0.1.0"
#endif

namespace {

using namespace dualsim;

std::string read_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open '" + file + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

driver::Backend parse_backend(const std::string& name) {
  if (name == "dd") return driver::Backend::dd;
  if (name == "tn") return driver::Backend::tn;
  if (name == "both") return driver::Backend::both;
  throw Error("unknown backend '" + name + "' (expected dd|tn|both)");
}

void parse_mode(const std::vector<std::string>& args, driver::RunConfig& cfg) {
  if (args.empty()) return;
  if (args[0] == "full") {
    if (args.size() != 1) throw Error("mode 'full' takes no argument");
    cfg.mode = driver::Mode::full;
  } else if (args[0] == "amp") {
    if (args.size() != 2) throw Error("mode 'amp' needs a basis string, e.g. --mode amp 000");
    cfg.mode = driver::Mode::amplitude;
    cfg.amp_bits = args[1];
  } else if (args[0] == "fidelity") {
    if (args.size() != 2) throw Error("mode 'fidelity' needs a second circuit file");
    cfg.mode = driver::Mode::fidelity;
    cfg.second = parse_circuit(read_file(args[1]));
  } else {
    throw Error("unknown mode '" + args[0] + "' (expected full|amp <bits>|fidelity <file>)");
  }
}

void parse_strategy(const std::vector<std::string>& args, driver::RunConfig& cfg) {
  if (args.empty()) return;
  if (args[0] == "seq") {
    cfg.strategy = driver::Strategy::sequential;
  } else if (args[0] == "alt") {
    cfg.strategy = driver::Strategy::alternating;
    if (args.size() == 2) cfg.alt_ratio = std::stoi(args[1]);
  } else if (args[0] == "greedy-alt") {
    cfg.strategy = driver::Strategy::greedy_alt;
  } else if (args[0] == "plan") {
    cfg.strategy = driver::Strategy::plan;
  } else {
    throw Error("unknown strategy '" + args[0] + "' (expected seq|alt <r>|greedy-alt|plan)");
  }
  if (args.size() > 2 || (args.size() == 2 && args[0] != "alt"))
    throw Error("only 'alt' takes a ratio argument");
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const int n = std::stoi(text);
    return {n, n};
  }
  return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
}

int run_simulate(const std::string& file, const std::string& backend,
                 const std::vector<std::string>& mode_args,
                 const std::vector<std::string>& strategy_args, const std::string& plan_kind,
                 int slices, int workers, const std::string& json_out, std::uint64_t seed) {
  driver::RunConfig cfg;
  cfg.tol = driver::Tolerances::from_env();
  cfg.backend = parse_backend(backend);
  parse_mode(mode_args, cfg);
  parse_strategy(strategy_args, cfg);
  if (plan_kind == "greedy")
    cfg.plan = driver::PlanKind::greedy;
  else if (plan_kind == "exhaustive")
    cfg.plan = driver::PlanKind::exhaustive;
  else
    throw Error("unknown plan kind '" + plan_kind + "' (expected greedy|exhaustive)");
  cfg.slices = slices;
  cfg.workers = workers;
  cfg.seed = seed;

  const Circuit circuit = parse_circuit(read_file(file));
  const driver::RunReport report = driver::run(cfg, circuit);
  report.print_summary(std::cout);

  if (!json_out.empty()) {
    std::ofstream out(json_out);
    if (!out) throw Error("cannot write '" + json_out + "'");
    out << report.to_json().dump(2) << "\n";
  }

  const bool dd_refused = cfg.backend != driver::Backend::tn && report.dd.refused;
  const bool tn_refused = cfg.backend != driver::Backend::dd && report.tn.refused;
  if (cfg.backend == driver::Backend::tn && tn_refused) {
    std::cerr << "error: " << report.tn.refusal << "\n";
    return 1;
  }
  if (cfg.backend == driver::Backend::dd && dd_refused) {
    std::cerr << "error: " << report.dd.refusal << "\n";
    return 1;
  }
  if (!report.crosscheck_ok) {
    std::cerr << "error: backend results diverge (max deviation " << report.crosscheck_dev
              << ")\n";
    return 2;
  }
  return 0;
}

int run_bench(const std::string& family, const std::string& range, const std::string& metric,
              const std::string& csv_out, std::uint64_t seed) {
  const auto [lo, hi] = parse_range(range);
  const auto rows =
      driver::scaling_sweep(driver::family_from_name(family), lo, hi, metric, seed);
  if (csv_out.empty()) {
    driver::write_csv(rows, metric, std::cout);
  } else {
    std::ofstream out(csv_out);
    if (!out) throw Error("cannot write '" + csv_out + "'");
    driver::write_csv(rows, metric, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dualsim: quantum circuit simulation with decision-diagram and "
               "tensor-network backends"};
  app.set_version_flag("--version", DUALSIM_VERSION);
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "simulate a circuit file");
  std::string file;
  std::string backend = "dd";
  std::vector<std::string> mode_args{"full"};
  std::vector<std::string> strategy_args{"seq"};
  std::string plan_kind = "greedy";
  int slices = 0;
  int workers = 1;
  std::string json_out;
  std::uint64_t seed = 0;
  simulate->add_option("file", file, "circuit file")->required();
  simulate->add_option("--backend", backend, "dd|tn|both");
  simulate->add_option("--mode", mode_args, "full | amp <bits> | fidelity <file2>")
      ->expected(1, 2);
  simulate->add_option("--strategy", strategy_args, "seq | alt <r> | greedy-alt | plan")
      ->expected(1, 2);
  simulate->add_option("--plan", plan_kind, "greedy|exhaustive");
  simulate->add_option("--slices", slices, "number of tensor-network indices to slice");
  simulate->add_option("--workers", workers, "parallel workers for sliced contractions");
  simulate->add_option("--json", json_out, "write the machine-readable report here");
  simulate->add_option("--seed", seed, "seed echoed into the report");

  // bench
  auto* bench = app.add_subcommand("bench", "benchmark family sweeps (CSV)");
  std::string family;
  std::string range;
  std::string metric;
  std::string csv_out;
  std::uint64_t bench_seed = 0;
  bench->add_option("--family", family, "ghz|grover-oracle|random")->required();
  bench->add_option("--n", range, "qubit range, e.g. 2..16")->required();
  bench->add_option("--metric", metric,
                    "dd-gate-nodes | dd-state-nodes | tn-gate-tensor-elements")
      ->required();
  bench->add_option("--csv", csv_out, "write CSV here (default: stdout)");
  bench->add_option("--seed", bench_seed, "seed for the random family");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed())
      return run_simulate(file, backend, mode_args, strategy_args, plan_kind, slices, workers,
                          json_out, seed);
    return run_bench(family, range, metric, csv_out, bench_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
