#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "dense_reference.hpp"
#include "dualsim/driver.hpp"

using namespace dualsim;
using driver::Backend;
using driver::BenchmarkFamily;
using driver::Mode;
using driver::RunConfig;
using driver::RunReport;

namespace {

const double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

Circuit ghz(int n) { return driver::generate_benchmark(BenchmarkFamily::ghz, n); }

}  // namespace

TEST_CASE("run: ghz amplitude agrees across backends") {
  RunConfig cfg;
  cfg.backend = Backend::both;
  cfg.mode = Mode::amplitude;
  cfg.amp_bits = "000";
  const RunReport report = driver::run(cfg, ghz(3));
  CHECK(std::abs(report.dd.amplitude - kInvSqrt2) < 1e-12);
  CHECK(std::abs(report.tn.amplitude - kInvSqrt2) < 1e-12);
  CHECK(report.crosscheck_ok);
}

TEST_CASE("run: empty circuit full state") {
  RunConfig cfg;
  cfg.backend = Backend::dd;
  const RunReport report = driver::run(cfg, Circuit(2));
  REQUIRE(report.dd.state.size() == 4);
  CHECK(report.dd.state[0] == Complex(1.0));
  for (int i = 1; i < 4; ++i) CHECK(report.dd.state[i] == Complex(0.0));
}

TEST_CASE("run: both backends agree on random full states") {
  for (std::uint64_t seed : {5u, 6u}) {
    RunConfig cfg;
    cfg.backend = Backend::both;
    const Circuit c = driver::generate_benchmark(BenchmarkFamily::random, 8, seed, {24, -1});
    const RunReport report = driver::run(cfg, c);
    CHECK(report.crosscheck_ok);
    CHECK(report.crosscheck_dev < 1e-9);
    CHECK(testref::max_deviation(report.dd.state, testref::simulate(c)) < 1e-9);
  }
}

TEST_CASE("run: fidelity mode across strategies and backends") {
  Circuit g2 = ghz(3);
  g2.gates.pop_back();
  for (driver::Strategy s : {driver::Strategy::sequential, driver::Strategy::alternating,
                             driver::Strategy::greedy_alt, driver::Strategy::plan}) {
    RunConfig cfg;
    cfg.backend = Backend::both;
    cfg.mode = Mode::fidelity;
    cfg.second = g2;
    cfg.strategy = s;
    const RunReport report = driver::run(cfg, ghz(3));
    CHECK(report.dd.fidelity == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(report.tn.fidelity == doctest::Approx(0.25).epsilon(1e-9));
    CHECK_FALSE(report.dd.equivalent);
    CHECK(report.crosscheck_ok);
  }
}

TEST_CASE("run: config validation") {
  RunConfig cfg;
  cfg.mode = Mode::amplitude;
  cfg.amp_bits = "00";
  CHECK_THROWS_AS(driver::run(cfg, ghz(3)), Error);
  cfg.mode = Mode::fidelity;
  CHECK_THROWS_AS(driver::run(cfg, ghz(3)), Error);
  cfg.mode = Mode::full;
  cfg.strategy = driver::Strategy::alternating;
  CHECK_THROWS_AS(driver::run(cfg, ghz(3)), Error);
}

TEST_CASE("run: tn full state refuses beyond the dense cap, dd proceeds") {
  RunConfig cfg;
  cfg.backend = Backend::tn;
  cfg.tol.n_dense = 10;
  const RunReport tn_report = driver::run(cfg, ghz(12));
  CHECK(tn_report.tn.refused);
  CHECK_FALSE(tn_report.tn.ran);

  cfg.backend = Backend::dd;
  const RunReport dd_report = driver::run(cfg, ghz(12));
  CHECK(dd_report.dd.ran);
  CHECK(dd_report.dd.state.empty());  // kept as a diagram beyond the cap
  CHECK(dd_report.dd.final_nodes == 2 * 12 - 1);

  cfg.backend = Backend::both;
  const RunReport both = driver::run(cfg, ghz(12));
  CHECK(both.tn.refused);
  CHECK(both.dd.ran);
  CHECK(both.crosscheck_ok);  // dd is the reference when tn is over the cap
}

TEST_CASE("run: slicing and workers leave the payload untouched") {
  const Circuit c = driver::generate_benchmark(BenchmarkFamily::random, 5, 17, {15, -1});
  RunConfig base;
  base.backend = Backend::tn;
  base.mode = Mode::amplitude;
  base.amp_bits = "00000";
  const Complex reference = driver::run(base, c).tn.amplitude;
  for (int slices : {1, 2, 3}) {
    for (int workers : {1, 2, 8}) {
      RunConfig cfg = base;
      cfg.slices = slices;
      cfg.workers = workers;
      const RunReport report = driver::run(cfg, c);
      CHECK(report.tn.num_slices == 1 << slices);
      CHECK(report.tn.amplitude == reference);  // fixed summation order: exact
    }
  }
}

TEST_CASE("generate_benchmark: ghz is the textbook circuit") {
  const Circuit c = ghz(3);
  REQUIRE(c.gates.size() == 3);
  CHECK(c.gates[0] == Gate::single(GateKind::H, 2));
  CHECK(c.gates[1] == Gate::cx(2, 1));
  CHECK(c.gates[2] == Gate::cx(1, 0));
}

TEST_CASE("generate_benchmark: grover oracle is one mcx with the right action") {
  const Circuit c = driver::generate_benchmark(BenchmarkFamily::grover_oracle, 4);
  REQUIRE(c.gates.size() == 1);
  CHECK(c.gates[0].kind == GateKind::MCX);
  DenseMatrix expect = DenseMatrix::identity(16);
  expect(14, 14) = expect(15, 15) = 0.0;
  expect(14, 15) = expect(15, 14) = 1.0;
  CHECK(testref::unitary(c).approx_equal(expect, 1e-12));
  CHECK_THROWS_AS(driver::generate_benchmark(BenchmarkFamily::grover_oracle, 1), Error);
}

TEST_CASE("generate_benchmark: seeded random circuits are reproducible") {
  const Circuit a = driver::generate_benchmark(BenchmarkFamily::random, 5, 7);
  const Circuit b = driver::generate_benchmark(BenchmarkFamily::random, 5, 7);
  CHECK(a == b);
  const Circuit other = driver::generate_benchmark(BenchmarkFamily::random, 5, 8);
  CHECK(a != other);

  // locality bound restricts two-qubit distances
  const Circuit local =
      driver::generate_benchmark(BenchmarkFamily::random, 8, 3, {40, 1});
  for (const Gate& g : local.gates) {
    const auto q = g.qubits();
    if (q.size() == 2) CHECK(std::abs(q[0] - q[1]) == 1);
  }
}

TEST_CASE("scaling_sweep: gate metrics") {
  const auto cx_nodes = driver::scaling_sweep(BenchmarkFamily::grover_oracle, 2, 16,
                                              "dd-gate-nodes");
  REQUIRE(cx_nodes.size() == 15);
  for (const auto& row : cx_nodes) CHECK(row.value == 2 * row.n - 1);

  const auto elements = driver::scaling_sweep(BenchmarkFamily::grover_oracle, 2, 16,
                                              "tn-gate-tensor-elements");
  for (const auto& row : elements) CHECK(row.value == std::pow(4.0, row.n));

  const auto ghz_nodes = driver::scaling_sweep(BenchmarkFamily::ghz, 2, 20, "dd-state-nodes");
  for (const auto& row : ghz_nodes) CHECK(row.value == 2 * row.n - 1);

  CHECK_THROWS_AS(driver::scaling_sweep(BenchmarkFamily::ghz, 2, 4, "nope"), Error);
}

TEST_CASE("write_csv emits one row per size") {
  const auto rows = driver::scaling_sweep(BenchmarkFamily::ghz, 2, 4, "dd-state-nodes");
  std::ostringstream os;
  driver::write_csv(rows, "dd-state-nodes", os);
  CHECK(os.str() == "n,dd-state-nodes\n2,3\n3,5\n4,7\n");
}

TEST_CASE("report: json schema and determinism") {
  RunConfig cfg;
  cfg.backend = Backend::both;
  cfg.mode = Mode::amplitude;
  cfg.amp_bits = "0000";
  cfg.seed = 9;
  const Circuit c = driver::generate_benchmark(BenchmarkFamily::random, 4, 9, {12, -1});
  auto j1 = driver::run(cfg, c).to_json();
  auto j2 = driver::run(cfg, c).to_json();
  CHECK(j1["schema"] == 1);
  CHECK(j1["tool"]["name"] == "dualsim");
  CHECK(j1["config"]["backend"] == "both");
  CHECK(j1["crosscheck"]["ok"] == true);
  // identical payloads and metrics once wall times are removed
  for (auto* j : {&j1, &j2}) {
    (*j)["dd"].erase("wall_ms");
    (*j)["tn"].erase("wall_ms");
  }
  CHECK(j1 == j2);
}

TEST_CASE("report: human summary mentions the key facts") {
  RunConfig cfg;
  cfg.backend = Backend::both;
  cfg.mode = Mode::amplitude;
  cfg.amp_bits = "000";
  const RunReport report = driver::run(cfg, ghz(3));
  std::ostringstream os;
  report.print_summary(os);
  CHECK(os.str().find("amplitude[000]") != std::string::npos);
  CHECK(os.str().find("0.70710678") != std::string::npos);
  CHECK(os.str().find("cross-check: ok") != std::string::npos);
}

TEST_CASE("tolerances come from the environment") {
  setenv("DUALSIM_N_DENSE", "4", 1);
  setenv("DUALSIM_EPS_NUM", "1e-9", 1);
  const driver::Tolerances t = driver::Tolerances::from_env();
  CHECK(t.n_dense == 4);
  CHECK(t.eps_num == 1e-9);
  unsetenv("DUALSIM_N_DENSE");
  unsetenv("DUALSIM_EPS_NUM");
  const driver::Tolerances d = driver::Tolerances::from_env();
  CHECK(d.n_dense == 20);
}
