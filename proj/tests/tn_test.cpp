#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "dense_reference.hpp"
#include "dualsim/driver.hpp"
#include "dualsim/tn.hpp"

using namespace dualsim;
using tn::ContractionPlan;
using tn::Index;
using tn::Tensor;
using tn::TensorNetwork;

namespace {

const double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

Circuit ghz(int n) { return driver::generate_benchmark(driver::BenchmarkFamily::ghz, n); }

Circuit random_circuit(int n, std::uint64_t seed, int gates) {
  return driver::generate_benchmark(driver::BenchmarkFamily::random, n, seed, {gates, -1});
}

Tensor matrix_tensor(const std::string& row, const std::string& col,
                     std::vector<Complex> data, std::int64_t rows = 2, std::int64_t cols = 2) {
  return Tensor({{row, rows}, {col, cols}}, std::move(data));
}

TensorNetwork ghz_amplitude_network(int n) {
  return tn::circuit_to_network(ghz(n), BasisState::zeros(n), BasisState::zeros(n));
}

}  // namespace

TEST_CASE("contract_pair: matrix product over the shared index") {
  const Tensor a = matrix_tensor("i", "k", {1, 2, 3, 4});
  const Tensor b = matrix_tensor("k", "j", {5, 6, 7, 8});
  std::uint64_t madds = 0;
  const Tensor c = tn::contract_pair(a, b, &madds);
  REQUIRE(c.rank() == 2);
  CHECK(c.indices[0].label == "i");
  CHECK(c.indices[1].label == "j");
  CHECK(c.data == std::vector<Complex>{19, 22, 43, 50});
  CHECK(madds == 8);  // 2*2*2 multiply-adds
}

TEST_CASE("contract_pair: scalar scaling and the brute-force oracle") {
  const Tensor s({}, {Complex(2.0, 1.0)});
  const Tensor t = matrix_tensor("a", "b", {1, 2, 3, 4});
  const Tensor scaled = tn::contract_pair(s, t);
  CHECK(scaled.data[3] == Complex(8.0, 4.0));

  // two rank-3 tensors sharing two indices, against a nested-loop sum
  std::vector<Complex> da(2 * 3 * 2), db(3 * 2 * 2);
  for (std::size_t i = 0; i < da.size(); ++i) da[i] = Complex(0.5 * i, 1.0 - 0.1 * i);
  for (std::size_t i = 0; i < db.size(); ++i) db[i] = Complex(0.3 * i - 1.0, 0.2 * i);
  const Tensor a({{"x", 2}, {"s", 3}, {"t", 2}}, da);
  const Tensor b({{"s", 3}, {"y", 2}, {"t", 2}}, db);
  const Tensor got = tn::contract_pair(a, b);
  REQUIRE(got.rank() == 2);  // x then y
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      Complex want = 0.0;
      for (int s3 = 0; s3 < 3; ++s3)
        for (int t2 = 0; t2 < 2; ++t2)
          want += da[(x * 3 + s3) * 2 + t2] * db[(s3 * 2 + y) * 2 + t2];
      CHECK(std::abs(got.data[x * 2 + y] - want) < 1e-12);
    }
}

TEST_CASE("contract_pair: dimension mismatch is rejected") {
  const Tensor a({{"i", 2}, {"k", 3}}, std::vector<Complex>(6, 1.0));
  const Tensor b = matrix_tensor("k", "j", {1, 2, 3, 4});
  CHECK_THROWS_AS(tn::contract_pair(a, b), Error);
}

TEST_CASE("circuit_to_network: ghz amplitude network has the figure's shape") {
  const TensorNetwork net = ghz_amplitude_network(3);
  CHECK(net.tensors.size() == 9);  // 3 inputs + 3 gates + 3 outputs
  CHECK(net.open.empty());
  CHECK(net.tensors[3].rank() == 2);  // H
  CHECK(net.tensors[4].rank() == 4);  // CX
  const Tensor value = tn::contract(net, tn::plan_greedy(net));
  CHECK(std::abs(value.scalar() - kInvSqrt2) < 1e-12);
}

TEST_CASE("circuit_to_network: empty circuit and single-gate projections") {
  const TensorNetwork empty =
      tn::circuit_to_network(Circuit(3), BasisState::zeros(3));
  CHECK(empty.tensors.size() == 3);
  CHECK(empty.open.size() == 3);

  Circuit h(1);
  h.add(Gate::single(GateKind::H, 0));
  const TensorNetwork net = tn::circuit_to_network(h, BasisState::zeros(1),
                                                   BasisState::from_string("1"));
  const Tensor value = tn::contract(net, tn::plan_greedy(net));
  CHECK(std::abs(value.scalar() - kInvSqrt2) < 1e-12);
}

TEST_CASE("full-state contraction reshapes to the statevector") {
  const TensorNetwork net = tn::circuit_to_network(ghz(3), BasisState::zeros(3));
  const Tensor state = tn::contract(net, tn::plan_greedy(net));
  CHECK(state.rank() == 3);
  REQUIRE(state.data.size() == 8);
  CHECK(std::abs(state.data[0] - kInvSqrt2) < 1e-12);
  CHECK(std::abs(state.data[7] - kInvSqrt2) < 1e-12);
  for (int i = 1; i < 7; ++i) CHECK(std::abs(state.data[i]) < 1e-12);
}

TEST_CASE("single-tensor network contracts to itself") {
  TensorNetwork net;
  net.tensors.push_back(matrix_tensor("a", "b", {1, 2, 3, 4}));
  net.open = net.tensors[0].indices;
  ContractionPlan plan;
  plan.nodes.push_back({0, -1, -1});
  plan.root = 0;
  CHECK(tn::contract(net, plan).data == net.tensors[0].data);
  CHECK(tn::plan_cost(net, plan).flops == 0);
}

TEST_CASE("plan_cost: matrix product example") {
  TensorNetwork net;
  net.tensors.push_back(matrix_tensor("i", "k", {1, 0, 0, 1}));
  net.tensors.push_back(matrix_tensor("k", "j", {1, 0, 0, 1}));
  net.open = {{"i", 2}, {"j", 2}};
  const ContractionPlan plan = ContractionPlan::leaf_pair(0, 1);
  const tn::PlanCost cost = tn::plan_cost(net, plan);
  CHECK(cost.flops == 8);
  CHECK(cost.max_intermediate == 4);
  CHECK(cost.max_rank == 2);
}

TEST_CASE("three-tensor chain: exhaustive picks the cheapest of the three trees") {
  // A[i,k] B[k,j] C[j,l], |k| = 32, |j| = 2, open ends of size 2. Hand-counted:
  //   (AB)C: 2*32*2 + 2*2*2 = 136, A(BC): 32*2*2 + 2*32*2 = 256, (AC)B: 512
  TensorNetwork net;
  net.tensors.push_back(Tensor({{"i", 2}, {"k", 32}}, std::vector<Complex>(64, 0.5)));
  net.tensors.push_back(Tensor({{"k", 32}, {"j", 2}}, std::vector<Complex>(64, 0.25)));
  net.tensors.push_back(Tensor({{"j", 2}, {"l", 2}}, std::vector<Complex>(4, 1.0)));
  net.open = {{"i", 2}, {"l", 2}};

  ContractionPlan ab_first;
  ab_first.nodes = {{0, -1, -1}, {1, -1, -1}, {2, -1, -1}, {-1, 0, 1}, {-1, 3, 2}};
  ab_first.root = 4;
  ContractionPlan bc_first;
  bc_first.nodes = {{0, -1, -1}, {1, -1, -1}, {2, -1, -1}, {-1, 1, 2}, {-1, 0, 3}};
  bc_first.root = 4;
  ContractionPlan ac_first;
  ac_first.nodes = {{0, -1, -1}, {1, -1, -1}, {2, -1, -1}, {-1, 0, 2}, {-1, 3, 1}};
  ac_first.root = 4;
  CHECK(tn::plan_cost(net, ab_first).flops == 136);
  CHECK(tn::plan_cost(net, bc_first).flops == 256);
  CHECK(tn::plan_cost(net, ac_first).flops == 512);

  const ContractionPlan best = tn::plan_exhaustive(net);
  CHECK(tn::plan_cost(net, best).flops == 136);
  const ContractionPlan greedy = tn::plan_greedy(net);
  CHECK(tn::plan_cost(net, best).flops <= tn::plan_cost(net, greedy).flops);
}

TEST_CASE("plan_greedy: ghz network stays narrow and beats left-to-right") {
  const TensorNetwork net = ghz_amplitude_network(3);
  const ContractionPlan greedy = tn::plan_greedy(net);
  const tn::PlanCost gc = tn::plan_cost(net, greedy);
  CHECK(gc.max_rank <= 3);
  const tn::PlanCost seq =
      tn::plan_cost(net, ContractionPlan::sequential(static_cast<int>(net.tensors.size())));
  CHECK(gc.flops <= seq.flops);
}

TEST_CASE("plan_greedy: two tensors have exactly one plan") {
  TensorNetwork net;
  net.tensors.push_back(matrix_tensor("i", "k", {1, 2, 3, 4}));
  net.tensors.push_back(matrix_tensor("k", "j", {1, 2, 3, 4}));
  net.open = {{"i", 2}, {"j", 2}};
  const ContractionPlan plan = tn::plan_greedy(net);
  CHECK(plan.num_leaves() == 2);
  CHECK(plan.nodes.size() == 3);
}

TEST_CASE("plan_exhaustive: chain of six matrices, greedy within 2x") {
  // greedy is suboptimal on this chain (128 vs 120 flops) yet within 2x
  const std::vector<std::int64_t> dims{4, 2, 8, 2, 8, 2, 4};
  TensorNetwork net;
  for (int t = 0; t < 6; ++t) {
    const std::int64_t rows = dims[t], cols = dims[t + 1];
    net.tensors.push_back(Tensor(
        {{"b" + std::to_string(t), rows}, {"b" + std::to_string(t + 1), cols}},
        std::vector<Complex>(rows * cols, 0.1)));
  }
  net.open = {{"b0", 2}, {"b6", 2}};
  const auto best = tn::plan_cost(net, tn::plan_exhaustive(net));
  const auto greedy = tn::plan_cost(net, tn::plan_greedy(net));
  CHECK(best.flops == 120);
  CHECK(greedy.flops == 128);
  CHECK(best.flops <= greedy.flops);
  CHECK(greedy.flops <= 2 * best.flops);
}

TEST_CASE("plan_exhaustive refuses oversized networks") {
  const Circuit c = random_circuit(4, 5, 12);
  const TensorNetwork net = tn::circuit_to_network(c, BasisState::zeros(4));
  CHECK(net.tensors.size() > 12);
  CHECK_THROWS_AS(tn::plan_exhaustive(net), Error);
}

TEST_CASE("plan independence: all plans agree on the value") {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const Circuit c = random_circuit(4, seed, 7);
    const TensorNetwork net =
        tn::circuit_to_network(c, BasisState::zeros(4), BasisState::zeros(4));
    const Complex greedy = tn::contract(net, tn::plan_greedy(net)).scalar();
    const Complex seq =
        tn::contract(net, ContractionPlan::sequential(static_cast<int>(net.tensors.size())))
            .scalar();
    CHECK(std::abs(greedy - seq) < 1e-10);
    if (net.tensors.size() <= 12) {
      const Complex ex = tn::contract(net, tn::plan_exhaustive(net)).scalar();
      CHECK(std::abs(greedy - ex) < 1e-10);
    }
  }
}

TEST_CASE("contraction matches dense statevector simulation") {
  for (std::uint64_t seed : {11u, 12u, 13u, 14u}) {
    const int n = 2 + static_cast<int>(seed % 4);
    const Circuit c = random_circuit(n, seed, 16);
    const TensorNetwork net = tn::circuit_to_network(c, BasisState::zeros(n));
    const Tensor state = tn::contract(net, tn::plan_greedy(net));
    CHECK(testref::max_deviation(state.data, testref::simulate(c)) < 1e-10);
  }
}

TEST_CASE("cost model counts the executed multiply-adds exactly") {
  for (std::uint64_t seed : {21u, 22u}) {
    const Circuit c = random_circuit(3, seed, 8);
    const TensorNetwork net =
        tn::circuit_to_network(c, BasisState::zeros(3), BasisState::zeros(3));
    for (const ContractionPlan& plan :
         {tn::plan_greedy(net), ContractionPlan::sequential(static_cast<int>(net.tensors.size()))}) {
      std::uint64_t madds = 0;
      tn::contract(net, plan, &madds);
      CHECK(madds == tn::plan_cost(net, plan).flops);
    }
  }
}

TEST_CASE("slice: ghz scalar network over one internal wire") {
  const TensorNetwork net = ghz_amplitude_network(3);
  const auto labels = tn::sliceable_labels(net);
  REQUIRE(!labels.empty());
  const auto parts = tn::slice(net, {labels[0]});
  REQUIRE(parts.size() == 2);
  const ContractionPlan plan = tn::plan_greedy(net);
  const Complex total = tn::contract(parts[0].net, plan).scalar() +
                        tn::contract(parts[1].net, plan).scalar();
  CHECK(std::abs(total - kInvSqrt2) < 1e-12);
}

TEST_CASE("slice: edge cases") {
  const TensorNetwork net = tn::circuit_to_network(ghz(2), BasisState::zeros(2));
  const auto unsliced = tn::slice(net, {});
  REQUIRE(unsliced.size() == 1);
  CHECK(unsliced[0].net.tensors.size() == net.tensors.size());
  // open indices cannot be sliced
  CHECK_THROWS_AS(tn::slice(net, {net.open[0].label}), Error);
  CHECK_THROWS_AS(tn::slice(net, {"nope"}), Error);
}

TEST_CASE("slicing identity on random scalar networks") {
  for (std::uint64_t seed : {31u, 32u}) {
    const Circuit c = random_circuit(3, seed, 6);
    const TensorNetwork net =
        tn::circuit_to_network(c, BasisState::zeros(3), BasisState::zeros(3));
    const ContractionPlan plan = tn::plan_greedy(net);
    const Complex whole = tn::contract(net, plan).scalar();
    const auto labels = tn::sliceable_labels(net);
    REQUIRE(labels.size() >= 2);
    for (const auto& pick :
         {std::vector<std::string>{labels[0]}, std::vector<std::string>{labels[0], labels[1]}}) {
      Complex sum = 0.0;
      for (const auto& part : tn::slice(net, pick)) sum += tn::contract(part.net, plan).scalar();
      CHECK(std::abs(sum - whole) < 1e-10);
    }
  }
}

TEST_CASE("json round trips for networks and plans") {
  const TensorNetwork net = ghz_amplitude_network(2);
  const TensorNetwork back = tn::network_from_json(tn::to_json(net));
  REQUIRE(back.tensors.size() == net.tensors.size());
  for (std::size_t i = 0; i < net.tensors.size(); ++i) {
    CHECK(back.tensors[i].indices == net.tensors[i].indices);
    CHECK(back.tensors[i].data == net.tensors[i].data);
  }

  const ContractionPlan plan = tn::plan_greedy(net);
  const ContractionPlan plan_back = tn::plan_from_json(tn::to_json(plan));
  CHECK(tn::to_json(plan_back) == tn::to_json(plan));
  CHECK(std::abs(tn::contract(net, plan_back).scalar() -
                 tn::contract(net, plan).scalar()) < 1e-12);
}
