#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dense_reference.hpp"
#include "dualsim/circuit.hpp"
#include "dualsim/driver.hpp"

using namespace dualsim;

namespace {

const double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

Circuit random_circuit(int n, std::uint64_t seed, int gates) {
  return driver::generate_benchmark(driver::BenchmarkFamily::random, n, seed, {gates, -1});
}

}  // namespace

TEST_CASE("parse: ghz preparation circuit") {
  const Circuit c = parse_circuit("qubits 3; h 2; cx 2 1; cx 1 0");
  CHECK(c.num_qubits == 3);
  REQUIRE(c.gates.size() == 3);
  CHECK(c.gates[0] == Gate::single(GateKind::H, 2));
  CHECK(c.gates[1] == Gate::cx(2, 1));
  CHECK(c.gates[2] == Gate::cx(1, 0));
}

TEST_CASE("parse: empty circuit, comments, angles") {
  CHECK(parse_circuit("qubits 1;").gates.empty());
  const Circuit c = parse_circuit("# preamble\nqubits 2\nrx 1.5 0  # angle in radians\nmcx 1 0");
  REQUIRE(c.gates.size() == 2);
  CHECK(c.gates[0].params[0] == 1.5);
  CHECK(c.gates[1] == Gate::mcx({1}, 0));
}

TEST_CASE("parse: errors carry source positions") {
  CHECK_THROWS_AS(parse_circuit("qubits 2; h 5"), ParseError);
  try {
    parse_circuit("qubits 2\nh 5");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.column == 1);
  }
  CHECK_THROWS_AS(parse_circuit("qubits 2; frob 0"), ParseError);     // unknown gate
  CHECK_THROWS_AS(parse_circuit("qubits 2; cx 0"), ParseError);       // arity
  CHECK_THROWS_AS(parse_circuit("qubits 2; rx 0"), ParseError);       // missing qubit
  CHECK_THROWS_AS(parse_circuit("qubits 2; cx 0 0"), ParseError);     // duplicate qubit
  CHECK_THROWS_AS(parse_circuit("h 0"), ParseError);                  // missing header
  CHECK_THROWS_AS(parse_circuit("qubits 0"), ParseError);
}

TEST_CASE("gate matrices match the textbook fixtures") {
  const DenseMatrix h = gate_matrix(Gate::single(GateKind::H, 0));
  CHECK(h(0, 0).real() == doctest::Approx(kInvSqrt2));
  CHECK(h(1, 1).real() == doctest::Approx(-kInvSqrt2));
  CHECK(h(0, 1).real() == doctest::Approx(kInvSqrt2));

  const DenseMatrix cx = gate_matrix(Gate::cx(1, 0));
  DenseMatrix cx_expect(4);
  cx_expect(0, 0) = cx_expect(1, 1) = cx_expect(2, 3) = cx_expect(3, 2) = 1.0;
  CHECK(cx.approx_equal(cx_expect, 0.0));

  CHECK(gate_matrix(Gate::single(GateKind::I, 0)).approx_equal(DenseMatrix::identity(2), 0.0));

  const DenseMatrix cz = gate_matrix(Gate::cz(1, 0));
  for (int i = 0; i < 4; ++i) CHECK(cz(i, i) == Complex(i == 3 ? -1.0 : 1.0));

  const DenseMatrix swap = gate_matrix(Gate::swap(0, 1));
  CHECK(swap(1, 2) == Complex(1.0));
  CHECK(swap(2, 1) == Complex(1.0));
  CHECK(swap(1, 1) == Complex(0.0));

  // MCX on 3 controls: identity except the all-ones control block
  const DenseMatrix mcx = gate_matrix(Gate::mcx({3, 2, 1}, 0));
  DenseMatrix mcx_expect = DenseMatrix::identity(16);
  mcx_expect(14, 14) = mcx_expect(15, 15) = 0.0;
  mcx_expect(14, 15) = mcx_expect(15, 14) = 1.0;
  CHECK(mcx.approx_equal(mcx_expect, 0.0));

  const DenseMatrix t = gate_matrix(Gate::single(GateKind::T, 0));
  CHECK(std::abs(t(1, 1) - std::polar(1.0, std::numbers::pi / 4)) < 1e-15);
}

TEST_CASE("every library gate is unitary") {
  std::vector<Gate> gates;
  for (GateKind k : {GateKind::I, GateKind::X, GateKind::Y, GateKind::Z, GateKind::H,
                     GateKind::S, GateKind::Sdg, GateKind::T, GateKind::Tdg})
    gates.push_back(Gate::single(k, 0));
  for (GateKind k : {GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::P})
    gates.push_back(Gate::rotation(k, 0.37, 0));
  gates.push_back(Gate::swap(0, 1));
  gates.push_back(Gate::cx(1, 0));
  gates.push_back(Gate::cz(0, 1));
  gates.push_back(Gate::mcx({2, 1}, 0));

  for (const Gate& g : gates) {
    const DenseMatrix u = gate_matrix(g);
    const DenseMatrix uu = u * u.adjoint();
    CHECK(uu.approx_equal(DenseMatrix::identity(u.dim), 1e-12));
  }
}

TEST_CASE("inverse gate matrices are the conjugate transposes") {
  std::vector<Gate> gates{Gate::single(GateKind::S, 0), Gate::single(GateKind::T, 0),
                          Gate::rotation(GateKind::RX, 0.91, 0),
                          Gate::rotation(GateKind::P, -2.2, 0), Gate::mcx({1}, 0)};
  for (const Gate& g : gates)
    CHECK(gate_matrix(g.inverse()).approx_equal(gate_matrix(g).adjoint(), 1e-12));
}

TEST_CASE("invert_circuit: order reversal and gate inverses") {
  Circuit h1(1);
  h1.add(Gate::single(GateKind::H, 0));
  CHECK(invert_circuit(h1) == h1);  // H is self-inverse

  Circuit ht(1);
  ht.add(Gate::single(GateKind::H, 0)).add(Gate::single(GateKind::T, 0));
  const Circuit inv = invert_circuit(ht);
  REQUIRE(inv.gates.size() == 2);
  CHECK(inv.gates[0] == Gate::single(GateKind::Tdg, 0));
  CHECK(inv.gates[1] == Gate::single(GateKind::H, 0));
  // (U_T U_H)^dagger = U_H^dagger U_T^dagger, by dense multiplication
  const DenseMatrix lhs =
      (gate_matrix(ht.gates[1]) * gate_matrix(ht.gates[0])).adjoint();
  const DenseMatrix rhs = gate_matrix(inv.gates[1]) * gate_matrix(inv.gates[0]);
  CHECK(lhs.approx_equal(rhs, 1e-12));

  CHECK(invert_circuit(Circuit(2)) == Circuit(2));
}

TEST_CASE("invert_circuit is an involution") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const Circuit c = random_circuit(4, seed, 12);
    CHECK(invert_circuit(invert_circuit(c)) == c);
  }
}

TEST_CASE("concatenate: G followed by its inverse is the identity") {
  const Circuit g = random_circuit(2, 11, 8);
  const Circuit miter = concatenate(g, invert_circuit(g));
  const DenseMatrix u = testref::unitary(miter);
  CHECK(u.approx_equal(DenseMatrix::identity(4), 1e-12));
}

TEST_CASE("concatenate: neutral element and mismatch") {
  const Circuit g = random_circuit(3, 7, 5);
  CHECK(concatenate(Circuit(3), g) == g);
  CHECK_THROWS_AS(concatenate(Circuit(2), Circuit(3)), Error);
}

TEST_CASE("round trip: parse(to_text(c)) == c") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Circuit c = random_circuit(2 + static_cast<int>(seed % 5), seed, 14);
    CHECK(parse_circuit(to_text(c)) == c);
  }
  // MCX with several controls survives printing too
  Circuit c(5);
  c.add(Gate::mcx({4, 2, 1}, 0));
  CHECK(parse_circuit(to_text(c)) == c);
}

TEST_CASE("basis states: ket strings and indices") {
  const BasisState b = BasisState::from_string("1010");
  CHECK(b.index() == 10);
  CHECK(b.bits[1] == true);
  CHECK(b.bits[0] == false);
  CHECK(b.str() == "1010");
  CHECK(BasisState::from_index(10, 4) == b);
  CHECK(BasisState::zeros(3).index() == 0);
  CHECK_THROWS_AS(BasisState::from_string("10x"), Error);
}
