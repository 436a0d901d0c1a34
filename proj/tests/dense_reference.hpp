#pragma once

// Brute-force dense statevector reference used as the independent oracle in
// tests. Gates are applied by direct index arithmetic on the full 2^n vector;
// nothing here touches the decision-diagram or tensor-network code paths.

#include <cstdint>
#include <vector>

#include "dualsim/circuit.hpp"

namespace dualsim::testref {

inline void apply_gate(const Gate& g, std::vector<Complex>& state, int n) {
  const DenseMatrix u = gate_matrix(g);
  const auto qubits = g.qubits();  // controls then targets; qubits[0] is the MSB
  const int k = g.arity();
  const std::uint64_t dim = std::uint64_t{1} << n;
  const std::uint64_t block = std::uint64_t{1} << k;

  std::uint64_t gate_mask = 0;
  for (int q : qubits) gate_mask |= std::uint64_t{1} << q;

  std::vector<std::uint64_t> offsets(block);
  for (std::uint64_t r = 0; r < block; ++r) {
    std::uint64_t off = 0;
    for (int pos = 0; pos < k; ++pos)
      if ((r >> (k - 1 - pos)) & 1) off |= std::uint64_t{1} << qubits[pos];
    offsets[r] = off;
  }

  std::vector<Complex> local(block);
  for (std::uint64_t base = 0; base < dim; ++base) {
    if (base & gate_mask) continue;
    for (std::uint64_t r = 0; r < block; ++r) local[r] = state[base | offsets[r]];
    for (std::uint64_t row = 0; row < block; ++row) {
      Complex acc = 0.0;
      for (std::uint64_t col = 0; col < block; ++col) acc += u(row, col) * local[col];
      state[base | offsets[row]] = acc;
    }
  }
}

inline std::vector<Complex> simulate_from(const Circuit& c, const BasisState& input) {
  std::vector<Complex> state(std::uint64_t{1} << c.num_qubits, 0.0);
  state[input.index()] = 1.0;
  for (const Gate& g : c.gates) apply_gate(g, state, c.num_qubits);
  return state;
}

inline std::vector<Complex> simulate(const Circuit& c) {
  return simulate_from(c, BasisState::zeros(c.num_qubits));
}

/// Full 2^n x 2^n unitary, column by column.
inline DenseMatrix unitary(const Circuit& c) {
  const std::uint64_t dim = std::uint64_t{1} << c.num_qubits;
  DenseMatrix m(dim);
  for (std::uint64_t j = 0; j < dim; ++j) {
    const auto col = simulate_from(c, BasisState::from_index(j, c.num_qubits));
    for (std::uint64_t i = 0; i < dim; ++i) m(i, j) = col[i];
  }
  return m;
}

inline double max_deviation(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double dev = a.size() == b.size() ? 0.0 : 1.0 / 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
    dev = std::max(dev, std::abs(a[i] - b[i]));
  return dev;
}

/// Fidelity |<state2|state1>|^2 of two dense states.
inline double overlap_fidelity(const std::vector<Complex>& s1, const std::vector<Complex>& s2) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < s1.size(); ++i) acc += std::conj(s2[i]) * s1[i];
  return std::norm(acc);
}

}  // namespace dualsim::testref
