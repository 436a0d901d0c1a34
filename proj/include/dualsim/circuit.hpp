#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dualsim {

using Complex = std::complex<double>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Circuit-text error carrying the offending source position (1-based).
struct ParseError : Error {
  ParseError(int line, int column, const std::string& what)
      : Error("line " + std::to_string(line) + ", col " + std::to_string(column) + ": " + what),
        line(line),
        column(column) {}
  int line;
  int column;
};

/// Small dense complex matrix, row-major. Only used for gate-sized and
/// test-sized matrices; the simulation backends never materialize big ones.
struct DenseMatrix {
  std::size_t dim = 0;
  std::vector<Complex> a;

  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t d) : dim(d), a(d * d) {}

  static DenseMatrix identity(std::size_t d);

  Complex& operator()(std::size_t r, std::size_t c) { return a[r * dim + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return a[r * dim + c]; }

  DenseMatrix operator*(const DenseMatrix& rhs) const;
  DenseMatrix adjoint() const;
  DenseMatrix kron(const DenseMatrix& rhs) const;  // this on higher-significance bits
  bool approx_equal(const DenseMatrix& rhs, double eps) const;
};

enum class GateKind { I, X, Y, Z, H, S, Sdg, T, Tdg, RX, RY, RZ, P, SWAP, CX, CZ, MCX };

const char* gate_name(GateKind k);

struct Gate {
  GateKind kind = GateKind::I;
  std::vector<double> params;   // radians; empty unless rotation/phase
  std::vector<int> controls;
  std::vector<int> targets;

  static Gate single(GateKind k, int target) { return {k, {}, {}, {target}}; }
  static Gate rotation(GateKind k, double angle, int target) { return {k, {angle}, {}, {target}}; }
  static Gate cx(int control, int target) { return {GateKind::CX, {}, {control}, {target}}; }
  static Gate cz(int control, int target) { return {GateKind::CZ, {}, {control}, {target}}; }
  static Gate swap(int a, int b) { return {GateKind::SWAP, {}, {}, {a, b}}; }
  static Gate mcx(std::vector<int> controls, int target) {
    return {GateKind::MCX, {}, std::move(controls), {target}};
  }

  /// Number of touched qubits (controls + targets).
  int arity() const { return static_cast<int>(controls.size() + targets.size()); }
  /// Touched qubits in matrix-index order: controls first, then targets.
  std::vector<int> qubits() const;
  Gate inverse() const;
  /// Checks kind/arity rules, disjointness and (when n >= 0) index range.
  void validate(int num_qubits = -1) const;

  bool operator==(const Gate&) const = default;
};

struct Circuit {
  int num_qubits = 0;
  std::vector<Gate> gates;

  Circuit() = default;
  explicit Circuit(int n) : num_qubits(n) {
    if (n <= 0) throw Error("circuit needs a positive qubit count");
  }

  Circuit& add(Gate g) {
    g.validate(num_qubits);
    gates.push_back(std::move(g));
    return *this;
  }
  std::size_t size() const { return gates.size(); }

  bool operator==(const Circuit&) const = default;
};

/// Computational basis state; bits[i] is the value of qubit i.
struct BasisState {
  std::vector<bool> bits;

  BasisState() = default;
  explicit BasisState(std::vector<bool> b) : bits(std::move(b)) {}

  /// Ket-style string: leftmost character is the highest qubit.
  static BasisState from_string(std::string_view ket);
  static BasisState from_index(std::uint64_t index, int n);
  static BasisState zeros(int n) { return BasisState(std::vector<bool>(n, false)); }

  int num_qubits() const { return static_cast<int>(bits.size()); }
  std::uint64_t index() const;
  std::string str() const;

  bool operator==(const BasisState&) const = default;
};

/// Parses the line/';'-separated circuit text ("qubits <n>" header, then
/// "<gate> [<angle>] <qubit>...", '#' comments).
Circuit parse_circuit(std::string_view text);

/// Prints a circuit in the same text format; parse_circuit(to_text(c)) == c.
std::string to_text(const Circuit& c);

/// Dense 2^k x 2^k unitary of a gate, k = arity. Row/column bits are ordered
/// controls-then-targets, most significant first.
DenseMatrix gate_matrix(const Gate& g);

/// Dense matrix of the gate's action on its target qubits alone, ignoring
/// controls (2x2 except SWAP).
DenseMatrix gate_target_matrix(const Gate& g);

/// Reverses the gate order and replaces each gate by its inverse.
Circuit invert_circuit(const Circuit& c);

/// Gates of a followed by gates of b; qubit counts must match.
Circuit concatenate(const Circuit& a, const Circuit& b);

}  // namespace dualsim
