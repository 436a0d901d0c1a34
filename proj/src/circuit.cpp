#include "dualsim/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace dualsim {

DenseMatrix DenseMatrix::identity(std::size_t d) {
  DenseMatrix m(d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& rhs) const {
  if (dim != rhs.dim) throw Error("matrix dimension mismatch");
  DenseMatrix out(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t k = 0; k < dim; ++k) {
      const Complex aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < dim; ++j) out(i, j) += aik * rhs(k, j);
    }
  return out;
}

DenseMatrix DenseMatrix::adjoint() const {
  DenseMatrix out(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

DenseMatrix DenseMatrix::kron(const DenseMatrix& rhs) const {
  DenseMatrix out(dim * rhs.dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const Complex w = (*this)(i, j);
      if (w == 0.0) continue;
      for (std::size_t r = 0; r < rhs.dim; ++r)
        for (std::size_t c = 0; c < rhs.dim; ++c)
          out(i * rhs.dim + r, j * rhs.dim + c) = w * rhs(r, c);
    }
  return out;
}

bool DenseMatrix::approx_equal(const DenseMatrix& rhs, double eps) const {
  if (dim != rhs.dim) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - rhs.a[i]) > eps) return false;
  return true;
}

namespace {

struct KindInfo {
  GateKind kind;
  const char* name;
  int num_params;
  int num_controls;  // -1: one or more (MCX)
  int num_targets;
};

constexpr KindInfo kKinds[] = {
    {GateKind::I, "i", 0, 0, 1},      {GateKind::X, "x", 0, 0, 1},
    {GateKind::Y, "y", 0, 0, 1},      {GateKind::Z, "z", 0, 0, 1},
    {GateKind::H, "h", 0, 0, 1},      {GateKind::S, "s", 0, 0, 1},
    {GateKind::Sdg, "sdg", 0, 0, 1},  {GateKind::T, "t", 0, 0, 1},
    {GateKind::Tdg, "tdg", 0, 0, 1},  {GateKind::RX, "rx", 1, 0, 1},
    {GateKind::RY, "ry", 1, 0, 1},    {GateKind::RZ, "rz", 1, 0, 1},
    {GateKind::P, "p", 1, 0, 1},      {GateKind::SWAP, "swap", 0, 0, 2},
    {GateKind::CX, "cx", 0, 1, 1},    {GateKind::CZ, "cz", 0, 1, 1},
    {GateKind::MCX, "mcx", 0, -1, 1},
};

const KindInfo& info(GateKind k) {
  for (const auto& ki : kKinds)
    if (ki.kind == k) return ki;
  throw Error("unknown gate kind");
}

const KindInfo* info_by_name(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (const auto& ki : kKinds)
    if (name == ki.name) return &ki;
  return nullptr;
}

DenseMatrix base_matrix(GateKind k, const std::vector<double>& params) {
  const Complex i1(0.0, 1.0);
  DenseMatrix m(2);
  switch (k) {
    case GateKind::I: return DenseMatrix::identity(2);
    case GateKind::X:
    case GateKind::CX:
    case GateKind::MCX:
      m(0, 1) = 1.0; m(1, 0) = 1.0; return m;
    case GateKind::Y:
      m(0, 1) = -i1; m(1, 0) = i1; return m;
    case GateKind::Z:
    case GateKind::CZ:
      m(0, 0) = 1.0; m(1, 1) = -1.0; return m;
    case GateKind::H: {
      const double s = std::numbers::sqrt2 / 2.0;
      m(0, 0) = s; m(0, 1) = s; m(1, 0) = s; m(1, 1) = -s;
      return m;
    }
    case GateKind::S: m(0, 0) = 1.0; m(1, 1) = i1; return m;
    case GateKind::Sdg: m(0, 0) = 1.0; m(1, 1) = -i1; return m;
    case GateKind::T: m(0, 0) = 1.0; m(1, 1) = std::polar(1.0, std::numbers::pi / 4); return m;
    case GateKind::Tdg: m(0, 0) = 1.0; m(1, 1) = std::polar(1.0, -std::numbers::pi / 4); return m;
    case GateKind::RX: {
      const double t = params.at(0) / 2;
      m(0, 0) = std::cos(t); m(0, 1) = -i1 * std::sin(t);
      m(1, 0) = -i1 * std::sin(t); m(1, 1) = std::cos(t);
      return m;
    }
    case GateKind::RY: {
      const double t = params.at(0) / 2;
      m(0, 0) = std::cos(t); m(0, 1) = -std::sin(t);
      m(1, 0) = std::sin(t); m(1, 1) = std::cos(t);
      return m;
    }
    case GateKind::RZ: {
      const double t = params.at(0) / 2;
      m(0, 0) = std::polar(1.0, -t); m(1, 1) = std::polar(1.0, t);
      return m;
    }
    case GateKind::P:
      m(0, 0) = 1.0; m(1, 1) = std::polar(1.0, params.at(0));
      return m;
    case GateKind::SWAP: {
      DenseMatrix s(4);
      s(0, 0) = 1.0; s(1, 2) = 1.0; s(2, 1) = 1.0; s(3, 3) = 1.0;
      return s;
    }
  }
  throw Error("unknown gate kind");
}

}  // namespace

const char* gate_name(GateKind k) { return info(k).name; }

std::vector<int> Gate::qubits() const {
  std::vector<int> q = controls;
  q.insert(q.end(), targets.begin(), targets.end());
  return q;
}

Gate Gate::inverse() const {
  Gate g = *this;
  switch (kind) {
    case GateKind::S: g.kind = GateKind::Sdg; break;
    case GateKind::Sdg: g.kind = GateKind::S; break;
    case GateKind::T: g.kind = GateKind::Tdg; break;
    case GateKind::Tdg: g.kind = GateKind::T; break;
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::P:
      g.params[0] = -g.params[0];
      break;
    default:
      break;  // self-inverse
  }
  return g;
}

void Gate::validate(int num_qubits) const {
  const KindInfo& ki = info(kind);
  if (static_cast<int>(params.size()) != ki.num_params)
    throw Error(std::string(ki.name) + ": expected " + std::to_string(ki.num_params) +
                " parameter(s), got " + std::to_string(params.size()));
  if (ki.num_controls >= 0) {
    if (static_cast<int>(controls.size()) != ki.num_controls)
      throw Error(std::string(ki.name) + ": wrong number of controls");
  } else if (controls.empty()) {
    throw Error(std::string(ki.name) + ": needs at least one control");
  }
  if (static_cast<int>(targets.size()) != ki.num_targets)
    throw Error(std::string(ki.name) + ": wrong number of targets");
  for (double p : params)
    if (!std::isfinite(p)) throw Error(std::string(ki.name) + ": non-finite parameter");

  std::vector<int> q = qubits();
  std::sort(q.begin(), q.end());
  if (std::adjacent_find(q.begin(), q.end()) != q.end())
    throw Error(std::string(ki.name) + ": duplicate qubit index");
  for (int i : q) {
    if (i < 0) throw Error(std::string(ki.name) + ": negative qubit index");
    if (num_qubits >= 0 && i >= num_qubits)
      throw Error(std::string(ki.name) + ": qubit index " + std::to_string(i) +
                  " out of range for " + std::to_string(num_qubits) + " qubits");
  }
}

BasisState BasisState::from_string(std::string_view ket) {
  std::vector<bool> bits(ket.size());
  for (std::size_t i = 0; i < ket.size(); ++i) {
    const char c = ket[ket.size() - 1 - i];
    if (c != '0' && c != '1') throw Error("basis state must consist of 0/1 characters");
    bits[i] = c == '1';
  }
  return BasisState(std::move(bits));
}

BasisState BasisState::from_index(std::uint64_t index, int n) {
  std::vector<bool> bits(n);
  for (int i = 0; i < n; ++i) bits[i] = (index >> i) & 1u;
  return BasisState(std::move(bits));
}

std::uint64_t BasisState::index() const {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) idx |= std::uint64_t{1} << i;
  return idx;
}

std::string BasisState::str() const {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) s[bits.size() - 1 - i] = '1';
  return s;
}

DenseMatrix gate_target_matrix(const Gate& g) { return base_matrix(g.kind, g.params); }

DenseMatrix gate_matrix(const Gate& g) {
  g.validate();
  DenseMatrix u = base_matrix(g.kind, g.params);
  const std::size_t nc = g.controls.size();
  if (nc == 0) return u;
  // Controlled extension: identity except the all-ones control block.
  const std::size_t dim = u.dim << nc;
  DenseMatrix m = DenseMatrix::identity(dim);
  const std::size_t off = dim - u.dim;
  for (std::size_t r = 0; r < u.dim; ++r)
    for (std::size_t c = 0; c < u.dim; ++c) m(off + r, off + c) = u(r, c);
  return m;
}

Circuit invert_circuit(const Circuit& c) {
  Circuit out(c.num_qubits);
  out.gates.reserve(c.gates.size());
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) out.gates.push_back(it->inverse());
  return out;
}

Circuit concatenate(const Circuit& a, const Circuit& b) {
  if (a.num_qubits != b.num_qubits)
    throw Error("cannot concatenate circuits with different qubit counts (" +
                std::to_string(a.num_qubits) + " vs " + std::to_string(b.num_qubits) + ")");
  Circuit out = a;
  out.gates.insert(out.gates.end(), b.gates.begin(), b.gates.end());
  return out;
}

namespace {

struct Token {
  std::string text;
  int line;
  int column;
};

// Statements are token runs separated by newlines or ';'.
std::vector<std::vector<Token>> tokenize(std::string_view text) {
  std::vector<std::vector<Token>> statements;
  std::vector<Token> current;
  int line = 1, col = 1;
  std::string tok;
  int tok_col = 0;

  auto flush_token = [&] {
    if (!tok.empty()) {
      current.push_back({tok, line, tok_col});
      tok.clear();
    }
  };
  auto flush_statement = [&] {
    flush_token();
    if (!current.empty()) statements.push_back(std::move(current));
    current.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '#') {  // comment to end of line
      flush_token();
      while (i < text.size() && text[i] != '\n') ++i;
      --i;
      continue;
    }
    if (c == '\n') {
      flush_statement();
      ++line;
      col = 1;
      continue;
    }
    if (c == ';') {
      flush_statement();
      ++col;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush_token();
    } else {
      if (tok.empty()) tok_col = col;
      tok.push_back(c);
    }
    ++col;
  }
  flush_statement();
  return statements;
}

int parse_int(const Token& t, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
  if (ec != std::errc{} || ptr != t.text.data() + t.text.size())
    throw ParseError(t.line, t.column, std::string("expected ") + what + ", got '" + t.text + "'");
  return value;
}

double parse_double(const Token& t) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
  if (ec != std::errc{} || ptr != t.text.data() + t.text.size())
    throw ParseError(t.line, t.column, "expected an angle in radians, got '" + t.text + "'");
  return value;
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
  const auto statements = tokenize(text);
  if (statements.empty()) throw ParseError(1, 1, "missing 'qubits <n>' header");

  const auto& header = statements.front();
  if (header[0].text != "qubits")
    throw ParseError(header[0].line, header[0].column, "expected 'qubits <n>' header");
  if (header.size() != 2)
    throw ParseError(header[0].line, header[0].column, "'qubits' takes exactly one argument");
  const int n = parse_int(header[1], "a qubit count");
  if (n <= 0) throw ParseError(header[1].line, header[1].column, "qubit count must be positive");

  Circuit circuit(n);
  for (std::size_t s = 1; s < statements.size(); ++s) {
    const auto& st = statements[s];
    const Token& name = st[0];
    const KindInfo* ki = info_by_name(name.text);
    if (ki == nullptr)
      throw ParseError(name.line, name.column, "unknown gate '" + name.text + "'");

    std::size_t pos = 1;
    Gate g;
    g.kind = ki->kind;
    for (int p = 0; p < ki->num_params; ++p) {
      if (pos >= st.size())
        throw ParseError(name.line, name.column, "'" + name.text + "' is missing its angle");
      g.params.push_back(parse_double(st[pos++]));
    }
    std::vector<int> qubits;
    for (; pos < st.size(); ++pos) qubits.push_back(parse_int(st[pos], "a qubit index"));

    const int want_targets = ki->num_targets;
    if (ki->num_controls == -1) {
      if (static_cast<int>(qubits.size()) < 1 + want_targets)
        throw ParseError(name.line, name.column,
                         "'" + name.text + "' needs at least one control and one target");
      g.controls.assign(qubits.begin(), qubits.end() - want_targets);
      g.targets.assign(qubits.end() - want_targets, qubits.end());
    } else {
      if (static_cast<int>(qubits.size()) != ki->num_controls + want_targets)
        throw ParseError(name.line, name.column,
                         "'" + name.text + "' expects " +
                             std::to_string(ki->num_controls + want_targets) + " qubit(s), got " +
                             std::to_string(qubits.size()));
      g.controls.assign(qubits.begin(), qubits.begin() + ki->num_controls);
      g.targets.assign(qubits.begin() + ki->num_controls, qubits.end());
    }
    try {
      circuit.add(std::move(g));
    } catch (const Error& e) {
      throw ParseError(name.line, name.column, e.what());
    }
  }
  return circuit;
}

std::string to_text(const Circuit& c) {
  std::ostringstream out;
  out << "qubits " << c.num_qubits << "\n";
  char buf[64];
  for (const Gate& g : c.gates) {
    out << gate_name(g.kind);
    for (double p : g.params) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, p);
      out << ' ' << std::string_view(buf, ptr - buf);
      (void)ec;
    }
    for (int q : g.controls) out << ' ' << q;
    for (int q : g.targets) out << ' ' << q;
    out << "\n";
  }
  return out.str();
}

}  // namespace dualsim
