#include "dualsim/dd.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <unordered_set>

namespace dualsim::dd {

VNode* v_terminal() {
  static VNode t;
  return &t;
}

MNode* m_terminal() {
  static MNode t;
  return &t;
}

std::int64_t quantize(double x, double eps) {
  const double step = eps / 2.0;
  // clamp keeps llround defined for out-of-range ratios
  const double cell = std::clamp(x / step, -9.0e18, 9.0e18);
  return std::llround(cell);
}

namespace {

constexpr std::uint32_t kRefSaturated = 0xffffffffu;

inline std::size_t hash_combine(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

char* format_weight(char* buf, std::size_t size, const Complex& w) {
  std::snprintf(buf, size, "%.6g%+.6gi", w.real(), w.imag());
  return buf;
}

}  // namespace

template <class K>
std::size_t Package::KeyHash::operator()(const K& k) const {
  std::size_t h = std::hash<int>{}(k.level);
  for (std::size_t i = 0; i < k.child.size(); ++i) {
    h = hash_combine(h, std::hash<const void*>{}(k.child[i]));
    h = hash_combine(h, std::hash<std::int64_t>{}(k.w[i].re));
    h = hash_combine(h, std::hash<std::int64_t>{}(k.w[i].im));
  }
  return h;
}

std::size_t Package::BinKeyHash::operator()(const BinKey& k) const {
  std::size_t h = std::hash<const void*>{}(k.a);
  h = hash_combine(h, std::hash<const void*>{}(k.b));
  h = hash_combine(h, std::hash<std::int64_t>{}(k.w.re));
  h = hash_combine(h, std::hash<std::int64_t>{}(k.w.im));
  return h;
}

Package::Package(PackageConfig cfg) : cfg_(cfg) {
  if (cfg_.eps <= 0) throw Error("package eps must be positive");
}

Package::~Package() = default;

Package::QWeight Package::qweight(const Complex& w) const {
  return {quantize(w.real(), cfg_.eps), quantize(w.imag(), cfg_.eps)};
}

bool Package::qzero(const Complex& w) const {
  const QWeight q = qweight(w);
  return q.re == 0 && q.im == 0;
}

VEdge Package::make_vnode(int level, std::array<VEdge, 2> succ) {
  for (auto& e : succ)
    if (qzero(e.weight)) e = {v_terminal(), 0.0};

  int first = -1;
  for (int i = 0; i < 2; ++i)
    if (succ[i].weight != 0.0) {
      first = i;
      break;
    }
  if (first < 0) return {v_terminal(), 0.0};

  const Complex top = succ[first].weight;
  succ[first].weight = 1.0;
  for (int i = first + 1; i < 2; ++i) {
    if (succ[i].weight == 0.0) continue;
    succ[i].weight /= top;
    if (qzero(succ[i].weight)) succ[i] = {v_terminal(), 0.0};
  }

  const VKey key{level,
                 {succ[0].node, succ[1].node},
                 {qweight(succ[0].weight), qweight(succ[1].weight)}};
  if (auto it = vtable_.find(key); it != vtable_.end()) return {it->second, top};

  VNode* node;
  if (!vfree_.empty()) {
    node = vfree_.back();
    vfree_.pop_back();
  } else {
    node = &vpool_.emplace_back();
  }
  node->level = level;
  node->succ = succ;
  node->ref = 0;
  ++live_nodes_;
  vtable_.emplace(key, node);
  return {node, top};
}

MEdge Package::make_mnode(int level, std::array<MEdge, 4> succ) {
  for (auto& e : succ)
    if (qzero(e.weight)) e = {m_terminal(), 0.0};

  int first = -1;
  for (int i = 0; i < 4; ++i)
    if (succ[i].weight != 0.0) {
      first = i;
      break;
    }
  if (first < 0) return {m_terminal(), 0.0};

  const Complex top = succ[first].weight;
  succ[first].weight = 1.0;
  for (int i = first + 1; i < 4; ++i) {
    if (succ[i].weight == 0.0) continue;
    succ[i].weight /= top;
    if (qzero(succ[i].weight)) succ[i] = {m_terminal(), 0.0};
  }

  const MKey key{level,
                 {succ[0].node, succ[1].node, succ[2].node, succ[3].node},
                 {qweight(succ[0].weight), qweight(succ[1].weight), qweight(succ[2].weight),
                  qweight(succ[3].weight)}};
  if (auto it = mtable_.find(key); it != mtable_.end()) return {it->second, top};

  MNode* node;
  if (!mfree_.empty()) {
    node = mfree_.back();
    mfree_.pop_back();
  } else {
    node = &mpool_.emplace_back();
  }
  node->level = level;
  node->succ = succ;
  node->ref = 0;
  ++live_nodes_;
  mtable_.emplace(key, node);
  return {node, top};
}

// --- reference counting / garbage collection ------------------------------

void Package::inc_ref_edge(const VEdge& e) {
  if (is_terminal(e.node)) return;
  if (e.node->ref == kRefSaturated) return;
  if (++e.node->ref == 1)
    for (const auto& s : e.node->succ) inc_ref_edge(s);
}

void Package::dec_ref_edge(const VEdge& e) {
  if (is_terminal(e.node)) return;
  if (e.node->ref == kRefSaturated) return;
  assert(e.node->ref > 0);
  if (--e.node->ref == 0)
    for (const auto& s : e.node->succ) dec_ref_edge(s);
}

void Package::inc_ref_edge(const MEdge& e) {
  if (is_terminal(e.node)) return;
  if (e.node->ref == kRefSaturated) return;
  if (++e.node->ref == 1)
    for (const auto& s : e.node->succ) inc_ref_edge(s);
}

void Package::dec_ref_edge(const MEdge& e) {
  if (is_terminal(e.node)) return;
  if (e.node->ref == kRefSaturated) return;
  assert(e.node->ref > 0);
  if (--e.node->ref == 0)
    for (const auto& s : e.node->succ) dec_ref_edge(s);
}

void Package::collect_garbage(bool force) {
  if (!force && live_nodes_ <= cfg_.gc_threshold) return;
  ++gc_runs_;
  std::erase_if(vtable_, [this](const auto& kv) {
    if (kv.second->ref != 0) return false;
    vfree_.push_back(kv.second);
    --live_nodes_;
    return true;
  });
  std::erase_if(mtable_, [this](const auto& kv) {
    if (kv.second->ref != 0) return false;
    mfree_.push_back(kv.second);
    --live_nodes_;
    return true;
  });
  clear_compute_tables();
}

void Package::maybe_collect() {
  if (live_nodes_ > cfg_.gc_threshold) collect_garbage(true);
}

void Package::clear_compute_tables() {
  ct_mv_.clear();
  ct_mm_.clear();
  ct_vadd_.clear();
  ct_madd_.clear();
  ct_kron_.clear();
}

// --- construction ----------------------------------------------------------

VectorDD Package::basis_state(const BasisState& b) {
  const int n = b.num_qubits();
  if (n <= 0) throw Error("basis state needs at least one qubit");
  maybe_collect();
  VEdge e{v_terminal(), 1.0};
  for (int l = 0; l < n; ++l) {
    std::array<VEdge, 2> succ{VEdge{v_terminal(), 0.0}, VEdge{v_terminal(), 0.0}};
    succ[b.bits[l] ? 1 : 0] = e;
    e = make_vnode(l, succ);
  }
  return {e, n};
}

VectorDD Package::zero_vector(int n) { return {{v_terminal(), 0.0}, n}; }

MEdge Package::identity_edge(int top_level) {
  MEdge e{m_terminal(), 1.0};
  for (int l = 0; l <= top_level; ++l)
    e = make_mnode(l, {e, MEdge{m_terminal(), 0.0}, MEdge{m_terminal(), 0.0}, e});
  return e;
}

MatrixDD Package::identity(int n) {
  if (n < 0) throw Error("negative qubit count");
  maybe_collect();
  return {identity_edge(n - 1), n};
}

MatrixDD Package::gate_dd(const Gate& g, int n) {
  g.validate(n);
  if (g.kind == GateKind::SWAP) {
    const int a = g.targets[0], b = g.targets[1];
    const MatrixDD ab = gate_dd(Gate::cx(a, b), n);
    const MatrixDD ba = gate_dd(Gate::cx(b, a), n);
    return multiply(ab, multiply(ba, ab));
  }
  maybe_collect();

  const DenseMatrix u = gate_target_matrix(g);
  const int target = g.targets[0];
  std::vector<char> is_control(n, 0);
  for (int c : g.controls) is_control[c] = 1;

  const MEdge zero{m_terminal(), 0.0};
  // Operator blocks for the qubits below the target, grown bottom-up.
  std::array<MEdge, 4> block;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      block[2 * i + j] = {m_terminal(), u(i, j)};

  for (int l = 0; l < target; ++l) {
    if (is_control[l]) {
      // gate applies on the |1> branch, identity on the |0> branch
      const MEdge id = l == 0 ? MEdge{m_terminal(), 1.0} : identity_edge(l - 1);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const int k = 2 * i + j;
          block[k] = make_mnode(l, {i == j ? id : zero, zero, zero, block[k]});
        }
    } else {
      for (auto& e : block) e = make_mnode(l, {e, zero, zero, e});
    }
  }

  MEdge e = make_mnode(target, block);
  for (int l = target + 1; l < n; ++l) {
    if (is_control[l]) {
      e = make_mnode(l, {identity_edge(l - 1), zero, zero, e});
    } else {
      e = make_mnode(l, {e, zero, zero, e});
    }
  }
  return {e, n};
}

VEdge Package::from_dense_rec(const std::vector<Complex>& v, int level, std::uint64_t base) {
  if (level < 0) return {v_terminal(), v[base]};
  return make_vnode(level, {from_dense_rec(v, level - 1, base),
                            from_dense_rec(v, level - 1, base | (std::uint64_t{1} << level))});
}

VectorDD Package::from_dense(const std::vector<Complex>& amplitudes) {
  int n = 0;
  while ((std::size_t{1} << n) < amplitudes.size()) ++n;
  if ((std::size_t{1} << n) != amplitudes.size())
    throw Error("amplitude count must be a power of two");
  maybe_collect();
  return {from_dense_rec(amplitudes, n - 1, 0), n};
}

MEdge Package::from_dense_rec(const DenseMatrix& m, int level, std::uint64_t row,
                              std::uint64_t col) {
  if (level < 0) return {m_terminal(), m(row, col)};
  std::array<MEdge, 4> succ;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      succ[2 * i + j] = from_dense_rec(m, level - 1, row | (static_cast<std::uint64_t>(i) << level),
                                       col | ((static_cast<std::uint64_t>(j) << level)));
  return make_mnode(level, succ);
}

MatrixDD Package::from_dense(const DenseMatrix& m) {
  int n = 0;
  while ((std::size_t{1} << n) < m.dim) ++n;
  if ((std::size_t{1} << n) != m.dim) throw Error("matrix dimension must be a power of two");
  maybe_collect();
  return {from_dense_rec(m, n - 1, 0, 0), n};
}

// --- arithmetic -------------------------------------------------------------

VEdge Package::add_rec(const VEdge& a, const VEdge& b, int level) {
  if (a.weight == 0.0) return b;
  if (b.weight == 0.0) return a;
  if (level < 0 || a.node == b.node) {
    const Complex s = a.weight + b.weight;
    if (qzero(s)) return {v_terminal(), 0.0};
    return {a.node, s};
  }
  const Complex ratio = b.weight / a.weight;
  const BinKey key{a.node, b.node, qweight(ratio)};
  if (cfg_.memoize) {
    if (auto it = ct_vadd_.find(key); it != ct_vadd_.end()) {
      VEdge e = it->second;
      e.weight *= a.weight;
      return e;
    }
  }
  std::array<VEdge, 2> succ;
  for (int i = 0; i < 2; ++i) {
    VEdge rhs = b.node->succ[i];
    rhs.weight *= ratio;
    succ[i] = add_rec(a.node->succ[i], rhs, level - 1);
  }
  const VEdge res = make_vnode(level, succ);
  if (cfg_.memoize) ct_vadd_[key] = res;
  return {res.node, res.weight * a.weight};
}

MEdge Package::add_rec(const MEdge& a, const MEdge& b, int level) {
  if (a.weight == 0.0) return b;
  if (b.weight == 0.0) return a;
  if (level < 0 || a.node == b.node) {
    const Complex s = a.weight + b.weight;
    if (qzero(s)) return {m_terminal(), 0.0};
    return {a.node, s};
  }
  const Complex ratio = b.weight / a.weight;
  const BinKey key{a.node, b.node, qweight(ratio)};
  if (cfg_.memoize) {
    if (auto it = ct_madd_.find(key); it != ct_madd_.end()) {
      MEdge e = it->second;
      e.weight *= a.weight;
      return e;
    }
  }
  std::array<MEdge, 4> succ;
  for (int i = 0; i < 4; ++i) {
    MEdge rhs = b.node->succ[i];
    rhs.weight *= ratio;
    succ[i] = add_rec(a.node->succ[i], rhs, level - 1);
  }
  const MEdge res = make_mnode(level, succ);
  if (cfg_.memoize) ct_madd_[key] = res;
  return {res.node, res.weight * a.weight};
}

VectorDD Package::add(const VectorDD& a, const VectorDD& b) {
  if (a.n != b.n) throw Error("qubit count mismatch in add");
  inc_ref(a);
  inc_ref(b);
  maybe_collect();
  const VEdge r = add_rec(a.root, b.root, a.n - 1);
  dec_ref(a);
  dec_ref(b);
  return {r, a.n};
}

MatrixDD Package::add(const MatrixDD& a, const MatrixDD& b) {
  if (a.n != b.n) throw Error("qubit count mismatch in add");
  inc_ref(a);
  inc_ref(b);
  maybe_collect();
  const MEdge r = add_rec(a.root, b.root, a.n - 1);
  dec_ref(a);
  dec_ref(b);
  return {r, a.n};
}

VEdge Package::mv_rec(const MEdge& a, const VEdge& b, int level) {
  if (a.weight == 0.0 || b.weight == 0.0) return {v_terminal(), 0.0};
  const Complex w = a.weight * b.weight;
  if (level < 0) return {v_terminal(), w};
  const BinKey key{a.node, b.node, {}};
  if (cfg_.memoize) {
    if (auto it = ct_mv_.find(key); it != ct_mv_.end()) {
      VEdge e = it->second;
      e.weight *= w;
      return e;
    }
  }
  std::array<VEdge, 2> succ;
  for (int i = 0; i < 2; ++i) {
    const VEdge p0 = mv_rec(a.node->succ[2 * i + 0], b.node->succ[0], level - 1);
    const VEdge p1 = mv_rec(a.node->succ[2 * i + 1], b.node->succ[1], level - 1);
    succ[i] = add_rec(p0, p1, level - 1);
  }
  const VEdge res = make_vnode(level, succ);
  if (cfg_.memoize) ct_mv_[key] = res;
  return {res.node, res.weight * w};
}

MEdge Package::mm_rec(const MEdge& a, const MEdge& b, int level) {
  if (a.weight == 0.0 || b.weight == 0.0) return {m_terminal(), 0.0};
  const Complex w = a.weight * b.weight;
  if (level < 0) return {m_terminal(), w};
  const BinKey key{a.node, b.node, {}};
  if (cfg_.memoize) {
    if (auto it = ct_mm_.find(key); it != ct_mm_.end()) {
      MEdge e = it->second;
      e.weight *= w;
      return e;
    }
  }
  std::array<MEdge, 4> succ;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const MEdge p0 = mm_rec(a.node->succ[2 * i + 0], b.node->succ[0 + j], level - 1);
      const MEdge p1 = mm_rec(a.node->succ[2 * i + 1], b.node->succ[2 + j], level - 1);
      succ[2 * i + j] = add_rec(p0, p1, level - 1);
    }
  const MEdge res = make_mnode(level, succ);
  if (cfg_.memoize) ct_mm_[key] = res;
  return {res.node, res.weight * w};
}

VectorDD Package::multiply(const MatrixDD& u, const VectorDD& v) {
  if (u.n != v.n) throw Error("qubit count mismatch in multiply");
  inc_ref(u);
  inc_ref(v);
  maybe_collect();
  const VEdge r = mv_rec(u.root, v.root, u.n - 1);
  dec_ref(u);
  dec_ref(v);
  return {r, v.n};
}

MatrixDD Package::multiply(const MatrixDD& a, const MatrixDD& b) {
  if (a.n != b.n) throw Error("qubit count mismatch in multiply");
  inc_ref(a);
  inc_ref(b);
  maybe_collect();
  const MEdge r = mm_rec(a.root, b.root, a.n - 1);
  dec_ref(a);
  dec_ref(b);
  return {r, a.n};
}

MEdge Package::kron_rec(const MEdge& a, const MEdge& b_root, int shift) {
  if (a.weight == 0.0) return {m_terminal(), 0.0};
  if (is_terminal(a.node)) return {b_root.node, a.weight};
  // shift rides in the weight slot of the cache key
  const BinKey key{a.node, b_root.node, {shift, 0}};
  if (cfg_.memoize) {
    if (auto it = ct_kron_.find(key); it != ct_kron_.end()) {
      MEdge e = it->second;
      e.weight *= a.weight;
      return e;
    }
  }
  std::array<MEdge, 4> succ;
  for (int k = 0; k < 4; ++k) succ[k] = kron_rec(a.node->succ[k], b_root, shift);
  const MEdge res = make_mnode(a.node->level + shift, succ);
  if (cfg_.memoize) ct_kron_[key] = res;
  return {res.node, res.weight * a.weight};
}

MatrixDD Package::kron(const MatrixDD& a, const MatrixDD& b) {
  if (a.root.weight == 0.0 || b.root.weight == 0.0)
    return {{m_terminal(), 0.0}, a.n + b.n};
  if (b.n == 0) return {{a.root.node, a.root.weight * b.root.weight}, a.n};
  if (a.n == 0) return {{b.root.node, a.root.weight * b.root.weight}, b.n};
  inc_ref(a);
  inc_ref(b);
  maybe_collect();
  MEdge r = kron_rec({a.root.node, 1.0}, {b.root.node, 1.0}, b.n);
  r.weight *= a.root.weight * b.root.weight;
  dec_ref(a);
  dec_ref(b);
  return {r, a.n + b.n};
}

bool Package::all_nodes_normalized() const {
  auto first_is_unit = [](const auto& succ, auto* terminal) {
    bool seen = false;
    for (const auto& e : succ) {
      if (e.weight == 0.0) {
        if (e.node != terminal) return false;
        continue;
      }
      if (!seen) {
        if (e.weight != Complex(1.0)) return false;
        seen = true;
      }
    }
    return seen;
  };
  for (const auto& [key, node] : vtable_)
    if (!first_is_unit(node->succ, v_terminal())) return false;
  for (const auto& [key, node] : mtable_)
    if (!first_is_unit(node->succ, m_terminal())) return false;
  return true;
}

// --- queries ----------------------------------------------------------------

Complex get_amplitude(const VectorDD& v, const BasisState& i) {
  if (i.num_qubits() != v.n) throw Error("basis state length does not match qubit count");
  Complex w = v.root.weight;
  const VNode* node = v.root.node;
  for (int l = v.n - 1; l >= 0; --l) {
    if (w == 0.0) return 0.0;
    const VEdge& e = node->succ[i.bits[l] ? 1 : 0];
    w *= e.weight;
    node = e.node;
  }
  return w;
}

Complex get_entry(const MatrixDD& m, const BasisState& row, const BasisState& col) {
  if (row.num_qubits() != m.n || col.num_qubits() != m.n)
    throw Error("basis state length does not match qubit count");
  Complex w = m.root.weight;
  const MNode* node = m.root.node;
  for (int l = m.n - 1; l >= 0; --l) {
    if (w == 0.0) return 0.0;
    const MEdge& e = node->succ[2 * (row.bits[l] ? 1 : 0) + (col.bits[l] ? 1 : 0)];
    w *= e.weight;
    node = e.node;
  }
  return w;
}

namespace {

void fill_vector(const VEdge& e, int level, Complex acc, std::uint64_t base,
                 std::vector<Complex>& out) {
  if (e.weight == 0.0) return;
  acc *= e.weight;
  if (level < 0) {
    out[base] = acc;
    return;
  }
  fill_vector(e.node->succ[0], level - 1, acc, base, out);
  fill_vector(e.node->succ[1], level - 1, acc, base | (std::uint64_t{1} << level), out);
}

void fill_matrix(const MEdge& e, int level, Complex acc, std::uint64_t row, std::uint64_t col,
                 DenseMatrix& out) {
  if (e.weight == 0.0) return;
  acc *= e.weight;
  if (level < 0) {
    out(row, col) = acc;
    return;
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      fill_matrix(e.node->succ[2 * i + j], level - 1, acc, row | (static_cast<std::uint64_t>(i) << level),
                  col | ((static_cast<std::uint64_t>(j) << level)), out);
}

}  // namespace

std::vector<Complex> extract_statevector(const VectorDD& v, int dense_cap) {
  if (v.n > dense_cap)
    throw Error("statevector extraction of " + std::to_string(v.n) +
                " qubits exceeds the dense cap of " + std::to_string(dense_cap));
  std::vector<Complex> out(std::uint64_t{1} << v.n, 0.0);
  fill_vector(v.root, v.n - 1, 1.0, 0, out);
  return out;
}

DenseMatrix extract_matrix(const MatrixDD& m, int dense_cap) {
  if (m.n > dense_cap)
    throw Error("matrix extraction of " + std::to_string(m.n) +
                " qubits exceeds the dense cap of " + std::to_string(dense_cap));
  DenseMatrix out(std::uint64_t{1} << m.n);
  fill_matrix(m.root, m.n - 1, 1.0, 0, 0, out);
  return out;
}

namespace {

template <class Node>
void count_nodes(const Node* node, std::unordered_set<const Node*>& seen) {
  if (node->level < 0 || seen.contains(node)) return;
  seen.insert(node);
  for (const auto& e : node->succ)
    if (e.weight != 0.0) count_nodes(e.node, seen);
}

}  // namespace

std::size_t node_count(const VectorDD& v) {
  if (v.root.weight == 0.0) return 0;
  std::unordered_set<const VNode*> seen;
  count_nodes(v.root.node, seen);
  return seen.size();
}

std::size_t node_count(const MatrixDD& m) {
  if (m.root.weight == 0.0) return 0;
  std::unordered_set<const MNode*> seen;
  count_nodes(m.root.node, seen);
  return seen.size();
}

bool is_identity(const MatrixDD& m, bool up_to_global_phase, double eps) {
  const Complex w = m.root.weight;
  if (up_to_global_phase) {
    if (std::abs(std::abs(w) - 1.0) > eps) return false;
  } else {
    if (std::abs(w - 1.0) > eps) return false;
  }
  const MNode* node = m.root.node;
  for (int l = m.n - 1; l >= 0; --l) {
    if (is_terminal(node) || node->level != l) return false;
    if (node->succ[1].weight != 0.0 || node->succ[2].weight != 0.0) return false;
    if (node->succ[0].node != node->succ[3].node) return false;
    if (std::abs(node->succ[0].weight - 1.0) > eps) return false;
    if (std::abs(node->succ[3].weight - 1.0) > eps) return false;
    node = node->succ[0].node;
  }
  return is_terminal(node);
}

namespace {

template <class Node>
bool normalized_walk(const Node* node, int level, double eps,
                     std::unordered_set<const Node*>& seen) {
  if (node->level != level) return false;
  if (seen.contains(node)) return true;
  seen.insert(node);
  bool first_seen = false;
  for (const auto& e : node->succ) {
    if (e.weight == 0.0) {
      if (!is_terminal(e.node)) return false;
      continue;
    }
    if (!first_seen) {
      if (e.weight != Complex(1.0)) return false;
      first_seen = true;
    }
    if (level == 0) {
      if (!is_terminal(e.node)) return false;
    } else {
      if (is_terminal(e.node) || !normalized_walk(e.node, level - 1, eps, seen)) return false;
    }
  }
  return first_seen;
}

}  // namespace

bool is_normalized(const VectorDD& v, double eps) {
  if (v.root.weight == 0.0) return is_terminal(v.root.node);
  if (v.n == 0) return is_terminal(v.root.node);
  std::unordered_set<const VNode*> seen;
  return normalized_walk(v.root.node, v.n - 1, eps, seen);
}

bool is_normalized(const MatrixDD& m, double eps) {
  if (m.root.weight == 0.0) return is_terminal(m.root.node);
  if (m.n == 0) return is_terminal(m.root.node);
  std::unordered_set<const MNode*> seen;
  return normalized_walk(m.root.node, m.n - 1, eps, seen);
}

namespace {

template <class Node>
void dot_nodes(const Node* node, std::unordered_set<const Node*>& seen, std::ostream& os) {
  if (node->level < 0 || seen.contains(node)) return;
  seen.insert(node);
  os << "  n" << static_cast<const void*>(node) << " [label=\"q" << node->level << "\"];\n";
  char buf[64];
  for (std::size_t k = 0; k < node->succ.size(); ++k) {
    const auto& e = node->succ[k];
    if (e.weight == 0.0) continue;
    os << "  n" << static_cast<const void*>(node) << " -> ";
    if (is_terminal(e.node))
      os << "terminal";
    else
      os << "n" << static_cast<const void*>(e.node);
    os << " [taillabel=\"" << k << "\", label=\"" << format_weight(buf, sizeof buf, e.weight)
       << "\"];\n";
    dot_nodes(e.node, seen, os);
  }
}

template <class DD, class Node>
void write_dot_impl(const DD& d, std::ostream& os) {
  char buf[64];
  os << "digraph dd {\n  rankdir=TB;\n";
  os << "  root [shape=point];\n  terminal [shape=box, label=\"1\"];\n";
  if (d.root.weight == 0.0) {
    os << "  root -> terminal [label=\"0+0i\"];\n}\n";
    return;
  }
  os << "  root -> ";
  if (is_terminal(d.root.node))
    os << "terminal";
  else
    os << "n" << static_cast<const void*>(d.root.node);
  os << " [label=\"" << format_weight(buf, sizeof buf, d.root.weight) << "\"];\n";
  std::unordered_set<const Node*> seen;
  if (!is_terminal(d.root.node)) dot_nodes(d.root.node, seen, os);
  os << "}\n";
}

}  // namespace

void write_dot(const VectorDD& v, std::ostream& os) { write_dot_impl<VectorDD, VNode>(v, os); }
void write_dot(const MatrixDD& m, std::ostream& os) { write_dot_impl<MatrixDD, MNode>(m, os); }

}  // namespace dualsim::dd
