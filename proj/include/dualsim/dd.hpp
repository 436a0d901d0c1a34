#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "dualsim/circuit.hpp"

namespace dualsim::dd {

struct VNode;
struct MNode;

/// Weighted edge. Zero edges point at the terminal with weight exactly 0;
/// every other edge carries a nonzero weight and descends exactly one level.
template <class Node>
struct Edge {
  Node* node = nullptr;
  Complex weight{0.0, 0.0};

  bool operator==(const Edge&) const = default;
};

using VEdge = Edge<VNode>;
using MEdge = Edge<MNode>;

/// Vector node: succ[b] is the sub-vector where this qubit has value b.
struct VNode {
  std::array<VEdge, 2> succ;
  int level = -1;
  std::uint32_t ref = 0;
};

/// Matrix node: succ in operator-basis order |0><0|, |0><1|, |1><0|, |1><1|.
struct MNode {
  std::array<MEdge, 4> succ;
  int level = -1;
  std::uint32_t ref = 0;
};

VNode* v_terminal();
MNode* m_terminal();

inline bool is_terminal(const VNode* n) { return n == v_terminal(); }
inline bool is_terminal(const MNode* n) { return n == m_terminal(); }

struct VectorDD {
  VEdge root;
  int n = 0;
};

struct MatrixDD {
  MEdge root;
  int n = 0;
};

struct PackageConfig {
  double eps = 1e-10;                  // numeric tolerance; hash grid is eps/2
  std::size_t gc_threshold = 262144;   // live nodes that trigger collection
  bool memoize = true;                 // compute-table lookups on/off
};

/// Quantized cell of a weight component on the eps/2 grid. Hashing, node
/// equality and zero detection all go through this so they agree.
std::int64_t quantize(double x, double eps);

/// Hash-consed decision-diagram store for vectors and matrices. A package is
/// single-writer; independent packages may run concurrently. Diagrams refer
/// to package-owned nodes: hold them across operations via inc_ref/dec_ref or
/// garbage collection may reclaim them.
class Package {
 public:
  explicit Package(PackageConfig cfg = {});
  ~Package();
  Package(const Package&) = delete;
  Package& operator=(const Package&) = delete;

  // --- construction ---------------------------------------------------
  VectorDD basis_state(const BasisState& b);
  VectorDD zero_vector(int n);
  MatrixDD identity(int n);
  /// Full-size 2^n x 2^n diagram of a gate (identity on untouched qubits).
  MatrixDD gate_dd(const Gate& g, int n);
  /// Rebuilds a diagram from dense data (semantic import, small n only).
  VectorDD from_dense(const std::vector<Complex>& amplitudes);
  MatrixDD from_dense(const DenseMatrix& m);

  // --- arithmetic -----------------------------------------------------
  VectorDD multiply(const MatrixDD& u, const VectorDD& v);
  MatrixDD multiply(const MatrixDD& a, const MatrixDD& b);
  VectorDD add(const VectorDD& a, const VectorDD& b);
  MatrixDD add(const MatrixDD& a, const MatrixDD& b);
  /// Kronecker product, a on the higher-significance qubits.
  MatrixDD kron(const MatrixDD& a, const MatrixDD& b);

  // --- reference management --------------------------------------------
  void inc_ref(const VectorDD& v) { inc_ref_edge(v.root); }
  void dec_ref(const VectorDD& v) { dec_ref_edge(v.root); }
  void inc_ref(const MatrixDD& m) { inc_ref_edge(m.root); }
  void dec_ref(const MatrixDD& m) { dec_ref_edge(m.root); }
  /// Frees all unreferenced nodes and drops the compute tables. Runs
  /// automatically at operation entry once live_nodes() passes the threshold.
  void collect_garbage(bool force = false);

  std::size_t live_nodes() const { return live_nodes_; }
  std::size_t gc_runs() const { return gc_runs_; }
  const PackageConfig& config() const { return cfg_; }

  /// Checks the normalization invariant on every live node (debug walk).
  bool all_nodes_normalized() const;

 private:
  friend struct PackageAccess;

  struct QWeight {
    std::int64_t re = 0, im = 0;
    bool operator==(const QWeight&) const = default;
  };
  template <class Node, int Arity>
  struct NodeKey {
    int level;
    std::array<Node*, Arity> child;
    std::array<QWeight, Arity> w;
    bool operator==(const NodeKey&) const = default;
  };
  using VKey = NodeKey<VNode, 2>;
  using MKey = NodeKey<MNode, 4>;
  struct KeyHash {
    template <class K>
    std::size_t operator()(const K& k) const;
  };

  QWeight qweight(const Complex& w) const;
  bool qzero(const Complex& w) const;

  VEdge make_vnode(int level, std::array<VEdge, 2> succ);
  MEdge make_mnode(int level, std::array<MEdge, 4> succ);
  MEdge identity_edge(int top_level);

  VEdge mv_rec(const MEdge& a, const VEdge& b, int level);
  MEdge mm_rec(const MEdge& a, const MEdge& b, int level);
  VEdge add_rec(const VEdge& a, const VEdge& b, int level);
  MEdge add_rec(const MEdge& a, const MEdge& b, int level);
  MEdge kron_rec(const MEdge& a, const MEdge& b_root, int shift);
  VEdge from_dense_rec(const std::vector<Complex>& v, int level, std::uint64_t base);
  MEdge from_dense_rec(const DenseMatrix& m, int level, std::uint64_t row, std::uint64_t col);

  void inc_ref_edge(const VEdge& e);
  void dec_ref_edge(const VEdge& e);
  void inc_ref_edge(const MEdge& e);
  void dec_ref_edge(const MEdge& e);
  void maybe_collect();
  void clear_compute_tables();

  PackageConfig cfg_;
  std::unordered_map<VKey, VNode*, KeyHash> vtable_;
  std::unordered_map<MKey, MNode*, KeyHash> mtable_;
  std::deque<VNode> vpool_;
  std::deque<MNode> mpool_;
  std::vector<VNode*> vfree_;
  std::vector<MNode*> mfree_;
  std::size_t live_nodes_ = 0;
  std::size_t gc_runs_ = 0;

  struct BinKey {
    const void* a;
    const void* b;
    QWeight w;
    bool operator==(const BinKey&) const = default;
  };
  struct BinKeyHash {
    std::size_t operator()(const BinKey& k) const;
  };
  std::unordered_map<BinKey, VEdge, BinKeyHash> ct_mv_;
  std::unordered_map<BinKey, MEdge, BinKeyHash> ct_mm_;
  std::unordered_map<BinKey, VEdge, BinKeyHash> ct_vadd_;
  std::unordered_map<BinKey, MEdge, BinKeyHash> ct_madd_;
  std::unordered_map<BinKey, MEdge, BinKeyHash> ct_kron_;
};

// --- queries (read-only, package untouched) -----------------------------

/// Product of the edge weights along the path selected by the basis bits.
Complex get_amplitude(const VectorDD& v, const BasisState& i);
/// Matrix entry <row|M|col> via the same single-path walk.
Complex get_entry(const MatrixDD& m, const BasisState& row, const BasisState& col);

/// Dense amplitude vector of length 2^n; refuses when n exceeds dense_cap.
std::vector<Complex> extract_statevector(const VectorDD& v, int dense_cap = 20);
/// Dense 2^n x 2^n matrix, same cap rule (test/debug sizes only).
DenseMatrix extract_matrix(const MatrixDD& m, int dense_cap = 13);

/// Distinct reachable nonterminal nodes.
std::size_t node_count(const VectorDD& v);
std::size_t node_count(const MatrixDD& m);

/// True iff m is the identity; with up_to_global_phase, identity times any
/// unit-modulus scalar also passes.
bool is_identity(const MatrixDD& m, bool up_to_global_phase = false, double eps = 1e-10);

/// Normalization-invariant walk over one diagram.
bool is_normalized(const VectorDD& v, double eps = 1e-10);
bool is_normalized(const MatrixDD& m, double eps = 1e-10);

/// Graphviz dot rendering; edge labels carry weights as "a+bi" (6 significant
/// digits), zero edges are omitted.
void write_dot(const VectorDD& v, std::ostream& os);
void write_dot(const MatrixDD& m, std::ostream& os);

}  // namespace dualsim::dd
