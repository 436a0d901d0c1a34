#include "dualsim/path.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include <nlohmann/json.hpp>

namespace dualsim::path {

using nlohmann::json;

SimulationPath default_sequential_path(const Circuit& c) {
  const int m = static_cast<int>(c.gates.size());
  SimulationPath p;
  p.num_leaves = m + 1;
  int acc = 0;
  for (int j = 0; j < m; ++j) {
    p.steps.push_back({acc, j + 1, StepKind::vector_combine});
    acc = p.num_leaves + j;
  }
  return p;
}

SimulationPath alternating_path(const Circuit& g, const Circuit& g2inv, int ratio) {
  if (g.num_qubits != g2inv.num_qubits)
    throw Error("qubit count mismatch between the two circuits");
  if (ratio < 1) throw Error("alternation ratio must be at least 1");
  const int m = static_cast<int>(g.gates.size());
  const int k = static_cast<int>(g2inv.gates.size());

  SimulationPath p;
  p.matrix_graph = true;
  p.num_leaves = m + k;

  int acc = -1;
  int next_id = p.num_leaves;
  auto absorb = [&](int leaf, bool from_left) {
    if (acc < 0) {
      acc = leaf;
      return;
    }
    if (from_left)
      p.steps.push_back({acc, leaf, StepKind::operator_combine});
    else
      p.steps.push_back({leaf, acc, StepKind::operator_combine});
    acc = next_id++;
  };

  int lo = m - 1;  // g is consumed tail-first (right side of the accumulator)
  int hi = m;      // g2inv head-first (left side)
  while (lo >= 0 || hi < m + k) {
    if (lo >= 0) absorb(lo--, false);
    for (int r = 0; r < ratio && hi < m + k; ++r) absorb(hi++, true);
  }
  return p;
}

SimulationPath plan_to_path(const tn::ContractionPlan& plan, const Circuit& c) {
  const int n = c.num_qubits;
  const int m = static_cast<int>(c.gates.size());
  if (plan.num_leaves() != n + m)
    throw Error("plan leaves do not match the circuit's statevector network");

  const int num_leaves = m + 1;
  SimulationPath p;
  p.num_leaves = num_leaves;

  // Task fragments are contiguous leaf ranges, merged via union-find.
  std::vector<int> parent(num_leaves);
  std::iota(parent.begin(), parent.end(), 0);
  struct Frag {
    int id;
    int lo, hi;
  };
  std::vector<Frag> info(num_leaves);
  for (int i = 0; i < num_leaves; ++i) info[i] = {i, i, i};
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  int next_id = num_leaves;
  auto emit = [&](int ra, int rb) {
    const StepKind kind =
        info[ra].lo == 0 ? StepKind::vector_combine : StepKind::operator_combine;
    p.steps.push_back({info[ra].id, info[rb].id, kind});
    parent[rb] = ra;
    info[ra].hi = info[rb].hi;
    info[ra].id = next_id++;
  };

  // Goal = the task-leaf set under one plan node; fuse the goal's fragments
  // (smallest left endpoint first) and defer goals blocked by gaps.
  auto process = [&](const std::vector<int>& goal) {
    while (true) {
      std::vector<int> roots;
      for (int leaf : goal) {
        const int r = find(leaf);
        if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
      }
      if (roots.size() <= 1) return true;
      std::sort(roots.begin(), roots.end(),
                [&](int a, int b) { return info[a].lo < info[b].lo; });
      bool merged = false;
      for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
        if (info[roots[i]].hi + 1 == info[roots[i + 1]].lo) {
          emit(roots[i], roots[i + 1]);
          merged = true;
          break;
        }
      }
      if (!merged) return false;
    }
  };

  std::vector<std::vector<int>> goals;
  auto walk = [&](auto&& self, int idx) -> std::vector<int> {
    const auto& node = plan.nodes.at(idx);
    if (node.leaf >= 0) {
      const int task_leaf = node.leaf < n ? 0 : node.leaf - n + 1;
      return {task_leaf};
    }
    std::vector<int> a = self(self, node.left);
    const std::vector<int> b = self(self, node.right);
    std::vector<int> goal;
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(goal));
    goal.erase(std::unique(goal.begin(), goal.end()), goal.end());
    goals.push_back(goal);
    return goal;
  };
  if (plan.root < 0) throw Error("contraction plan has no root");
  walk(walk, plan.root);

  std::deque<std::vector<int>> deferred;
  for (const auto& goal : goals) {
    if (!process(goal)) deferred.push_back(goal);
    bool progress = true;
    while (progress) {
      progress = false;
      for (auto it = deferred.begin(); it != deferred.end();) {
        if (process(*it)) {
          it = deferred.erase(it);
          progress = true;
        } else {
          ++it;
        }
      }
    }
  }
  if (!deferred.empty() || static_cast<int>(p.steps.size()) != num_leaves - 1)
    throw Error("plan translation did not reduce the task graph to one fragment");
  return p;
}

namespace {

struct Fragment {
  bool alive = false;
  bool is_state = false;
  dd::VectorDD v;
  dd::MatrixDD mat;
  int lo = 0, hi = 0;
};

}  // namespace

PathResult execute_path(const Circuit& c, const BasisState& input, const SimulationPath& p,
                        dd::Package& pkg) {
  const int n = c.num_qubits;
  const int m = static_cast<int>(c.gates.size());
  const int expected_leaves = p.matrix_graph ? m : m + 1;
  if (p.num_leaves != expected_leaves) throw Error("path does not match the circuit");
  if (static_cast<int>(p.steps.size()) != std::max(0, expected_leaves - 1))
    throw Error("path must have exactly one step fewer than leaves");

  PathResult result;
  result.is_matrix = p.matrix_graph;

  if (p.matrix_graph && m == 0) {
    result.matrix = pkg.identity(n);
    pkg.inc_ref(result.matrix);
    result.metrics.final_nodes = dd::node_count(result.matrix);
    result.metrics.peak_nodes = result.metrics.final_nodes;
    return result;
  }

  std::vector<Fragment> frags(p.num_leaves + p.steps.size());
  for (int i = 0; i < p.num_leaves; ++i) {
    Fragment& f = frags[i];
    f.alive = true;
    f.lo = f.hi = i;
    if (!p.matrix_graph && i == 0) {
      f.is_state = true;
      f.v = pkg.basis_state(input);
      pkg.inc_ref(f.v);
    } else {
      const Gate& gate = c.gates[p.matrix_graph ? i : i - 1];
      f.mat = pkg.gate_dd(gate, n);
      pkg.inc_ref(f.mat);
    }
  }

  for (std::size_t s = 0; s < p.steps.size(); ++s) {
    const Step& step = p.steps[s];
    auto valid = [&](int id) {
      return id >= 0 && id < static_cast<int>(frags.size()) && frags[id].alive;
    };
    if (!valid(step.lhs) || !valid(step.rhs)) throw Error("path step uses an unknown fragment");
    Fragment& a = frags[step.lhs];
    Fragment& b = frags[step.rhs];
    Fragment& lower = a.lo < b.lo ? a : b;
    Fragment& upper = a.lo < b.lo ? b : a;
    if (lower.hi + 1 != upper.lo)
      throw Error("path step combines non-adjacent fragments");
    const StepKind kind =
        lower.is_state ? StepKind::vector_combine : StepKind::operator_combine;
    if (kind != step.kind) throw Error("path step kind does not match the task graph");

    Fragment merged;
    merged.alive = true;
    merged.lo = lower.lo;
    merged.hi = upper.hi;
    std::size_t nodes;
    if (kind == StepKind::vector_combine) {
      merged.is_state = true;
      merged.v = pkg.multiply(upper.mat, lower.v);
      pkg.inc_ref(merged.v);
      nodes = dd::node_count(merged.v);
    } else {
      merged.mat = pkg.multiply(upper.mat, lower.mat);
      pkg.inc_ref(merged.mat);
      nodes = dd::node_count(merged.mat);
    }
    if (lower.is_state)
      pkg.dec_ref(lower.v);
    else
      pkg.dec_ref(lower.mat);
    pkg.dec_ref(upper.mat);
    lower.alive = upper.alive = false;
    frags[p.num_leaves + s] = merged;

    result.metrics.nodes_after_step.push_back(nodes);
    result.metrics.peak_nodes = std::max(result.metrics.peak_nodes, nodes);
  }

  if (p.steps.empty()) {
    // single-leaf graph: the basis state itself
    Fragment& only = frags[0];
    result.state = only.v;
    result.metrics.final_nodes = dd::node_count(only.v);
    result.metrics.peak_nodes = std::max(result.metrics.peak_nodes, result.metrics.final_nodes);
    return result;
  }
  Fragment& last = frags.back();
  if (!last.alive || last.lo != 0 || last.hi != p.num_leaves - 1)
    throw Error("path did not reduce the task graph to one fragment");
  if (last.is_state) {
    result.state = last.v;
    result.metrics.final_nodes = dd::node_count(last.v);
  } else {
    result.matrix = last.mat;
    result.metrics.final_nodes = dd::node_count(last.mat);
  }
  return result;
}

namespace {

EquivalenceVerdict greedy_alternate(const Circuit& g, const Circuit& g2inv,
                                    const BasisState& input, const EquivalenceOptions& opts) {
  dd::Package pkg(opts.package);
  const int n = g.num_qubits;
  dd::MatrixDD acc = pkg.identity(n);
  pkg.inc_ref(acc);

  EquivalenceVerdict v;
  int lo = static_cast<int>(g.gates.size()) - 1;
  int hi = 0;
  auto commit = [&](const dd::MatrixDD& next) {
    pkg.inc_ref(next);
    pkg.dec_ref(acc);
    acc = next;
    const std::size_t nodes = dd::node_count(acc);
    v.metrics.nodes_after_step.push_back(nodes);
    v.metrics.peak_nodes = std::max(v.metrics.peak_nodes, nodes);
  };

  while (lo >= 0 || hi < static_cast<int>(g2inv.gates.size())) {
    const bool can_right = lo >= 0;
    const bool can_left = hi < static_cast<int>(g2inv.gates.size());
    if (can_right && can_left) {
      const dd::MatrixDD right = pkg.multiply(acc, pkg.gate_dd(g.gates[lo], n));
      pkg.inc_ref(right);
      const dd::MatrixDD left = pkg.multiply(pkg.gate_dd(g2inv.gates[hi], n), acc);
      pkg.dec_ref(right);
      // ties go to the g side
      if (dd::node_count(right) <= dd::node_count(left)) {
        --lo;
        commit(right);
      } else {
        ++hi;
        commit(left);
      }
    } else if (can_right) {
      --lo;
      commit(pkg.multiply(acc, pkg.gate_dd(g.gates[lo + 1], n)));
    } else {
      ++hi;
      commit(pkg.multiply(pkg.gate_dd(g2inv.gates[hi - 1], n), acc));
    }
  }
  v.metrics.final_nodes = dd::node_count(acc);
  v.metrics.peak_nodes = std::max(v.metrics.peak_nodes, v.metrics.final_nodes);
  v.fidelity = std::norm(dd::get_entry(acc, input, input));
  v.equivalent = std::abs(1.0 - v.fidelity) <= opts.eps_eq;
  return v;
}

}  // namespace

EquivalenceVerdict check_equivalence(const Circuit& g, const Circuit& g2, const BasisState& input,
                                     const EquivalenceOptions& opts) {
  if (g.num_qubits != g2.num_qubits)
    throw Error("qubit count mismatch between the two circuits");
  if (input.num_qubits() != g.num_qubits)
    throw Error("input basis state length does not match the circuits");

  const Circuit g2inv = invert_circuit(g2);

  if (opts.strategy == Strategy::greedy_alt) return greedy_alternate(g, g2inv, input, opts);

  dd::Package pkg(opts.package);
  const Circuit miter = concatenate(g, g2inv);
  EquivalenceVerdict v;

  if (opts.strategy == Strategy::alternating) {
    const SimulationPath p = alternating_path(g, g2inv, opts.ratio);
    const PathResult res = execute_path(miter, input, p, pkg);
    v.metrics = res.metrics;
    v.fidelity = std::norm(dd::get_entry(res.matrix, input, input));
  } else {
    SimulationPath p;
    if (opts.strategy == Strategy::sequential) {
      p = default_sequential_path(miter);
    } else {
      const tn::TensorNetwork net = tn::circuit_to_network(miter, input);
      p = plan_to_path(tn::plan_greedy(net), miter);
    }
    const PathResult res = execute_path(miter, input, p, pkg);
    v.metrics = res.metrics;
    v.fidelity = std::norm(dd::get_amplitude(res.state, input));
  }
  v.equivalent = std::abs(1.0 - v.fidelity) <= opts.eps_eq;
  return v;
}

json to_json(const SimulationPath& p) {
  json steps = json::array();
  for (const auto& s : p.steps)
    steps.push_back({{"lhs", s.lhs},
                     {"rhs", s.rhs},
                     {"kind", s.kind == StepKind::vector_combine ? "mv" : "mm"}});
  return {{"leaves", p.num_leaves}, {"matrix", p.matrix_graph}, {"steps", steps}};
}

SimulationPath path_from_json(const json& j) {
  SimulationPath p;
  p.num_leaves = j.at("leaves").get<int>();
  p.matrix_graph = j.at("matrix").get<bool>();
  for (const auto& sj : j.at("steps")) {
    const std::string kind = sj.at("kind").get<std::string>();
    if (kind != "mv" && kind != "mm") throw Error("unknown path step kind '" + kind + "'");
    p.steps.push_back({sj.at("lhs").get<int>(), sj.at("rhs").get<int>(),
                       kind == "mv" ? StepKind::vector_combine : StepKind::operator_combine});
  }
  return p;
}

}  // namespace dualsim::path
