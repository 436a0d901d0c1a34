#include "dualsim/tn.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

namespace dualsim::tn {

using nlohmann::json;

Tensor::Tensor(std::vector<Index> idx, std::vector<Complex> values)
    : indices(std::move(idx)), data(std::move(values)) {
  std::int64_t sz = 1;
  for (const auto& i : indices) {
    if (i.dim <= 0) throw Error("index '" + i.label + "' has non-positive dimension");
    sz *= i.dim;
  }
  if (sz != static_cast<std::int64_t>(data.size()))
    throw Error("tensor data length does not match its shape");
  for (std::size_t i = 0; i < indices.size(); ++i)
    for (std::size_t j = i + 1; j < indices.size(); ++j)
      if (indices[i].label == indices[j].label)
        throw Error("duplicate index label '" + indices[i].label + "' within one tensor");
}

std::int64_t Tensor::size() const {
  std::int64_t sz = 1;
  for (const auto& i : indices) sz *= i.dim;
  return sz;
}

Complex Tensor::scalar() const {
  if (rank() != 0) throw Error("tensor is not rank-0");
  return data[0];
}

int Tensor::position_of(const std::string& label) const {
  for (int i = 0; i < rank(); ++i)
    if (indices[i].label == label) return i;
  return -1;
}

Tensor Tensor::transposed(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != rank()) throw Error("bad permutation size");
  std::vector<std::int64_t> src_stride(rank());
  std::int64_t s = 1;
  for (int i = rank() - 1; i >= 0; --i) {
    src_stride[i] = s;
    s *= indices[i].dim;
  }
  Tensor out;
  out.indices.reserve(rank());
  std::vector<std::int64_t> axis_stride(rank());
  for (int i = 0; i < rank(); ++i) {
    out.indices.push_back(indices[perm[i]]);
    axis_stride[i] = src_stride[perm[i]];
  }
  out.data.resize(data.size());
  std::vector<std::int64_t> pos(rank(), 0);
  std::int64_t src = 0;
  for (std::size_t o = 0; o < data.size(); ++o) {
    out.data[o] = data[src];
    for (int ax = rank() - 1; ax >= 0; --ax) {
      src += axis_stride[ax];
      if (++pos[ax] < out.indices[ax].dim) break;
      src -= axis_stride[ax] * out.indices[ax].dim;
      pos[ax] = 0;
    }
  }
  return out;
}

Tensor Tensor::fixed(const std::string& label, std::int64_t value) const {
  const int p = position_of(label);
  if (p < 0) throw Error("tensor has no index '" + label + "'");
  if (value < 0 || value >= indices[p].dim)
    throw Error("slice value out of range for index '" + label + "'");
  std::int64_t inner = 1;
  for (int i = p + 1; i < rank(); ++i) inner *= indices[i].dim;
  std::int64_t outer = 1;
  for (int i = 0; i < p; ++i) outer *= indices[i].dim;

  Tensor out;
  out.indices = indices;
  out.indices.erase(out.indices.begin() + p);
  out.data.resize(outer * inner);
  const std::int64_t dim_p = indices[p].dim;
  for (std::int64_t o = 0; o < outer; ++o)
    std::copy_n(data.begin() + (o * dim_p + value) * inner, inner,
                out.data.begin() + o * inner);
  return out;
}

void TensorNetwork::validate() const {
  std::map<std::string, std::pair<int, std::int64_t>> seen;  // label -> (count, dim)
  for (const auto& t : tensors) {
    std::int64_t sz = 1;
    for (const auto& i : t.indices) sz *= i.dim;
    if (sz != static_cast<std::int64_t>(t.data.size()))
      throw Error("tensor data length does not match its shape");
    for (const auto& i : t.indices) {
      auto [it, inserted] = seen.try_emplace(i.label, 0, i.dim);
      if (!inserted && it->second.second != i.dim)
        throw Error("index '" + i.label + "' has conflicting dimensions");
      if (++it->second.first > 2)
        throw Error("index '" + i.label + "' is shared by more than two tensors");
    }
  }
  std::size_t num_open = 0;
  for (const auto& [label, cd] : seen)
    if (cd.first == 1) ++num_open;
  if (num_open != open.size())
    throw Error("declared open indices do not match the once-appearing indices");
  for (const auto& i : open) {
    auto it = seen.find(i.label);
    if (it == seen.end() || it->second.first != 1)
      throw Error("open index '" + i.label + "' does not appear exactly once");
  }
}

Tensor contract_pair(const Tensor& a, const Tensor& b, std::uint64_t* madds) {
  std::vector<int> a_free, a_shared, b_shared, b_free;
  for (int i = 0; i < a.rank(); ++i) {
    const int p = b.position_of(a.indices[i].label);
    if (p >= 0) {
      if (a.indices[i].dim != b.indices[p].dim)
        throw Error("dimension mismatch on shared index '" + a.indices[i].label + "'");
      a_shared.push_back(i);
      b_shared.push_back(p);
    } else {
      a_free.push_back(i);
    }
  }
  for (int j = 0; j < b.rank(); ++j)
    if (a.position_of(b.indices[j].label) < 0) b_free.push_back(j);

  std::vector<int> pa = a_free;
  pa.insert(pa.end(), a_shared.begin(), a_shared.end());
  std::vector<int> pb = b_shared;
  pb.insert(pb.end(), b_free.begin(), b_free.end());
  const Tensor ta = a.transposed(pa);
  const Tensor tb = b.transposed(pb);

  std::int64_t rows = 1, mid = 1, cols = 1;
  for (int i : a_free) rows *= a.indices[i].dim;
  for (int i : a_shared) mid *= a.indices[i].dim;
  for (int j : b_free) cols *= b.indices[j].dim;

  Tensor out;
  out.indices.reserve(a_free.size() + b_free.size());
  for (int i : a_free) out.indices.push_back(a.indices[i]);
  for (int j : b_free) out.indices.push_back(b.indices[j]);
  out.data.assign(rows * cols, 0.0);

  std::uint64_t count = 0;
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t k = 0; k < mid; ++k) {
      const Complex arc = ta.data[r * mid + k];
      for (std::int64_t c = 0; c < cols; ++c) {
        out.data[r * cols + c] += arc * tb.data[k * cols + c];
        ++count;
      }
    }
  if (madds != nullptr) *madds += count;
  return out;
}

TensorNetwork circuit_to_network(const Circuit& c, const BasisState& input,
                                 const std::optional<BasisState>& output) {
  const int n = c.num_qubits;
  if (input.num_qubits() != n) throw Error("input basis state length does not match circuit");
  if (output && output->num_qubits() != n)
    throw Error("output basis state length does not match circuit");

  std::vector<int> version(n, 0);
  auto wire = [&](int q) {
    return Index{"q" + std::to_string(q) + "." + std::to_string(version[q]), 2};
  };
  auto basis_tensor = [&](int q, bool one) {
    return Tensor({wire(q)}, one ? std::vector<Complex>{0.0, 1.0}
                                 : std::vector<Complex>{1.0, 0.0});
  };

  TensorNetwork net;
  for (int q = 0; q < n; ++q) net.tensors.push_back(basis_tensor(q, input.bits[q]));

  for (const Gate& g : c.gates) {
    const int k = g.arity();
    if (k > 13)
      throw Error("gate touches " + std::to_string(k) +
                  " qubits; its dense tensor is too large for the tensor backend");
    DenseMatrix u = gate_matrix(g);
    const auto qubits = g.qubits();
    std::vector<Index> in_wires, out_wires;
    for (int q : qubits) in_wires.push_back(wire(q));
    for (int q : qubits) {
      ++version[q];
      out_wires.push_back(wire(q));
    }
    std::vector<Index> idx = std::move(out_wires);
    idx.insert(idx.end(), in_wires.begin(), in_wires.end());
    net.tensors.emplace_back(std::move(idx), std::move(u.a));
  }

  if (output) {
    for (int q = 0; q < n; ++q) net.tensors.push_back(basis_tensor(q, output->bits[q]));
  } else {
    for (int q = n - 1; q >= 0; --q) net.open.push_back(wire(q));
  }
  net.validate();
  return net;
}

int ContractionPlan::num_leaves() const {
  int count = 0;
  for (const auto& node : nodes)
    if (node.leaf >= 0) ++count;
  return count;
}

ContractionPlan ContractionPlan::leaf_pair(int a, int b) {
  ContractionPlan p;
  p.nodes.push_back({a, -1, -1});
  p.nodes.push_back({b, -1, -1});
  p.nodes.push_back({-1, 0, 1});
  p.root = 2;
  return p;
}

ContractionPlan ContractionPlan::sequential(int num_tensors) {
  ContractionPlan p;
  for (int i = 0; i < num_tensors; ++i) p.nodes.push_back({i, -1, -1});
  int acc = 0;
  for (int i = 1; i < num_tensors; ++i) {
    p.nodes.push_back({-1, acc, i});
    acc = static_cast<int>(p.nodes.size()) - 1;
  }
  p.root = num_tensors == 0 ? -1 : acc;
  return p;
}

namespace {

void check_plan(const TensorNetwork& net, const ContractionPlan& plan) {
  const int m = static_cast<int>(net.tensors.size());
  if (plan.root < 0 || plan.root >= static_cast<int>(plan.nodes.size()))
    throw Error("contraction plan has no valid root");
  std::vector<char> leaf_seen(m, 0);
  std::vector<char> visited(plan.nodes.size(), 0);
  int leaves = 0;
  auto walk = [&](auto&& self, int idx) -> void {
    if (idx < 0 || idx >= static_cast<int>(plan.nodes.size()))
      throw Error("contraction plan references an invalid node");
    if (visited[idx]++) throw Error("contraction plan node used more than once");
    const auto& node = plan.nodes[idx];
    if (node.leaf >= 0) {
      if (node.leaf >= m) throw Error("contraction plan leaf out of range");
      if (leaf_seen[node.leaf]++) throw Error("contraction plan repeats a tensor");
      ++leaves;
      return;
    }
    self(self, node.left);
    self(self, node.right);
  };
  walk(walk, plan.root);
  if (leaves != m) throw Error("contraction plan does not cover every tensor");
}

// Sorted-by-label index sets for the shape-only cost walk.
using IndexSet = std::vector<Index>;

IndexSet sorted_indices(const Tensor& t) {
  IndexSet s = t.indices;
  std::sort(s.begin(), s.end(), [](const Index& a, const Index& b) { return a.label < b.label; });
  return s;
}

std::uint64_t dims_product(const IndexSet& s) {
  std::uint64_t p = 1;
  for (const auto& i : s) p *= static_cast<std::uint64_t>(i.dim);
  return p;
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet u;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u),
                 [](const Index& x, const Index& y) { return x.label < y.label; });
  return u;
}

IndexSet sym_difference(const IndexSet& a, const IndexSet& b) {
  IndexSet d;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(d),
                                [](const Index& x, const Index& y) { return x.label < y.label; });
  return d;
}

}  // namespace

Tensor contract(const TensorNetwork& net, const ContractionPlan& plan, std::uint64_t* madds) {
  net.validate();
  check_plan(net, plan);
  auto eval = [&](auto&& self, int idx) -> Tensor {
    const auto& node = plan.nodes[idx];
    if (node.leaf >= 0) return net.tensors[node.leaf];
    return contract_pair(self(self, node.left), self(self, node.right), madds);
  };
  Tensor t = eval(eval, plan.root);
  if (t.rank() > 0) {
    std::vector<int> perm;
    perm.reserve(net.open.size());
    for (const auto& i : net.open) {
      const int p = t.position_of(i.label);
      if (p < 0) throw Error("contraction lost open index '" + i.label + "'");
      perm.push_back(p);
    }
    bool id = true;
    for (std::size_t i = 0; i < perm.size(); ++i) id = id && perm[i] == static_cast<int>(i);
    if (!id) t = t.transposed(perm);
  }
  return t;
}

PlanCost plan_cost(const TensorNetwork& net, const ContractionPlan& plan) {
  net.validate();
  check_plan(net, plan);
  PlanCost cost;
  auto walk = [&](auto&& self, int idx) -> IndexSet {
    const auto& node = plan.nodes[idx];
    if (node.leaf >= 0) return sorted_indices(net.tensors[node.leaf]);
    const IndexSet a = self(self, node.left);
    const IndexSet b = self(self, node.right);
    cost.flops += dims_product(set_union(a, b));
    IndexSet result = sym_difference(a, b);
    cost.max_intermediate = std::max(cost.max_intermediate, dims_product(result));
    cost.max_rank = std::max(cost.max_rank, static_cast<int>(result.size()));
    return result;
  };
  walk(walk, plan.root);
  return cost;
}

ContractionPlan plan_greedy(const TensorNetwork& net) {
  net.validate();
  const int m = static_cast<int>(net.tensors.size());
  if (m == 0) throw Error("cannot plan an empty network");

  ContractionPlan plan;
  struct Fragment {
    int plan_node;
    int min_leaf;
    IndexSet idx;
  };
  std::vector<Fragment> frags;
  for (int i = 0; i < m; ++i) {
    plan.nodes.push_back({i, -1, -1});
    frags.push_back({i, i, sorted_indices(net.tensors[i])});
  }

  while (frags.size() > 1) {
    struct Candidate {
      std::int64_t score;
      int rank;
      int id_a, id_b;
      std::size_t pos_a, pos_b;
      IndexSet result;
    };
    std::optional<Candidate> best;
    for (std::size_t i = 0; i < frags.size(); ++i)
      for (std::size_t j = i + 1; j < frags.size(); ++j) {
        IndexSet result = sym_difference(frags[i].idx, frags[j].idx);
        const std::int64_t score =
            static_cast<std::int64_t>(dims_product(result)) -
            static_cast<std::int64_t>(dims_product(frags[i].idx) + dims_product(frags[j].idx));
        Candidate cand{score,
                       static_cast<int>(result.size()),
                       std::min(frags[i].min_leaf, frags[j].min_leaf),
                       std::max(frags[i].min_leaf, frags[j].min_leaf),
                       i,
                       j,
                       std::move(result)};
        const auto key = [](const Candidate& c) {
          return std::tuple(c.score, c.rank, c.id_a, c.id_b);
        };
        if (!best || key(cand) < key(*best)) best = std::move(cand);
      }
    plan.nodes.push_back({-1, frags[best->pos_a].plan_node, frags[best->pos_b].plan_node});
    Fragment merged{static_cast<int>(plan.nodes.size()) - 1, best->id_a, std::move(best->result)};
    frags[best->pos_a] = std::move(merged);
    frags.erase(frags.begin() + static_cast<std::ptrdiff_t>(best->pos_b));
  }
  plan.root = frags.front().plan_node;
  return plan;
}

ContractionPlan plan_exhaustive(const TensorNetwork& net, int max_tensors) {
  net.validate();
  const int m = static_cast<int>(net.tensors.size());
  if (m == 0) throw Error("cannot plan an empty network");
  if (m > max_tensors)
    throw Error("network has " + std::to_string(m) + " tensors; exhaustive search is capped at " +
                std::to_string(max_tensors));

  // Index universe as bit positions; an index lives in at most two tensors,
  // so the surviving indices of a subset are the xor of its tensor masks.
  std::map<std::string, int> index_pos;
  std::vector<std::int64_t> index_dim;
  std::vector<std::uint64_t> tensor_mask(m, 0);
  for (int i = 0; i < m; ++i)
    for (const auto& idx : net.tensors[i].indices) {
      auto [it, inserted] = index_pos.try_emplace(idx.label, static_cast<int>(index_dim.size()));
      if (inserted) index_dim.push_back(idx.dim);
      if (it->second >= 64) throw Error("too many distinct indices for exhaustive search");
      tensor_mask[i] |= std::uint64_t{1} << it->second;
    }
  if (index_dim.size() > 64) throw Error("too many distinct indices for exhaustive search");

  auto mask_product = [&](std::uint64_t mask) {
    std::uint64_t p = 1;
    while (mask != 0) {
      const int bit = std::countr_zero(mask);
      p *= static_cast<std::uint64_t>(index_dim[bit]);
      mask &= mask - 1;
    }
    return p;
  };

  const std::uint32_t full = (m == 32) ? 0xffffffffu : ((1u << m) - 1);
  constexpr std::uint64_t kInf = ~std::uint64_t{0};
  std::vector<std::uint64_t> best_flops(full + 1, kInf);
  std::vector<std::uint64_t> best_inter(full + 1, 0);
  std::vector<std::uint32_t> best_split(full + 1, 0);
  std::vector<std::uint64_t> surviving(full + 1, 0);

  for (int i = 0; i < m; ++i) {
    best_flops[1u << i] = 0;
    surviving[1u << i] = tensor_mask[i];
  }
  for (std::uint32_t s = 1; s <= full; ++s) {
    if (std::popcount(s) < 2) continue;
    std::uint64_t surv = 0;
    for (int i = 0; i < m; ++i)
      if (s & (1u << i)) surv ^= tensor_mask[i];
    surviving[s] = surv;
    const std::uint64_t result_size = mask_product(surv);
    const std::uint32_t low = s & (~s + 1);
    for (std::uint32_t sub = (s - 1) & s; sub != 0; sub = (sub - 1) & s) {
      if ((sub & low) == 0) continue;  // each split visited once
      const std::uint32_t rest = s ^ sub;
      if (best_flops[sub] == kInf || best_flops[rest] == kInf) continue;
      const std::uint64_t step = mask_product(surviving[sub] | surviving[rest]);
      const std::uint64_t flops = best_flops[sub] + best_flops[rest] + step;
      const std::uint64_t inter =
          std::max({best_inter[sub], best_inter[rest], result_size});
      if (flops < best_flops[s] || (flops == best_flops[s] && inter < best_inter[s])) {
        best_flops[s] = flops;
        best_inter[s] = inter;
        best_split[s] = sub;
      }
    }
  }

  ContractionPlan plan;
  for (int i = 0; i < m; ++i) plan.nodes.push_back({i, -1, -1});
  auto build = [&](auto&& self, std::uint32_t s) -> int {
    if (std::popcount(s) == 1) return std::countr_zero(s);
    const int left = self(self, best_split[s]);
    const int right = self(self, s ^ best_split[s]);
    plan.nodes.push_back({-1, left, right});
    return static_cast<int>(plan.nodes.size()) - 1;
  };
  plan.root = build(build, full);
  return plan;
}

std::vector<std::string> sliceable_labels(const TensorNetwork& net) {
  std::map<std::string, int> count;
  for (const auto& t : net.tensors)
    for (const auto& i : t.indices) ++count[i.label];
  std::vector<std::string> labels;
  for (const auto& [label, c] : count)
    if (c == 2) labels.push_back(label);
  return labels;
}

std::vector<SliceAssignment> slice(const TensorNetwork& net,
                                   const std::vector<std::string>& labels) {
  net.validate();
  if (labels.empty()) return {SliceAssignment{{}, net}};

  std::map<std::string, std::pair<int, std::int64_t>> seen;
  for (const auto& t : net.tensors)
    for (const auto& i : t.indices) {
      auto [it, ok] = seen.try_emplace(i.label, 0, i.dim);
      ++it->second.first;
      (void)ok;
    }
  std::vector<std::int64_t> dims;
  for (const auto& label : labels) {
    auto it = seen.find(label);
    if (it == seen.end()) throw Error("cannot slice unknown index '" + label + "'");
    if (it->second.first != 2)
      throw Error("cannot slice index '" + label + "': it is not a closed index");
    if (std::count(labels.begin(), labels.end(), label) != 1)
      throw Error("duplicate slice label '" + label + "'");
    dims.push_back(it->second.second);
  }

  std::int64_t total = 1;
  for (std::int64_t d : dims) total *= d;

  std::vector<SliceAssignment> out;
  out.reserve(total);
  for (std::int64_t a = 0; a < total; ++a) {
    SliceAssignment sa;
    std::int64_t rem = a;
    std::vector<std::int64_t> values(labels.size());
    for (int i = static_cast<int>(labels.size()) - 1; i >= 0; --i) {
      values[i] = rem % dims[i];
      rem /= dims[i];
    }
    for (std::size_t i = 0; i < labels.size(); ++i) sa.values.emplace_back(labels[i], values[i]);
    sa.net.open = net.open;
    for (const auto& t : net.tensors) {
      Tensor cur = t;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (cur.position_of(labels[i]) >= 0) cur = cur.fixed(labels[i], values[i]);
      sa.net.tensors.push_back(std::move(cur));
    }
    out.push_back(std::move(sa));
  }
  return out;
}

json to_json(const TensorNetwork& net) {
  json tensors = json::array();
  for (std::size_t i = 0; i < net.tensors.size(); ++i) {
    const auto& t = net.tensors[i];
    json indices = json::array();
    for (const auto& idx : t.indices) indices.push_back({{"label", idx.label}, {"dim", idx.dim}});
    json data = json::array();
    for (const auto& v : t.data) data.push_back({v.real(), v.imag()});
    tensors.push_back({{"id", i}, {"indices", indices}, {"data", data}});
  }
  json open = json::array();
  for (const auto& idx : net.open) open.push_back(idx.label);
  return {{"tensors", tensors}, {"open", open}};
}

TensorNetwork network_from_json(const json& j) {
  TensorNetwork net;
  std::map<std::string, std::int64_t> dims;
  net.tensors.resize(j.at("tensors").size());
  for (const auto& tj : j.at("tensors")) {
    std::vector<Index> indices;
    for (const auto& ij : tj.at("indices")) {
      Index idx{ij.at("label").get<std::string>(), ij.at("dim").get<std::int64_t>()};
      dims[idx.label] = idx.dim;
      indices.push_back(std::move(idx));
    }
    std::vector<Complex> data;
    for (const auto& vj : tj.at("data")) data.emplace_back(vj.at(0).get<double>(), vj.at(1).get<double>());
    net.tensors.at(tj.at("id").get<std::size_t>()) = Tensor(std::move(indices), std::move(data));
  }
  for (const auto& label : j.at("open"))
    net.open.push_back({label.get<std::string>(), dims.at(label.get<std::string>())});
  net.validate();
  return net;
}

json to_json(const ContractionPlan& plan) {
  auto walk = [&](auto&& self, int idx) -> json {
    const auto& node = plan.nodes.at(idx);
    if (node.leaf >= 0) return node.leaf;
    return json::array({self(self, node.left), self(self, node.right)});
  };
  if (plan.root < 0) return json::array();
  return walk(walk, plan.root);
}

ContractionPlan plan_from_json(const json& j) {
  ContractionPlan plan;
  auto walk = [&](auto&& self, const json& node) -> int {
    if (node.is_number_integer()) {
      plan.nodes.push_back({node.get<int>(), -1, -1});
      return static_cast<int>(plan.nodes.size()) - 1;
    }
    if (!node.is_array() || node.size() != 2)
      throw Error("plan json must be nested pairs of tensor ids");
    const int left = self(self, node.at(0));
    const int right = self(self, node.at(1));
    plan.nodes.push_back({-1, left, right});
    return static_cast<int>(plan.nodes.size()) - 1;
  };
  plan.root = walk(walk, j);
  return plan;
}

}  // namespace dualsim::tn
