#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dualsim/circuit.hpp"

namespace dualsim::tn {

struct Index {
  std::string label;
  std::int64_t dim = 2;

  bool operator==(const Index&) const = default;
};

/// Dense complex tensor, row-major in the order of its indices.
struct Tensor {
  std::vector<Index> indices;
  std::vector<Complex> data;

  Tensor() = default;
  Tensor(std::vector<Index> idx, std::vector<Complex> values);

  int rank() const { return static_cast<int>(indices.size()); }
  std::int64_t size() const;
  Complex scalar() const;
  int position_of(const std::string& label) const;  // -1 if absent

  /// New tensor with indices reordered to perm (perm[i] = old position).
  Tensor transposed(const std::vector<int>& perm) const;
  /// New tensor with one index pinned to a value and removed.
  Tensor fixed(const std::string& label, std::int64_t value) const;
};

/// Tensors connected by shared index labels. A label appears in at most two
/// tensors; labels appearing once are the open indices.
struct TensorNetwork {
  std::vector<Tensor> tensors;
  std::vector<Index> open;  // ordered; drives the final result layout

  void validate() const;
};

/// Binary contraction tree; leaves name network tensors by position.
struct ContractionPlan {
  struct Node {
    int leaf = -1;  // >= 0 for leaves
    int left = -1;
    int right = -1;
  };
  std::vector<Node> nodes;
  int root = -1;

  static ContractionPlan leaf_pair(int a, int b);
  /// Left-deep chain contracting tensors 0,1,...,m-1 in order.
  static ContractionPlan sequential(int num_tensors);

  int num_leaves() const;
};

struct PlanCost {
  std::uint64_t flops = 0;             // scalar multiply-adds
  std::uint64_t max_intermediate = 0;  // largest intermediate element count
  int max_rank = 0;

  bool operator==(const PlanCost&) const = default;
};

/// Sums over all shared indices of a and b. Surviving indices keep a's order
/// first, then b's. madds, when given, is incremented once per executed
/// scalar multiply-add.
Tensor contract_pair(const Tensor& a, const Tensor& b, std::uint64_t* madds = nullptr);

/// Rank-1 input tensors, one rank-2k tensor per gate, optional rank-1 output
/// projections. Tensor order: inputs (qubit 0..n-1), gates in circuit order,
/// then outputs. Without an output, the open indices are the final wires,
/// highest qubit first.
TensorNetwork circuit_to_network(const Circuit& c, const BasisState& input,
                                 const std::optional<BasisState>& output = std::nullopt);

/// Contracts the whole network following the plan; the result tensor carries
/// the network's open indices in their declared order.
Tensor contract(const TensorNetwork& net, const ContractionPlan& plan,
                std::uint64_t* madds = nullptr);

/// Shape-only cost of executing the plan (no tensor data touched).
PlanCost plan_cost(const TensorNetwork& net, const ContractionPlan& plan);

/// Pairwise-greedy plan minimizing size(result) - (size(a) + size(b)), ties
/// by smaller result rank then lexicographic leaf ids.
ContractionPlan plan_greedy(const TensorNetwork& net);

/// Optimal plan by subset dynamic programming: minimal flops, ties by
/// max_intermediate then canonical enumeration order. Refuses networks with
/// more than max_tensors tensors.
ContractionPlan plan_exhaustive(const TensorNetwork& net, int max_tensors = 12);

struct SliceAssignment {
  std::vector<std::pair<std::string, std::int64_t>> values;
  TensorNetwork net;
};

/// Fixes the given closed indices to every combination of values; contracting
/// all returned networks and summing reproduces the original contraction.
std::vector<SliceAssignment> slice(const TensorNetwork& net,
                                   const std::vector<std::string>& labels);

/// Closed (sliceable) index labels, sorted.
std::vector<std::string> sliceable_labels(const TensorNetwork& net);

nlohmann::json to_json(const TensorNetwork& net);
nlohmann::json to_json(const ContractionPlan& plan);
TensorNetwork network_from_json(const nlohmann::json& j);
ContractionPlan plan_from_json(const nlohmann::json& j);

}  // namespace dualsim::tn
