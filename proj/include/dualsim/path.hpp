#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dualsim/circuit.hpp"
#include "dualsim/dd.hpp"
#include "dualsim/tn.hpp"

namespace dualsim::path {

enum class StepKind { vector_combine, operator_combine };

/// One pairwise combine of two adjacent task-graph fragments. Fragments are
/// named by leaf ids [0, num_leaves) and intermediate ids num_leaves + k for
/// the k-th step's result.
struct Step {
  int lhs = -1;
  int rhs = -1;
  StepKind kind = StepKind::vector_combine;

  bool operator==(const Step&) const = default;
};

/// Ordered multiplication schedule over a circuit's task graph. Vector graphs
/// have the initial state as leaf 0 and gate i as leaf i+1; matrix graphs
/// (equivalence accumulators) have one leaf per gate and no state.
struct SimulationPath {
  int num_leaves = 0;
  bool matrix_graph = false;
  std::vector<Step> steps;

  bool operator==(const SimulationPath&) const = default;
};

struct StepMetrics {
  std::vector<std::size_t> nodes_after_step;
  std::size_t peak_nodes = 0;
  std::size_t final_nodes = 0;
};

struct PathResult {
  dd::VectorDD state;   // set when !is_matrix
  dd::MatrixDD matrix;  // set when is_matrix
  bool is_matrix = false;
  StepMetrics metrics;
};

/// Left fold: state times g0, then g1, ... All steps are vector combines.
SimulationPath default_sequential_path(const Circuit& c);

/// Translates a contraction plan built on circuit_to_network(c, input) (no
/// output projection) into a simulation path. Plan steps whose operands are
/// not yet adjacent in circuit order are deferred FIFO until the gap closes.
SimulationPath plan_to_path(const tn::ContractionPlan& plan, const Circuit& c);

/// Matrix-graph path over concatenate(g, g2inv) that grows an accumulator
/// from the middle outward: one gate of g from the right, then ratio gates of
/// g2inv from the left, tail-first on g and head-first on g2inv.
SimulationPath alternating_path(const Circuit& g, const Circuit& g2inv, int ratio = 1);

/// Runs a path on the given package. The returned diagram is inc_ref'd;
/// release it with pkg.dec_ref when no longer needed.
PathResult execute_path(const Circuit& c, const BasisState& input, const SimulationPath& p,
                        dd::Package& pkg);

enum class Strategy { sequential, alternating, greedy_alt, plan_translated };

struct EquivalenceOptions {
  Strategy strategy = Strategy::alternating;
  int ratio = 1;
  double eps_eq = 1e-9;
  dd::PackageConfig package;
};

struct EquivalenceVerdict {
  double fidelity = 0.0;
  bool equivalent = false;
  StepMetrics metrics;
};

/// Simulates the miter concatenate(g, invert(g2)) on the input basis state
/// and judges |<input|G~|input>|^2 against 1 within eps_eq.
EquivalenceVerdict check_equivalence(const Circuit& g, const Circuit& g2, const BasisState& input,
                                     const EquivalenceOptions& opts = {});

nlohmann::json to_json(const SimulationPath& p);
SimulationPath path_from_json(const nlohmann::json& j);

}  // namespace dualsim::path
