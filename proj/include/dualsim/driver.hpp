#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dualsim/circuit.hpp"
#include "dualsim/path.hpp"

namespace dualsim::driver {

enum class Backend { dd, tn, both };
enum class Mode { full, amplitude, fidelity };
enum class Strategy { sequential, alternating, greedy_alt, plan };
enum class PlanKind { greedy, exhaustive };

/// Numeric knobs; env vars DUALSIM_EPS_NUM, DUALSIM_EPS_EQ and DUALSIM_N_DENSE
/// override the defaults.
struct Tolerances {
  double eps_num = 1e-10;
  double eps_eq = 1e-9;
  int n_dense = 20;

  static Tolerances from_env();
};

struct RunConfig {
  Backend backend = Backend::dd;
  Mode mode = Mode::full;
  std::string amp_bits;                 // amplitude mode: which amplitude to read
  std::optional<Circuit> second;        // fidelity mode: the circuit compared against
  Strategy strategy = Strategy::sequential;
  int alt_ratio = 1;
  PlanKind plan = PlanKind::greedy;
  int slices = 0;                       // tn: number of indices to slice
  int workers = 1;                      // tn: parallel slice workers
  std::uint64_t seed = 0;
  Tolerances tol;
};

struct BackendResult {
  bool ran = false;
  bool refused = false;
  std::string refusal;
  std::vector<Complex> state;           // full mode, when n <= n_dense
  Complex amplitude{0.0, 0.0};          // amplitude mode
  double fidelity = -1.0;               // fidelity mode
  bool equivalent = false;
  double wall_ms = 0.0;
  // dd metrics
  std::size_t peak_nodes = 0;
  std::size_t final_nodes = 0;
  // tn metrics
  std::uint64_t plan_flops = 0;
  std::uint64_t max_intermediate = 0;
  int max_rank = 0;
  int num_slices = 1;
};

struct RunReport {
  int schema = 1;
  int num_qubits = 0;
  std::size_t num_gates = 0;
  RunConfig config;
  BackendResult dd;
  BackendResult tn;
  bool crosscheck_ok = true;
  double crosscheck_dev = 0.0;

  nlohmann::json to_json() const;
  /// One-paragraph human summary of results and metrics.
  void print_summary(std::ostream& os) const;
};

/// Executes the configured backends on the circuit; in `both` mode the
/// payloads are cross-checked within tol.eps_num.
RunReport run(const RunConfig& cfg, const Circuit& circuit);

enum class BenchmarkFamily { ghz, grover_oracle, random };

BenchmarkFamily family_from_name(const std::string& name);
const char* family_name(BenchmarkFamily f);

struct RandomOptions {
  int num_gates = -1;  // default 3n
  int locality = -1;   // max |a-b| for two-qubit gates; -1 = unbounded
};

/// ghz: H on the top qubit plus a CX chain. grover-oracle: one MCX over all
/// qubits targeting qubit 0. random: seeded draw over the gate library.
Circuit generate_benchmark(BenchmarkFamily family, int n, std::uint64_t seed = 0,
                           const RandomOptions& opts = {});

struct SweepRow {
  int n;
  double value;
};

/// Known metrics: dd-gate-nodes, dd-state-nodes, tn-gate-tensor-elements.
std::vector<SweepRow> scaling_sweep(BenchmarkFamily family, int n_lo, int n_hi,
                                    const std::string& metric, std::uint64_t seed = 0);

void write_csv(const std::vector<SweepRow>& rows, const std::string& metric, std::ostream& os);

}  // namespace dualsim::driver
