#ifndef FPSOLVE_SEARCH_HPP
#define FPSOLVE_SEARCH_HPP

#include <chrono>
#include <functional>
#include <map>
#include <optional>

#include "fpsolve/constraint.hpp"

namespace fpsolve {

/// std: bisection; fpc: 5-way {l}, (l,m), {m}, (m,r), {r}; fp3s: the three
/// singletons only (incomplete by design).
enum class Strategy { Std, Fpc, Fp3s };

Strategy strategy_from_string(const std::string& s);
std::string strategy_to_string(Strategy s);

struct SolverConfig {
  Strategy strategy = Strategy::Fpc;
  unsigned unroll_k = 8;
  std::chrono::milliseconds timeout{180000};
  uint64_t node_limit = 0;  // 0 = unlimited
  bool shave_at_root = true;
  bool shave_at_nodes = false;
  double shave_fraction = 0.1;
  bool std_ordinal_midpoint = false;  // experimental bisection variant
  uint64_t seed = 0;                  // reserved; no randomized tie-breaks by default
};

enum class Status { Sat, Unsat, NotFound, Unknown };

std::string status_to_string(Status s);

struct SolveStats {
  uint64_t nodes = 0;
  uint64_t propagations = 0;
  uint32_t max_depth = 0;
  double time_ms = 0;
};

struct SolveResult {
  Status status = Status::Unknown;
  std::map<std::string, FloatValue> witness;  // input name -> value, Sat only
  bool verified = false;
  std::optional<FloatValue> target_value;  // concrete value at ct, Sat only
  std::string reason;                      // Unknown only
  SolveStats stats;
};

/// Concrete replay oracle: given a full input assignment, the value of the
/// target variable at the critical point, or nullopt when execution does not
/// reach it.
using WitnessVerifier =
    std::function<std::optional<FloatValue>(const std::map<std::string, FloatValue>&)>;

/// Input variable with the largest domain width (ties to the lexicographically
/// smallest name); nullopt when every input is a singleton.
std::optional<VarId> select_variable(const ConstraintStore& store);

/// Ordered, disjoint pieces of X per strategy. Requires count(X) >= 2.
/// Only fp3s is non-covering.
std::vector<FpInterval> split(const FpInterval& X, Strategy strategy,
                              bool std_ordinal_midpoint = false);

/// Depth-first branch-and-prune over one constraint system. The suspicious
/// interval must already be intersected into the target variable's domain.
/// Every Sat witness is re-verified through `verify` before being accepted.
SolveResult solve(ConstraintStore store, const SuspectSpec& spec, const SolverConfig& cfg,
                  const WitnessVerifier& verify);

}  // namespace fpsolve

#endif  // FPSOLVE_SEARCH_HPP
