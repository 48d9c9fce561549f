#ifndef FPSOLVE_CONSTRAINT_HPP
#define FPSOLVE_CONSTRAINT_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fpsolve/interval.hpp"

namespace fpsolve {

using VarId = uint32_t;

enum class RelOp { Lt, Le, Gt, Ge, Eq, Ne };

RelOp negate_rel(RelOp r);
std::string rel_to_string(RelOp r);

/// One collected constraint. Ternary: z = round(x op y). Sqrt: z = round(sqrt x).
/// Neg: z = -x. Assign: z = x. Compare: x rel y.
struct Constraint {
  enum class Kind { Ternary, Sqrt, Neg, Assign, Compare };
  Kind kind;
  BinOp op = BinOp::Add;  // Ternary only
  RelOp rel = RelOp::Eq;  // Compare only
  VarId z = 0, x = 0, y = 0;

  static Constraint ternary(BinOp op, VarId z, VarId x, VarId y) {
    return {Kind::Ternary, op, RelOp::Eq, z, x, y};
  }
  static Constraint sqrt(VarId z, VarId x) { return {Kind::Sqrt, BinOp::Add, RelOp::Eq, z, x, 0}; }
  static Constraint neg(VarId z, VarId x) { return {Kind::Neg, BinOp::Add, RelOp::Eq, z, x, 0}; }
  static Constraint assign(VarId z, VarId x) {
    return {Kind::Assign, BinOp::Add, RelOp::Eq, z, x, 0};
  }
  static Constraint compare(RelOp rel, VarId x, VarId y) {
    return {Kind::Compare, BinOp::Add, rel, 0, x, y};
  }
};

/// The target of a solve run: a variable, the program point carrying the
/// annotation, the suspicious interval, and the user tolerance (reporting only).
struct SuspectSpec {
  std::string target_var;
  std::string location;
  FpInterval interval;
  std::string tolerance = "0";

  SuspectSpec() : interval(FpInterval::empty(FloatFormat::binary32())) {}
};

/// Variable domains plus an indexed constraint set. Copies are cheap and
/// fully independent (the constraint topology is shared, domains are not),
/// which is what 3B slices and search splits duplicate.
class ConstraintStore {
 public:
  explicit ConstraintStore(const FloatFormat& fmt);

  VarId add_variable(const std::string& name, FpInterval dom);
  VarId add_variable(const std::string& name) {
    return add_variable(name, FpInterval::full(*fmt_));
  }
  /// Singleton helper for literals; reuses an existing constant of equal bits.
  VarId add_constant(const FloatValue& v);
  void add_constraint(const Constraint& c);
  void mark_input(VarId v);

  const FloatFormat& format() const { return *fmt_; }
  size_t num_vars() const { return domains_.size(); }
  const std::string& name(VarId v) const;
  bool has_variable(const std::string& name) const;
  VarId var(const std::string& name) const;  // throws if unknown
  const FpInterval& domain(VarId v) const { return domains_[v]; }
  const std::vector<Constraint>& constraints() const;
  const std::vector<uint32_t>& watchers(VarId v) const;
  const std::vector<VarId>& inputs() const;

  enum class TightenResult { Unchanged, Tightened, Empty };
  TightenResult tighten(VarId v, const FpInterval& nd);
  void set_domain(VarId v, const FpInterval& nd);  // unchecked replace

  bool failed() const { return failed_; }

  /// One line per variable `name in [lo, hi] (count=N)`, one per constraint.
  std::string dump() const;

 private:
  struct Topology;  // immutable after the last add_*; shared between copies
  std::shared_ptr<Topology> topo_;
  const FloatFormat* fmt_;
  std::vector<FpInterval> domains_;
  bool failed_ = false;

  Topology& mutable_topo();
};

/// Exact-real interval with open/closed and unbounded flags; the codomain of
/// rounding_preimage and the carrier of inverse projection arithmetic.
struct RatBound {
  bool finite = true;  // false: -inf on the lo side, +inf on the hi side
  mpq_class value;
  bool open = false;
};

struct RatInterval {
  RatBound lo, hi;

  static RatInterval whole() {
    RatInterval r;
    r.lo.finite = r.hi.finite = false;
    return r;
  }
  bool contains_zero() const;
};

/// { r in R : round_nearest_even(r) in Z }, bounded by the midpoints to the
/// adjacent floats; each midpoint included iff the adjacent float's mantissa
/// is even. Saturates (open) at the overflow thresholds for extreme Z.
/// Z must be non-empty.
RatInterval rounding_preimage(const FpInterval& Z);

/// Floats of fmt contained in R.
FpInterval clip_to_floats(const RatInterval& R, const FloatFormat& fmt);

/// Applies the forward pass plus every backward projection of c to the
/// store's domains. Sound: no float assignment satisfying c inside the
/// current domains is removed. Returns true when any domain changed; ids of
/// changed variables are appended to *changed when given. An empty refined
/// domain fails the store.
bool backward_project(const Constraint& c, ConstraintStore& store,
                      std::vector<VarId>* changed = nullptr);

struct PropagateStats {
  uint64_t projections = 0;
};

/// How hard the 2B worklist chases the fixpoint on big formats.
/// Exact: requeue on every domain change (binary32 reaches the true fixpoint
/// in all but pathological cases). Damped: requeue only after a sizeable
/// cumulative shrink and stop at a modest projection budget, trading
/// precision for a bounded, roughly constant cost per call. Small enumerable
/// formats always reach the exact fixpoint under either setting.
enum class PropagationEffort { Exact, Damped };

/// Worklist fixpoint of backward_project over all constraints (2B-consistency).
/// Failure is recorded on the store, not thrown.
PropagateStats propagate_2b(ConstraintStore& store,
                            PropagationEffort effort = PropagationEffort::Exact);

/// Same fixpoint, but seeded only with the watchers of seed_vars; correct when
/// every other domain is unchanged since the last propagation.
PropagateStats propagate_2b(ConstraintStore& store, const std::vector<VarId>& seed_vars,
                            PropagationEffort effort = PropagationEffort::Exact);

/// 3B-consistency shaving: prune a boundary slice of each domain whenever
/// assuming the slice makes the 2B fixpoint fail. slice_fraction of the
/// domain width, minimum one float, repeated until no bound improves.
PropagateStats filter_3b(ConstraintStore& store, double slice_fraction = 0.1,
                         PropagationEffort effort = PropagationEffort::Exact);

}  // namespace fpsolve

#endif  // FPSOLVE_CONSTRAINT_HPP
