#ifndef FPSOLVE_FRONTEND_HPP
#define FPSOLVE_FRONTEND_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fpsolve/constraint.hpp"
#include "fpsolve/search.hpp"

namespace fpsolve {

// ---------------------------------------------------------------- AST

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind { Literal, Var, Binary, Sqrt, Negate };
  Kind kind = Kind::Literal;
  int line = 0, col = 0;

  FloatValue value;  // Literal
  std::string name;  // Var (base name)
  int version = -1;  // Var: DSA version; -1 before to_dsa, 0 for inputs
  BinOp op = BinOp::Add;
  ExprPtr lhs, rhs;  // Binary; unary nodes use lhs only

  ExprPtr clone() const;
};

struct Cond {
  ExprPtr lhs;
  RelOp rel = RelOp::Lt;
  ExprPtr rhs;

  Cond clone() const;
  std::string to_string() const;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
  enum class Kind { Assign, If, While, Suspect, Residual };
  Kind kind = Kind::Assign;
  int line = 0, col = 0;

  // Assign
  std::string target;
  int target_version = -1;
  ExprPtr value;

  // If / While / Residual. A Residual marks the point where an unrolled loop
  // would need a further iteration; a satisfiable residual guard means the
  // unrolling bound was insufficient.
  std::optional<Cond> cond;
  std::vector<StmtPtr> then_body, else_body;

  // Suspect annotation
  std::string suspect_var;
  int suspect_version = -1;
  std::optional<FpInterval> suspect_interval;
  std::string suspect_text;  // original interval spelling
  std::string label;         // program-point id, e.g. "squared_area@L9"

  StmtPtr clone() const;
};

struct InputDecl {
  std::string name;
  std::optional<FpInterval> range;
  std::string text;
};

struct Program {
  const FloatFormat* format = &FloatFormat::binary32();
  std::vector<InputDecl> inputs;
  std::vector<StmtPtr> stmts;
  std::string source;

  Program() = default;
  Program(Program&&) = default;
  Program& operator=(Program&&) = default;
  Program clone() const;
  bool is_input(const std::string& name) const;
};

/// `name` for version <= 0, `name@N` for later DSA versions.
std::string dsa_name(const std::string& base, int version);
std::string expr_to_string(const Expr& e);

// ---------------------------------------------------------------- parser

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ")"),
        line(line),
        col(col) {}
};

/// Parses the annotated mini-language; checks use-before-def and literal
/// representability. Decimal literals are nearest-even binary32; interval
/// endpoints are materialized outward (open endpoints via succ/pred).
Program parse_program(const std::string& text);

// ---------------------------------------------------------------- transforms

/// Replaces every while by k guarded copies of its body followed by a
/// residual-guard marker. Loop-free programs come back unchanged.
Program unroll_loops(const Program& p, unsigned k);

/// Dynamic single assignment: every assignment targets a fresh version and
/// the continuation of each branch is specialized per path, so no merge
/// nodes are needed. Requires a loop-free program.
Program to_dsa(const Program& p);

/// One constraint system per executable path from entry to the suspect
/// annotation. Residual paths carry the path condition up to a live residual
/// guard and no target.
struct PathSystem {
  explicit PathSystem(ConstraintStore s) : store(std::move(s)) {}

  ConstraintStore store;
  VarId target = 0;
  bool has_target = false;
  bool residual = false;
  std::vector<std::string> decisions;
};

std::vector<PathSystem> enumerate_paths(const Program& dsa, const SuspectSpec& spec);

/// The program's single @suspect annotation as a SuspectSpec.
/// Throws std::invalid_argument when there is not exactly one.
SuspectSpec make_suspect_spec(const Program& p, const std::string& tolerance = "0");

// ---------------------------------------------------------------- interpreter

/// Bit-exact concrete execution trace under round-to-nearest-even, with IEEE
/// special-value semantics (the solver never sees those; the trace flags them).
struct Trace {
  struct SuspectHit {
    std::string label;
    FloatValue value;
  };
  std::map<std::string, FloatValue> values;       // per DSA-rendered name
  std::map<std::string, FloatValue> final_values; // latest value per base name
  std::vector<std::string> decisions;
  std::vector<SuspectHit> suspect_hits;
  bool saw_nan = false;
  bool saw_div_by_zero = false;
  bool residual_hit = false;
  bool loop_cap_hit = false;
};

Trace concrete_eval(const Program& p, const std::map<std::string, FloatValue>& inputs);

// total (IEEE specials included) concrete operations used by the interpreter
FloatValue eval_bin_total(BinOp op, const FloatValue& a, const FloatValue& b);
FloatValue eval_sqrt_total(const FloatValue& a);
bool eval_compare(RelOp rel, const FloatValue& a, const FloatValue& b);

// ---------------------------------------------------------------- pipeline

struct PipelineOptions {
  SolverConfig solver;
  std::string tolerance = "0";
};

struct PipelineResult {
  SolveResult result;
  SuspectSpec spec;
  std::vector<std::string> witness_path;  // decisions of the verified replay
  uint32_t paths_total = 0;
};

/// Full solve: unroll, DSA, path enumeration, per-path search, concrete
/// witness verification. Unsat is only reported when every path (including
/// residual guards) is refuted within budget.
PipelineResult solve_program(const Program& p, const PipelineOptions& opt);

/// Random generate-and-test baseline: samples inputs uniformly by ordinal
/// rank (every float reachable), stops at the first hit.
struct GenTestResult {
  SolveResult result;
  SuspectSpec spec;
  uint64_t trials_run = 0;
};

GenTestResult generate_and_test(const Program& p, uint64_t max_trials, uint64_t seed,
                                const std::string& tolerance = "0");

}  // namespace fpsolve

#endif  // FPSOLVE_FRONTEND_HPP
