#include <span>

#include "fpsolve/frontend.hpp"

namespace fpsolve {

// ---------------------------------------------------------------- unroll

namespace {

std::vector<StmtPtr> unroll_body(const std::vector<StmtPtr>& body, unsigned k);

StmtPtr unroll_stmt(const Stmt& s, unsigned k) {
  if (s.kind == Stmt::Kind::While) {
    // while(c){B}  =>  if(c){ B'; if(c){ B'; ... residual(c) } }
    auto inner = std::make_unique<Stmt>();
    inner->kind = Stmt::Kind::Residual;
    inner->line = s.line;
    inner->col = s.col;
    inner->cond = s.cond->clone();
    for (unsigned i = 0; i < k; ++i) {
      auto guard = std::make_unique<Stmt>();
      guard->kind = Stmt::Kind::If;
      guard->line = s.line;
      guard->col = s.col;
      guard->cond = s.cond->clone();
      guard->then_body = unroll_body(s.then_body, k);
      guard->then_body.push_back(std::move(inner));
      inner = std::move(guard);
    }
    return inner;
  }
  StmtPtr c = s.clone();
  c->then_body = unroll_body(s.then_body, k);
  c->else_body = unroll_body(s.else_body, k);
  return c;
}

std::vector<StmtPtr> unroll_body(const std::vector<StmtPtr>& body, unsigned k) {
  std::vector<StmtPtr> out;
  out.reserve(body.size());
  for (const auto& s : body) out.push_back(unroll_stmt(*s, k));
  return out;
}

}  // namespace

Program unroll_loops(const Program& p, unsigned k) {
  Program out;
  out.format = p.format;
  out.inputs = p.inputs;
  out.source = p.source;
  out.stmts = unroll_body(p.stmts, k);
  return out;
}

// ---------------------------------------------------------------- DSA

namespace {

// Folds each branch's continuation into the branch, so every statement list
// ends control flow at its last statement and paths can be read off linearly.
// Residuals stay inline: their true side terminates the path by definition.
std::vector<StmtPtr> treeify(std::span<const StmtPtr> stmts) {
  std::vector<StmtPtr> out;
  for (size_t i = 0; i < stmts.size(); ++i) {
    const Stmt& s = *stmts[i];
    if (s.kind == Stmt::Kind::While)
      throw std::logic_error("to_dsa requires a loop-free program");
    if (s.kind == Stmt::Kind::If) {
      std::span<const StmtPtr> rest = stmts.subspan(i + 1);
      auto n = std::make_unique<Stmt>();
      n->kind = Stmt::Kind::If;
      n->line = s.line;
      n->col = s.col;
      n->cond = s.cond->clone();
      std::vector<StmtPtr> then_all, else_all;
      for (const auto& t : s.then_body) then_all.push_back(t->clone());
      for (const auto& t : rest) then_all.push_back(t->clone());
      for (const auto& t : s.else_body) else_all.push_back(t->clone());
      for (const auto& t : rest) else_all.push_back(t->clone());
      n->then_body = treeify(then_all);
      n->else_body = treeify(else_all);
      out.push_back(std::move(n));
      return out;
    }
    out.push_back(s.clone());
  }
  return out;
}

struct Renamer {
  std::map<std::string, int> counter;  // next fresh version per base name

  void rename_expr(Expr& e, const std::map<std::string, int>& env) {
    switch (e.kind) {
      case Expr::Kind::Var: {
        auto it = env.find(e.name);
        e.version = it == env.end() ? 0 : it->second;
        break;
      }
      case Expr::Kind::Binary:
        rename_expr(*e.lhs, env);
        rename_expr(*e.rhs, env);
        break;
      case Expr::Kind::Sqrt:
      case Expr::Kind::Negate:
        rename_expr(*e.lhs, env);
        break;
      case Expr::Kind::Literal:
        break;
    }
  }

  void rename_block(std::vector<StmtPtr>& body, std::map<std::string, int> env) {
    for (auto& sp : body) {
      Stmt& s = *sp;
      switch (s.kind) {
        case Stmt::Kind::Assign:
          rename_expr(*s.value, env);
          s.target_version = ++counter[s.target];
          env[s.target] = s.target_version;
          break;
        case Stmt::Kind::If:
          rename_expr(*s.cond->lhs, env);
          rename_expr(*s.cond->rhs, env);
          rename_block(s.then_body, env);
          rename_block(s.else_body, env);
          break;
        case Stmt::Kind::Residual:
          rename_expr(*s.cond->lhs, env);
          rename_expr(*s.cond->rhs, env);
          break;
        case Stmt::Kind::Suspect: {
          auto it = env.find(s.suspect_var);
          s.suspect_version = it == env.end() ? 0 : it->second;
          break;
        }
        case Stmt::Kind::While:
          throw std::logic_error("to_dsa requires a loop-free program");
      }
    }
  }
};

}  // namespace

Program to_dsa(const Program& p) {
  Program out;
  out.format = p.format;
  out.inputs = p.inputs;
  out.source = p.source;
  out.stmts = treeify(p.stmts);
  Renamer r;
  std::map<std::string, int> env;
  for (const auto& d : p.inputs) env[d.name] = 0;
  r.rename_block(out.stmts, std::move(env));
  return out;
}

// ---------------------------------------------------------------- paths

SuspectSpec make_suspect_spec(const Program& p, const std::string& tolerance) {
  const Stmt* found = nullptr;
  // walk every nesting level; exactly one annotation is required
  std::function<void(const std::vector<StmtPtr>&)> walk = [&](const std::vector<StmtPtr>& b) {
    for (const auto& s : b) {
      if (s->kind == Stmt::Kind::Suspect) {
        if (found && found->label != s->label)
          throw std::invalid_argument("multiple @suspect annotations");
        found = s.get();
      }
      walk(s->then_body);
      walk(s->else_body);
    }
  };
  walk(p.stmts);
  if (!found) throw std::invalid_argument("no @suspect annotation");
  SuspectSpec spec;
  spec.target_var = found->suspect_var;
  spec.location = found->label;
  spec.interval = *found->suspect_interval;
  spec.tolerance = tolerance;
  return spec;
}

namespace {

/// Builds one ConstraintStore while walking a single DSA path.
struct PathBuilder {
  const Program& prog;
  const SuspectSpec& spec;
  std::vector<PathSystem>& out;

  ConstraintStore store;
  std::vector<std::string> decisions;
  uint32_t temp_counter = 0;

  PathBuilder(const Program& p, const SuspectSpec& sp, std::vector<PathSystem>& o)
      : prog(p), spec(sp), out(o), store(*p.format) {
    for (const auto& d : p.inputs) {
      VarId v = store.add_variable(d.name, *d.range);
      store.mark_input(v);
    }
  }

  VarId var_for(const std::string& base, int version) {
    std::string n = dsa_name(base, version);
    if (store.has_variable(n)) return store.var(n);
    return store.add_variable(n);
  }

  VarId fresh_temp() { return store.add_variable("$t" + std::to_string(temp_counter++)); }

  // Flattens e into ternary/sqrt/neg constraints; `into` (when valid) receives
  // the result directly so assignments do not need an extra copy constraint.
  VarId flatten(const Expr& e, std::optional<VarId> into = std::nullopt) {
    switch (e.kind) {
      case Expr::Kind::Literal: {
        VarId c = store.add_constant(e.value);
        if (into) {
          store.add_constraint(Constraint::assign(*into, c));
          return *into;
        }
        return c;
      }
      case Expr::Kind::Var: {
        VarId v = var_for(e.name, e.version);
        if (into) {
          store.add_constraint(Constraint::assign(*into, v));
          return *into;
        }
        return v;
      }
      case Expr::Kind::Binary: {
        VarId x = flatten(*e.lhs);
        VarId y = flatten(*e.rhs);
        VarId z = into ? *into : fresh_temp();
        store.add_constraint(Constraint::ternary(e.op, z, x, y));
        return z;
      }
      case Expr::Kind::Sqrt: {
        VarId x = flatten(*e.lhs);
        VarId z = into ? *into : fresh_temp();
        store.add_constraint(Constraint::sqrt(z, x));
        return z;
      }
      case Expr::Kind::Negate: {
        VarId x = flatten(*e.lhs);
        VarId z = into ? *into : fresh_temp();
        store.add_constraint(Constraint::neg(z, x));
        return z;
      }
    }
    throw std::logic_error("unreachable expr kind");
  }

  void add_cond(const Cond& c, bool taken, int line, const std::string& text) {
    VarId x = flatten(*c.lhs);
    VarId y = flatten(*c.rhs);
    RelOp rel = taken ? c.rel : negate_rel(c.rel);
    store.add_constraint(Constraint::compare(rel, x, y));
    decisions.push_back("L" + std::to_string(line) + ": " + text + " -> " +
                        (taken ? "true" : "false"));
  }

  void emit_residual() {
    PathSystem ps(store);
    ps.residual = true;
    ps.decisions = decisions;
    out.push_back(std::move(ps));
  }

  void emit_target(const Stmt& s) {
    VarId tv = var_for(s.suspect_var, s.suspect_version);
    PathSystem ps(store);
    ps.store.tighten(tv, spec.interval);  // failure sticks when the intersection is empty
    ps.target = tv;
    ps.has_target = true;
    ps.decisions = decisions;
    out.push_back(std::move(ps));
  }

  void walk(const std::vector<StmtPtr>& body, size_t from) {
    for (size_t i = from; i < body.size(); ++i) {
      const Stmt& s = *body[i];
      switch (s.kind) {
        case Stmt::Kind::Assign: {
          VarId z = var_for(s.target, s.target_version);
          flatten(*s.value, z);
          break;
        }
        case Stmt::Kind::If: {
          // treeify folded the continuation into both branches
          PathBuilder then_side = *this;
          then_side.add_cond(*s.cond, true, s.line, s.cond->to_string());
          then_side.walk(s.then_body, 0);
          PathBuilder else_side = *this;
          else_side.add_cond(*s.cond, false, s.line, s.cond->to_string());
          else_side.walk(s.else_body, 0);
          return;
        }
        case Stmt::Kind::Residual: {
          PathBuilder live = *this;
          live.add_cond(*s.cond, true, s.line, s.cond->to_string() + " [loop bound]");
          live.emit_residual();
          add_cond(*s.cond, false, s.line, s.cond->to_string() + " [loop bound]");
          break;  // false side continues with the rest of this list
        }
        case Stmt::Kind::Suspect:
          if (s.label == spec.location) {
            emit_target(s);
            return;  // the system ends at the critical point
          }
          break;
        case Stmt::Kind::While:
          throw std::logic_error("enumerate_paths requires an unrolled program");
      }
    }
    // fell off the end without reaching the annotation: no system to solve
  }
};

}  // namespace

std::vector<PathSystem> enumerate_paths(const Program& dsa, const SuspectSpec& spec) {
  std::vector<PathSystem> out;
  PathBuilder b(dsa, spec, out);
  b.walk(dsa.stmts, 0);
  return out;
}

}  // namespace fpsolve
