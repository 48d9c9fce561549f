#include "fpsolve/frontend.hpp"

namespace fpsolve {

ExprPtr Expr::clone() const {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->line = line;
  e->col = col;
  e->value = value;
  e->name = name;
  e->version = version;
  e->op = op;
  if (lhs) e->lhs = lhs->clone();
  if (rhs) e->rhs = rhs->clone();
  return e;
}

Cond Cond::clone() const {
  Cond c;
  c.lhs = lhs->clone();
  c.rel = rel;
  c.rhs = rhs->clone();
  return c;
}

std::string Cond::to_string() const {
  return expr_to_string(*lhs) + " " + rel_to_string(rel) + " " + expr_to_string(*rhs);
}

static std::vector<StmtPtr> clone_body(const std::vector<StmtPtr>& body) {
  std::vector<StmtPtr> out;
  out.reserve(body.size());
  for (const auto& s : body) out.push_back(s->clone());
  return out;
}

StmtPtr Stmt::clone() const {
  auto s = std::make_unique<Stmt>();
  s->kind = kind;
  s->line = line;
  s->col = col;
  s->target = target;
  s->target_version = target_version;
  if (value) s->value = value->clone();
  if (cond) s->cond = cond->clone();
  s->then_body = clone_body(then_body);
  s->else_body = clone_body(else_body);
  s->suspect_var = suspect_var;
  s->suspect_version = suspect_version;
  s->suspect_interval = suspect_interval;
  s->suspect_text = suspect_text;
  s->label = label;
  return s;
}

Program Program::clone() const {
  Program p;
  p.format = format;
  p.inputs = inputs;
  p.stmts = clone_body(stmts);
  p.source = source;
  return p;
}

bool Program::is_input(const std::string& name) const {
  for (const auto& d : inputs)
    if (d.name == name) return true;
  return false;
}

std::string dsa_name(const std::string& base, int version) {
  if (version <= 0) return base;
  return base + "@" + std::to_string(version);
}

static const char* op_sym(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    default: return "/";
  }
}

std::string expr_to_string(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Literal:
      return to_decimal_string(e.value);
    case Expr::Kind::Var:
      return dsa_name(e.name, e.version);
    case Expr::Kind::Sqrt:
      return "sqrt(" + expr_to_string(*e.lhs) + ")";
    case Expr::Kind::Negate:
      return "-(" + expr_to_string(*e.lhs) + ")";
    case Expr::Kind::Binary:
      return "(" + expr_to_string(*e.lhs) + " " + op_sym(e.op) + " " +
             expr_to_string(*e.rhs) + ")";
  }
  return "?";
}

}  // namespace fpsolve
