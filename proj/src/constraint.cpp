#include "fpsolve/constraint.hpp"

#include <sstream>

namespace fpsolve {

RelOp negate_rel(RelOp r) {
  switch (r) {
    case RelOp::Lt: return RelOp::Ge;
    case RelOp::Le: return RelOp::Gt;
    case RelOp::Gt: return RelOp::Le;
    case RelOp::Ge: return RelOp::Lt;
    case RelOp::Eq: return RelOp::Ne;
    case RelOp::Ne: return RelOp::Eq;
  }
  return RelOp::Eq;
}

std::string rel_to_string(RelOp r) {
  switch (r) {
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Gt: return ">";
    case RelOp::Ge: return ">=";
    case RelOp::Eq: return "==";
    case RelOp::Ne: return "!=";
  }
  return "?";
}

struct ConstraintStore::Topology {
  std::vector<std::string> names;
  std::map<std::string, VarId> by_name;
  std::map<uint64_t, VarId> constants;
  std::vector<Constraint> constraints;
  std::vector<std::vector<uint32_t>> watchers;
  std::vector<VarId> inputs;
};

ConstraintStore::ConstraintStore(const FloatFormat& fmt)
    : topo_(std::make_shared<Topology>()), fmt_(&fmt) {}

ConstraintStore::Topology& ConstraintStore::mutable_topo() {
  if (topo_.use_count() > 1) topo_ = std::make_shared<Topology>(*topo_);
  return *topo_;
}

VarId ConstraintStore::add_variable(const std::string& name, FpInterval dom) {
  Topology& t = mutable_topo();
  if (t.by_name.count(name)) throw std::invalid_argument("duplicate variable " + name);
  VarId id = static_cast<VarId>(domains_.size());
  t.names.push_back(name);
  t.by_name[name] = id;
  t.watchers.emplace_back();
  domains_.push_back(dom);
  if (dom.is_empty()) failed_ = true;
  return id;
}

VarId ConstraintStore::add_constant(const FloatValue& v) {
  Topology& t = mutable_topo();
  auto it = t.constants.find(v.bits());
  if (it != t.constants.end()) return it->second;
  VarId id = add_variable("#" + to_hex_string(v), FpInterval::singleton(v));
  mutable_topo().constants[v.bits()] = id;
  return id;
}

void ConstraintStore::add_constraint(const Constraint& c) {
  Topology& t = mutable_topo();
  uint32_t idx = static_cast<uint32_t>(t.constraints.size());
  t.constraints.push_back(c);
  auto watch = [&](VarId v) {
    if (v >= t.watchers.size()) throw std::invalid_argument("constraint references unknown variable");
    t.watchers[v].push_back(idx);
  };
  switch (c.kind) {
    case Constraint::Kind::Ternary:
      watch(c.z);
      watch(c.x);
      watch(c.y);
      break;
    case Constraint::Kind::Sqrt:
    case Constraint::Kind::Neg:
    case Constraint::Kind::Assign:
      watch(c.z);
      watch(c.x);
      break;
    case Constraint::Kind::Compare:
      watch(c.x);
      watch(c.y);
      break;
  }
}

void ConstraintStore::mark_input(VarId v) { mutable_topo().inputs.push_back(v); }

const std::string& ConstraintStore::name(VarId v) const { return topo_->names.at(v); }

bool ConstraintStore::has_variable(const std::string& name) const {
  return topo_->by_name.count(name) != 0;
}

VarId ConstraintStore::var(const std::string& name) const {
  auto it = topo_->by_name.find(name);
  if (it == topo_->by_name.end()) throw std::invalid_argument("unknown variable " + name);
  return it->second;
}

const std::vector<Constraint>& ConstraintStore::constraints() const { return topo_->constraints; }

const std::vector<uint32_t>& ConstraintStore::watchers(VarId v) const {
  return topo_->watchers.at(v);
}

const std::vector<VarId>& ConstraintStore::inputs() const { return topo_->inputs; }

ConstraintStore::TightenResult ConstraintStore::tighten(VarId v, const FpInterval& nd) {
  FpInterval refined = intersect(domains_[v], nd);
  if (refined == domains_[v]) return TightenResult::Unchanged;
  domains_[v] = refined;
  if (refined.is_empty()) {
    failed_ = true;
    return TightenResult::Empty;
  }
  return TightenResult::Tightened;
}

void ConstraintStore::set_domain(VarId v, const FpInterval& nd) {
  domains_[v] = nd;
  if (nd.is_empty()) failed_ = true;
}

std::string ConstraintStore::dump() const {
  std::ostringstream os;
  for (VarId v = 0; v < domains_.size(); ++v) {
    const FpInterval& d = domains_[v];
    os << name(v) << " in ";
    if (d.is_empty())
      os << "[] (count=0)";
    else
      os << "[" << to_decimal_string(d.lo()) << ", " << to_decimal_string(d.hi())
         << "] (count=" << d.count() << ")";
    os << "\n";
  }
  const char* op_sym[] = {"+", "-", "*", "/"};
  for (const Constraint& c : topo_->constraints) {
    switch (c.kind) {
      case Constraint::Kind::Ternary:
        os << name(c.z) << " = " << name(c.x) << " " << op_sym[static_cast<int>(c.op)] << " "
           << name(c.y);
        break;
      case Constraint::Kind::Sqrt: os << name(c.z) << " = sqrt " << name(c.x); break;
      case Constraint::Kind::Neg: os << name(c.z) << " = - " << name(c.x); break;
      case Constraint::Kind::Assign: os << name(c.z) << " = " << name(c.x); break;
      case Constraint::Kind::Compare:
        os << name(c.x) << " " << rel_to_string(c.rel) << " " << name(c.y);
        break;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace fpsolve
