#include <cmath>

#include "fpsolve/frontend.hpp"

namespace fpsolve {

namespace {

FloatValue make_inf(const FloatFormat& f, bool neg) {
  uint64_t bits = uint64_t(f.max_biased_exp() + 1) << f.mantissa_bits();
  if (neg) bits |= f.sign_mask();
  return FloatValue(bits, f);
}

FloatValue make_nan(const FloatFormat& f) {
  uint64_t bits = (uint64_t(f.max_biased_exp() + 1) << f.mantissa_bits()) |
                  (uint64_t{1} << (f.mantissa_bits() - 1));
  return FloatValue(bits, f);
}

FloatValue flip_sign(const FloatValue& a) {
  return FloatValue(a.bits() ^ a.format().sign_mask(), a.format());
}

bool is_binary32(const FloatFormat& f) { return f == FloatFormat::binary32(); }

}  // namespace

FloatValue eval_bin_total(BinOp op, const FloatValue& a, const FloatValue& b) {
  const FloatFormat& f = a.format();
  if (is_binary32(f)) {
    float x = to_hw_float(a), y = to_hw_float(b);
    float r;
    switch (op) {
      case BinOp::Add: r = x + y; break;
      case BinOp::Sub: r = x - y; break;
      case BinOp::Mul: r = x * y; break;
      default: r = x / y; break;
    }
    return from_hw_float(r);
  }

  FloatClass ca = a.classify(), cb = b.classify();
  if (ca == FloatClass::NaN || cb == FloatClass::NaN) return make_nan(f);

  bool ia = ca == FloatClass::Infinity, ib = cb == FloatClass::Infinity;
  bool sa = a.sign(), sb = b.sign();
  switch (op) {
    case BinOp::Add:
    case BinOp::Sub: {
      bool sb_eff = op == BinOp::Sub ? !sb : sb;
      if (ia && ib) return sa == sb_eff ? make_inf(f, sa) : make_nan(f);
      if (ia) return make_inf(f, sa);
      if (ib) return make_inf(f, sb_eff);
      break;
    }
    case BinOp::Mul:
      if (ia || ib) {
        if (a.is_zero() || b.is_zero()) return make_nan(f);
        return make_inf(f, sa != sb);
      }
      break;
    case BinOp::Div:
      if (ia && ib) return make_nan(f);
      if (ia) return make_inf(f, sa != sb);
      if (ib) return FloatValue(sa != sb ? f.sign_mask() : 0, f);  // x / inf
      if (b.is_zero()) {
        if (a.is_zero()) return make_nan(f);
        return make_inf(f, sa != sb);
      }
      break;
  }

  mpq_class ra = to_rational(a), rb = to_rational(b), r;
  switch (op) {
    case BinOp::Add: r = ra + rb; break;
    case BinOp::Sub: r = ra - rb; break;
    case BinOp::Mul: r = ra * rb; break;
    default: r = ra / rb; break;
  }
  Rounded rr = round_nearest_even(r, f);
  if (rr.finite()) return rr.value;
  return make_inf(f, rr.kind == Rounded::Kind::OverflowNeg);
}

FloatValue eval_sqrt_total(const FloatValue& a) {
  const FloatFormat& f = a.format();
  if (is_binary32(f)) return from_hw_float(std::sqrt(to_hw_float(a)));
  FloatClass c = a.classify();
  if (c == FloatClass::NaN) return make_nan(f);
  if (a.is_zero()) return a;  // sqrt preserves the zero's sign
  if (a.sign()) return make_nan(f);
  if (c == FloatClass::Infinity) return make_inf(f, false);
  return *fp_sqrt(a);
}

bool eval_compare(RelOp rel, const FloatValue& a, const FloatValue& b) {
  const FloatFormat& f = a.format();
  if (is_binary32(f)) {
    float x = to_hw_float(a), y = to_hw_float(b);
    switch (rel) {
      case RelOp::Lt: return x < y;
      case RelOp::Le: return x <= y;
      case RelOp::Gt: return x > y;
      case RelOp::Ge: return x >= y;
      case RelOp::Eq: return x == y;
      case RelOp::Ne: return x != y;
    }
  }
  FloatClass ca = a.classify(), cb = b.classify();
  if (ca == FloatClass::NaN || cb == FloatClass::NaN) return rel == RelOp::Ne;
  // order key: infinities beyond every finite, zeros equal
  auto key = [](const FloatValue& v) -> int64_t {
    if (v.classify() == FloatClass::Infinity)
      return v.sign() ? INT64_MIN : INT64_MAX;
    return ordinal(v);
  };
  int64_t ka = key(a), kb = key(b);
  switch (rel) {
    case RelOp::Lt: return ka < kb;
    case RelOp::Le: return ka <= kb;
    case RelOp::Gt: return ka > kb;
    case RelOp::Ge: return ka >= kb;
    case RelOp::Eq: return ka == kb;
    case RelOp::Ne: return ka != kb;
  }
  return false;
}

namespace {

constexpr uint64_t kLoopCap = 1'000'000;
constexpr size_t kDecisionCap = 10'000;

struct Interp {
  const Program& prog;
  Trace& trace;

  FloatValue lookup(const std::string& base, int version) const {
    std::string n = dsa_name(base, std::max(version, 0));
    auto it = trace.values.find(n);
    if (it != trace.values.end()) return it->second;
    auto fit = trace.final_values.find(base);
    if (fit != trace.final_values.end()) return fit->second;
    throw std::logic_error("undefined variable at runtime: " + n);
  }

  FloatValue eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Literal:
        return e.value;
      case Expr::Kind::Var:
        return lookup(e.name, e.version);
      case Expr::Kind::Negate:
        return flip_sign(eval(*e.lhs));
      case Expr::Kind::Sqrt: {
        FloatValue v = eval_sqrt_total(eval(*e.lhs));
        if (v.classify() == FloatClass::NaN) trace.saw_nan = true;
        return v;
      }
      case Expr::Kind::Binary: {
        FloatValue a = eval(*e.lhs);
        FloatValue b = eval(*e.rhs);
        if (e.op == BinOp::Div && b.is_finite() && b.is_zero() && a.classify() != FloatClass::NaN)
          trace.saw_div_by_zero = true;
        FloatValue v = eval_bin_total(e.op, a, b);
        if (v.classify() == FloatClass::NaN) trace.saw_nan = true;
        return v;
      }
    }
    throw std::logic_error("unreachable expr kind");
  }

  bool test(const Cond& c, int line, const char* tag) {
    bool b = eval_compare(c.rel, eval(*c.lhs), eval(*c.rhs));
    if (trace.decisions.size() < kDecisionCap)
      trace.decisions.push_back("L" + std::to_string(line) + ": " + c.to_string() + tag +
                                " -> " + (b ? "true" : "false"));
    return b;
  }

  void run(const std::vector<StmtPtr>& body) {
    for (const auto& sp : body) {
      const Stmt& s = *sp;
      switch (s.kind) {
        case Stmt::Kind::Assign: {
          FloatValue v = eval(*s.value);
          if (v.classify() == FloatClass::NaN) trace.saw_nan = true;
          trace.values[dsa_name(s.target, s.target_version)] = v;
          auto [it, inserted] = trace.final_values.emplace(s.target, v);
          if (!inserted) it->second = v;
          break;
        }
        case Stmt::Kind::If:
          if (test(*s.cond, s.line, "")) run(s.then_body);
          else run(s.else_body);
          break;
        case Stmt::Kind::While: {
          uint64_t iters = 0;
          while (test(*s.cond, s.line, "")) {
            if (++iters > kLoopCap) {
              trace.loop_cap_hit = true;
              break;
            }
            run(s.then_body);
          }
          break;
        }
        case Stmt::Kind::Residual:
          if (test(*s.cond, s.line, " [loop bound]")) trace.residual_hit = true;
          break;
        case Stmt::Kind::Suspect:
          trace.suspect_hits.push_back({s.label, lookup(s.suspect_var, s.suspect_version)});
          break;
      }
    }
  }
};

}  // namespace

Trace concrete_eval(const Program& p, const std::map<std::string, FloatValue>& inputs) {
  Trace t;
  for (const auto& d : p.inputs) {
    auto it = inputs.find(d.name);
    if (it == inputs.end())
      throw std::invalid_argument("missing input '" + d.name + "'");
    t.values[d.name] = it->second;
    t.final_values[d.name] = it->second;
  }
  Interp interp{p, t};
  interp.run(p.stmts);
  return t;
}

}  // namespace fpsolve
