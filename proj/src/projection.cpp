#include <algorithm>
#include <limits>
#include <bit>
#include <cmath>
#include <deque>

#include "fpsolve/constraint.hpp"

namespace fpsolve {

namespace {

// Midpoint to the next float below z: (z + pred(z)) / 2.
mpq_class mid_below(const FloatValue& z) {
  return (to_rational(z) + to_rational(pred(z))) / 2;
}

mpq_class mid_above(const FloatValue& z) {
  return (to_rational(z) + to_rational(succ(z))) / 2;
}

bool mantissa_odd(const FloatValue& z) { return (z.mantissa() & 1) != 0; }

bool at_min_finite(const FloatValue& z) {
  return z.sign() && z.magnitude() == z.format().max_finite_magnitude();
}

bool at_max_finite(const FloatValue& z) {
  return !z.sign() && z.magnitude() == z.format().max_finite_magnitude();
}

}  // namespace

bool RatInterval::contains_zero() const {
  bool above_lo = !lo.finite || lo.value < 0 || (lo.value == 0 && !lo.open);
  bool below_hi = !hi.finite || hi.value > 0 || (hi.value == 0 && !hi.open);
  return above_lo && below_hi;
}

RatInterval rounding_preimage(const FpInterval& Z) {
  if (Z.is_empty()) throw std::invalid_argument("rounding_preimage of empty interval");
  const FloatFormat& fmt = Z.format();
  RatInterval r;
  if (at_min_finite(Z.lo())) {
    r.lo = {true, mpq_class(-fmt.overflow_threshold()), true};
  } else {
    r.lo = {true, mid_below(Z.lo()), mantissa_odd(Z.lo())};
  }
  if (at_max_finite(Z.hi())) {
    r.hi = {true, fmt.overflow_threshold(), true};
  } else {
    r.hi = {true, mid_above(Z.hi()), mantissa_odd(Z.hi())};
  }
  return r;
}

FpInterval clip_to_floats(const RatInterval& R, const FloatFormat& fmt) {
  FloatValue lo = FloatValue::min_finite(fmt);
  FloatValue hi = FloatValue::max_finite(fmt);
  if (R.lo.finite) {
    auto f = float_above(R.lo.value, fmt, R.lo.open);
    if (!f) return FpInterval::empty(fmt);
    lo = *f;
  }
  if (R.hi.finite) {
    auto f = float_below(R.hi.value, fmt, R.hi.open);
    if (!f) return FpInterval::empty(fmt);
    hi = *f;
  }
  if (ordinal(lo) > ordinal(hi)) return FpInterval::empty(fmt);
  return FpInterval(lo, hi);
}

namespace {

// ---- rational interval algebra used by the inverse projections ----

RatBound min_bound(const RatBound& a, const RatBound& b) {
  if (!a.finite || !b.finite) return {false, mpq_class(0), false};
  if (a.value < b.value) return a;
  if (b.value < a.value) return b;
  return {true, a.value, a.open && b.open};
}

RatBound max_bound(const RatBound& a, const RatBound& b) {
  if (!a.finite || !b.finite) return {false, mpq_class(0), false};
  if (a.value > b.value) return a;
  if (b.value > a.value) return b;
  return {true, a.value, a.open && b.open};
}

RatInterval hull_rat(const RatInterval& a, const RatInterval& b) {
  return {min_bound(a.lo, b.lo), max_bound(a.hi, b.hi)};
}

RatInterval negate_rat(const RatInterval& r) {
  RatInterval out;
  out.lo = r.hi;
  out.hi = r.lo;
  if (out.lo.finite) out.lo.value = -out.lo.value;
  if (out.hi.finite) out.hi.value = -out.hi.value;
  return out;
}

// R / [c, d] with 0 < c <= d, or with c <= d < 0 via negation. R finite.
RatInterval div_sign_definite(const RatInterval& R, const mpq_class& c, const mpq_class& d) {
  if (c < 0) return negate_rat(div_sign_definite(R, -d, -c));
  RatInterval out;
  out.lo = {true, R.lo.value >= 0 ? mpq_class(R.lo.value / d) : mpq_class(R.lo.value / c),
            R.lo.open};
  out.hi = {true, R.hi.value >= 0 ? mpq_class(R.hi.value / c) : mpq_class(R.hi.value / d),
            R.hi.open};
  return out;
}

// R * [c, d] with 0 < c <= d, or c <= d < 0 via negation. R finite.
RatInterval mul_sign_definite(const RatInterval& R, const mpq_class& c, const mpq_class& d) {
  if (c < 0) return negate_rat(mul_sign_definite(R, -d, -c));
  RatInterval out;
  out.lo = {true, R.lo.value >= 0 ? mpq_class(R.lo.value * c) : mpq_class(R.lo.value * d),
            R.lo.open};
  out.hi = {true, R.hi.value >= 0 ? mpq_class(R.hi.value * d) : mpq_class(R.hi.value * c),
            R.hi.open};
  return out;
}

// Sign-definite pieces of a float interval, as closed rational endpoints.
struct SignPart {
  bool present = false;
  mpq_class lo, hi;
};

SignPart positive_piece(const FpInterval& X) {
  SignPart p;
  if (X.is_empty() || ordinal(X.hi()) < 1) return p;
  int64_t lo = std::max<int64_t>(ordinal(X.lo()), 1);
  p.present = true;
  p.lo = to_rational(from_ordinal(lo, X.format()));
  p.hi = to_rational(X.hi());
  return p;
}

SignPart negative_piece(const FpInterval& X) {
  SignPart p;
  if (X.is_empty() || ordinal(X.lo()) > -1) return p;
  int64_t hi = std::min<int64_t>(ordinal(X.hi()), -1);
  p.present = true;
  p.lo = to_rational(X.lo());
  p.hi = to_rational(from_ordinal(hi, X.format()));
  return p;
}

// Hull of { x * inv : x in [xlo, xhi], inv in I } where I is a positive
// reciprocal interval whose upper end may be unbounded (division by a range
// touching zero). Openness of I's bounds carries into nonzero products.
RatInterval mul_by_reciprocal(const mpq_class& xlo, const mpq_class& xhi, const RatBound& inv_lo,
                              const RatBound& inv_hi) {
  RatInterval out;
  bool first = true;
  bool lo_inf = false, hi_inf = false;
  auto fold = [&](const mpq_class& x, const RatBound& inv) {
    if (x != 0 && !inv.finite) {
      (x < 0 ? lo_inf : hi_inf) = true;
      return;
    }
    RatBound b = (x == 0) ? RatBound{true, mpq_class(0), false}
                          : RatBound{true, mpq_class(x * inv.value), inv.open};
    if (first) {
      out.lo = out.hi = b;
      first = false;
    } else {
      out.lo = min_bound(out.lo, b);
      out.hi = max_bound(out.hi, b);
    }
  };
  // inv_lo is always finite, so at least two finite corner products exist.
  fold(xlo, inv_lo);
  fold(xlo, inv_hi);
  fold(xhi, inv_lo);
  fold(xhi, inv_hi);
  if (lo_inf) out.lo = {false, mpq_class(0), false};
  if (hi_inf) out.hi = {false, mpq_class(0), false};
  return out;
}

FpInterval clip_intersect(const FpInterval& cur, const RatInterval& S) {
  return intersect(cur, clip_to_floats(S, cur.format()));
}

// Applies a refined domain; returns store state and records the change.
void apply_domain(ConstraintStore& store, VarId v, const FpInterval& nd,
                  std::vector<VarId>* changed, bool* any) {
  auto r = store.tighten(v, nd);
  if (r != ConstraintStore::TightenResult::Unchanged) {
    if (changed) changed->push_back(v);
    *any = true;
  }
}

// ---- hardware fast path (binary32 only) ----
//
// Within a sign-definite quadrant, every bound of a projection's solution
// set is a monotone threshold over the ordinal line, so it can be located
// by binary search using correctly rounded hardware evaluations. The result
// is the same hull consistency as the rational path (occasionally tighter,
// never looser) at a small constant cost per projection.

inline int64_t hw_ord(float f) {
  int32_t b = std::bit_cast<int32_t>(f);
  return b < 0 ? -static_cast<int64_t>(b & 0x7fffffff) : b;
}

inline float hw_val(int64_t o) {
  uint32_t b = o < 0 ? (UINT32_C(0x80000000) | static_cast<uint32_t>(-o))
                     : static_cast<uint32_t>(o);
  return std::bit_cast<float>(b);
}

// Least o in [lo, hi] satisfying an upward-closed predicate; pred(hi) must hold.
template <class P>
int64_t hw_least(int64_t lo, int64_t hi, P pred) {
  while (lo < hi) {
    int64_t m = lo + (hi - lo) / 2;
    if (pred(m)) hi = m; else lo = m + 1;
  }
  return lo;
}

// Greatest o in [lo, hi] satisfying a downward-closed predicate; pred(lo) must hold.
template <class P>
int64_t hw_greatest(int64_t lo, int64_t hi, P pred) {
  while (lo < hi) {
    int64_t m = lo + (hi - lo + 1) / 2;
    if (pred(m)) lo = m; else hi = m - 1;
  }
  return lo;
}

// Feasible sub-range of [qlo, qhi] under maxf(o) >= zlo && minf(o) <= zhi.
// minf and maxf must be monotone in o, both in the direction given by incr.
// NaN evaluations compare false and are treated as infeasible.
template <class FMin, class FMax>
bool hw_range(int64_t qlo, int64_t qhi, bool incr, FMin minf, FMax maxf, float zlo,
              float zhi, int64_t* rlo, int64_t* rhi) {
  auto ge = [&](int64_t o) { return maxf(o) >= zlo; };
  auto le = [&](int64_t o) { return minf(o) <= zhi; };
  int64_t lo, hi;
  if (incr) {
    if (!ge(qhi) || !le(qlo)) return false;
    lo = ge(qlo) ? qlo : hw_least(qlo, qhi, ge);
    hi = le(qhi) ? qhi : hw_greatest(qlo, qhi, le);
  } else {
    if (!ge(qlo) || !le(qhi)) return false;
    hi = ge(qhi) ? qhi : hw_greatest(qlo, qhi, ge);
    lo = le(qlo) ? qlo : hw_least(qlo, qhi, le);
  }
  if (lo > hi) return false;
  *rlo = lo;
  *rhi = hi;
  return true;
}

struct OrdHull {
  bool any = false;
  int64_t lo = 0, hi = 0;
  void add(int64_t l, int64_t h) {
    if (!any) {
      lo = l; hi = h; any = true;
    } else {
      lo = std::min(lo, l);
      hi = std::max(hi, h);
    }
  }
};

// Forward image hull over the corner evaluations; infinities saturate to the
// finite range, an all-non-finite image is empty.
FpInterval hw_forward(BinOp op, const FpInterval& X, const FpInterval& Y) {
  const FloatFormat& fmt = X.format();
  float xl = to_hw_float(X.lo()), xh = to_hw_float(X.hi());
  float yl = to_hw_float(Y.lo()), yh = to_hw_float(Y.hi());
  float lo = 0, hi = 0;
  bool anyv = false;
  auto acc = [&](float v) {
    if (std::isnan(v)) return;
    if (!anyv) {
      lo = hi = v;
      anyv = true;
    } else {
      lo = std::fmin(lo, v);
      hi = std::fmax(hi, v);
    }
  };
  switch (op) {
    case BinOp::Add:
      acc(xl + yl);
      acc(xh + yh);
      break;
    case BinOp::Sub:
      acc(xl - yh);
      acc(xh - yl);
      break;
    case BinOp::Mul:
      acc(xl * yl);
      acc(xl * yh);
      acc(xh * yl);
      acc(xh * yh);
      break;
    case BinOp::Div: {
      // y == 0 never yields a finite quotient; use sign-definite y pieces
      int64_t ylo_o = hw_ord(yl), yhi_o = hw_ord(yh);
      if (yhi_o >= 1) {
        float pl = hw_val(std::max<int64_t>(ylo_o, 1));
        acc(xl / pl);
        acc(xl / yh);
        acc(xh / pl);
        acc(xh / yh);
      }
      if (ylo_o <= -1) {
        float ph = hw_val(std::min<int64_t>(yhi_o, -1));
        acc(xl / yl);
        acc(xl / ph);
        acc(xh / yl);
        acc(xh / ph);
      }
      break;
    }
  }
  if (!anyv || lo == INFINITY || hi == -INFINITY) return FpInterval::empty(fmt);
  FloatValue flo = lo == -INFINITY ? FloatValue::min_finite(fmt) : from_hw_float(lo);
  FloatValue fhi = hi == INFINITY ? FloatValue::max_finite(fmt) : from_hw_float(hi);
  return FpInterval(flo, fhi);
}

bool hw_project_ternary(const Constraint& c, ConstraintStore& store,
                        std::vector<VarId>* changed) {
  bool any = false;
  apply_domain(store, c.z, hw_forward(c.op, store.domain(c.x), store.domain(c.y)),
               changed, &any);
  if (store.failed()) return any;

  const FloatFormat& fmt = store.format();
  const float zlo = to_hw_float(store.domain(c.z).lo());
  const float zhi = to_hw_float(store.domain(c.z).hi());
  const bool z_has_zero = zlo <= 0.0f && 0.0f <= zhi;

  auto apply_hull = [&](VarId v, const OrdHull& h) {
    FpInterval nd = h.any ? FpInterval(from_ordinal(h.lo, fmt), from_ordinal(h.hi, fmt))
                          : FpInterval::empty(fmt);
    apply_domain(store, v, nd, changed, &any);
  };

  switch (c.op) {
    case BinOp::Add:
    case BinOp::Sub: {
      // x side: x (+|-) [ylo, yhi] meets Z; image over y attained at endpoints
      {
        const FpInterval& X = store.domain(c.x);
        const FpInterval& Y = store.domain(c.y);
        float olo = to_hw_float(Y.lo()), ohi = to_hw_float(Y.hi());
        OrdHull h;
        int64_t rl, rh;
        bool add = c.op == BinOp::Add;
        auto minf = [&](int64_t o) { float x = hw_val(o); return add ? x + olo : x - ohi; };
        auto maxf = [&](int64_t o) { float x = hw_val(o); return add ? x + ohi : x - olo; };
        if (hw_range(ordinal(X.lo()), ordinal(X.hi()), true, minf, maxf, zlo, zhi, &rl, &rh))
          h.add(rl, rh);
        apply_hull(c.x, h);
        if (store.failed()) return any;
      }
      // y side: for Sub f = x - y is decreasing in y
      {
        const FpInterval& X = store.domain(c.x);
        const FpInterval& Y = store.domain(c.y);
        float olo = to_hw_float(X.lo()), ohi = to_hw_float(X.hi());
        OrdHull h;
        int64_t rl, rh;
        bool add = c.op == BinOp::Add;
        auto minf = [&](int64_t o) { float y = hw_val(o); return add ? olo + y : olo - y; };
        auto maxf = [&](int64_t o) { float y = hw_val(o); return add ? ohi + y : ohi - y; };
        if (hw_range(ordinal(Y.lo()), ordinal(Y.hi()), add, minf, maxf, zlo, zhi, &rl, &rh))
          h.add(rl, rh);
        apply_hull(c.y, h);
      }
      break;
    }
    case BinOp::Mul: {
      // one side at a time; the other operand is split into sign pieces so
      // the endpoint products are monotone in the projected variable
      auto side = [&](VarId tv, VarId ov) {
        const FpInterval& T = store.domain(tv);
        const FpInterval& O = store.domain(ov);
        int64_t olo_o = ordinal(O.lo()), ohi_o = ordinal(O.hi());
        bool o_has_zero = olo_o <= 0 && 0 <= ohi_o;
        if (o_has_zero && z_has_zero) return;  // t * 0 = 0 lies in Z: no pruning
        int64_t tlo = ordinal(T.lo()), thi = ordinal(T.hi());
        OrdHull h;
        int64_t rl, rh;
        if (ohi_o >= 1) {  // positive piece of O
          float pl = hw_val(std::max<int64_t>(olo_o, 1)), ph = hw_val(ohi_o);
          auto minf = [&](int64_t o) { float t = hw_val(o); return std::fmin(t * pl, t * ph); };
          auto maxf = [&](int64_t o) { float t = hw_val(o); return std::fmax(t * pl, t * ph); };
          if (hw_range(tlo, thi, true, minf, maxf, zlo, zhi, &rl, &rh)) h.add(rl, rh);
        }
        if (olo_o <= -1) {  // negative piece of O
          float pl = hw_val(olo_o), ph = hw_val(std::min<int64_t>(ohi_o, -1));
          auto minf = [&](int64_t o) { float t = hw_val(o); return std::fmin(t * pl, t * ph); };
          auto maxf = [&](int64_t o) { float t = hw_val(o); return std::fmax(t * pl, t * ph); };
          if (hw_range(tlo, thi, false, minf, maxf, zlo, zhi, &rl, &rh)) h.add(rl, rh);
        }
        apply_hull(tv, h);
      };
      side(c.x, c.y);
      if (store.failed()) return any;
      side(c.y, c.x);
      break;
    }
    case BinOp::Div: {
      // x side: x / [sign piece of y] meets Z; monotone in x within a piece
      {
        const FpInterval& X = store.domain(c.x);
        const FpInterval& Y = store.domain(c.y);
        int64_t ylo_o = ordinal(Y.lo()), yhi_o = ordinal(Y.hi());
        int64_t tlo = ordinal(X.lo()), thi = ordinal(X.hi());
        OrdHull h;
        int64_t rl, rh;
        if (yhi_o >= 1) {
          float pl = hw_val(std::max<int64_t>(ylo_o, 1)), ph = hw_val(yhi_o);
          auto minf = [&](int64_t o) { float x = hw_val(o); return std::fmin(x / pl, x / ph); };
          auto maxf = [&](int64_t o) { float x = hw_val(o); return std::fmax(x / pl, x / ph); };
          if (hw_range(tlo, thi, true, minf, maxf, zlo, zhi, &rl, &rh)) h.add(rl, rh);
        }
        if (ylo_o <= -1) {
          float pl = hw_val(ylo_o), ph = hw_val(std::min<int64_t>(yhi_o, -1));
          auto minf = [&](int64_t o) { float x = hw_val(o); return std::fmin(x / pl, x / ph); };
          auto maxf = [&](int64_t o) { float x = hw_val(o); return std::fmax(x / pl, x / ph); };
          if (hw_range(tlo, thi, false, minf, maxf, zlo, zhi, &rl, &rh)) h.add(rl, rh);
        }
        apply_hull(c.x, h);
        if (store.failed()) return any;
      }
      // y side: quotient direction in y is -sign(x); split both by sign.
      // y = 0 never yields a finite quotient, so search only nonzero y.
      {
        const FpInterval& X = store.domain(c.x);
        const FpInterval& Y = store.domain(c.y);
        int64_t xlo_o = ordinal(X.lo()), xhi_o = ordinal(X.hi());
        bool x_has_zero = xlo_o <= 0 && 0 <= xhi_o;
        if (x_has_zero && z_has_zero) break;  // 0 / y = 0 lies in Z: no pruning
        int64_t tlo = ordinal(Y.lo()), thi = ordinal(Y.hi());
        OrdHull h;
        int64_t rl, rh;
        auto quadrant = [&](float xl, float xh, bool incr, int64_t ql, int64_t qh) {
          if (ql > qh) return;
          auto minf = [&](int64_t o) { float y = hw_val(o); return std::fmin(xl / y, xh / y); };
          auto maxf = [&](int64_t o) { float y = hw_val(o); return std::fmax(xl / y, xh / y); };
          if (hw_range(ql, qh, incr, minf, maxf, zlo, zhi, &rl, &rh)) h.add(rl, rh);
        };
        for (int xs = 0; xs < 2; ++xs) {
          float xl, xh;
          bool incr;  // quotient direction in y within the x piece
          if (xs == 0) {
            if (xhi_o < 1) continue;  // no positive x piece
            xl = hw_val(std::max<int64_t>(xlo_o, 1));
            xh = hw_val(xhi_o);
            incr = false;
          } else {
            if (xlo_o > -1) continue;  // no negative x piece
            xl = hw_val(xlo_o);
            xh = hw_val(std::min<int64_t>(xhi_o, -1));
            incr = true;
          }
          quadrant(xl, xh, incr, tlo, std::min<int64_t>(thi, -1));   // y < 0
          quadrant(xl, xh, incr, std::max<int64_t>(tlo, 1), thi);    // y > 0
        }
        apply_hull(c.y, h);
      }
      break;
    }
  }
  return any;
}

bool hw_project_sqrt(const Constraint& c, ConstraintStore& store, std::vector<VarId>* changed) {
  bool any = false;
  const FloatFormat& fmt = store.format();
  {
    const FpInterval& X = store.domain(c.x);
    float xl = to_hw_float(X.lo()), xh = to_hw_float(X.hi());
    FpInterval img = xh < 0.0f
                         ? FpInterval::empty(fmt)
                         : FpInterval(from_hw_float(std::sqrt(xl < 0.0f ? 0.0f : xl)),
                                      from_hw_float(std::sqrt(xh)));
    apply_domain(store, c.z, img, changed, &any);
    if (store.failed()) return any;
  }
  const FpInterval& X = store.domain(c.x);
  const float zlo = to_hw_float(store.domain(c.z).lo());
  const float zhi = to_hw_float(store.domain(c.z).hi());
  // negative x has no square root; search from (-)0 upward
  int64_t qlo = std::max<int64_t>(ordinal(X.lo()), 0), qhi = ordinal(X.hi());
  FpInterval nd = FpInterval::empty(fmt);
  int64_t rl, rh;
  auto f = [&](int64_t o) { return std::sqrt(hw_val(o)); };
  if (qlo <= qhi && hw_range(qlo, qhi, true, f, f, zlo, zhi, &rl, &rh))
    nd = FpInterval(from_ordinal(rl, fmt), from_ordinal(rh, fmt));
  apply_domain(store, c.x, nd, changed, &any);
  return any;
}

bool project_ternary(const Constraint& c, ConstraintStore& store, std::vector<VarId>* changed) {
  if (store.format() == FloatFormat::binary32()) return hw_project_ternary(c, store, changed);
  bool any = false;
  const FpInterval& X = store.domain(c.x);
  const FpInterval& Y = store.domain(c.y);
  FpInterval fwd = forward_eval(c.op, X, Y);
  apply_domain(store, c.z, fwd, changed, &any);
  if (store.failed()) return any;

  const FpInterval& Z = store.domain(c.z);
  RatInterval R = rounding_preimage(Z);
  const FloatFormat& fmt = store.format();
  FloatValue zero = FloatValue::zero(fmt);

  switch (c.op) {
    case BinOp::Add: {
      // x in R - Y ; y in R - X
      {
        const FpInterval& Yd = store.domain(c.y);
        RatInterval S{{true, R.lo.value - to_rational(Yd.hi()), R.lo.open},
                      {true, R.hi.value - to_rational(Yd.lo()), R.hi.open}};
        apply_domain(store, c.x, clip_intersect(store.domain(c.x), S), changed, &any);
        if (store.failed()) return any;
      }
      {
        const FpInterval& Xd = store.domain(c.x);
        RatInterval S{{true, R.lo.value - to_rational(Xd.hi()), R.lo.open},
                      {true, R.hi.value - to_rational(Xd.lo()), R.hi.open}};
        apply_domain(store, c.y, clip_intersect(store.domain(c.y), S), changed, &any);
      }
      break;
    }
    case BinOp::Sub: {
      // x in R + Y ; y in X - R
      {
        const FpInterval& Yd = store.domain(c.y);
        RatInterval S{{true, R.lo.value + to_rational(Yd.lo()), R.lo.open},
                      {true, R.hi.value + to_rational(Yd.hi()), R.hi.open}};
        apply_domain(store, c.x, clip_intersect(store.domain(c.x), S), changed, &any);
        if (store.failed()) return any;
      }
      {
        const FpInterval& Xd = store.domain(c.x);
        RatInterval S{{true, to_rational(Xd.lo()) - R.hi.value, R.hi.open},
                      {true, to_rational(Xd.hi()) - R.lo.value, R.lo.open}};
        apply_domain(store, c.y, clip_intersect(store.domain(c.y), S), changed, &any);
      }
      break;
    }
    case BinOp::Mul: {
      bool zero_in_R = R.contains_zero();
      // x side
      {
        const FpInterval& Yd = store.domain(c.y);
        if (!(Yd.contains(zero) && zero_in_R)) {
          SignPart yp = positive_piece(Yd), yn = negative_piece(Yd);
          bool have = false;
          RatInterval S;
          if (yp.present) {
            S = div_sign_definite(R, yp.lo, yp.hi);
            have = true;
          }
          if (yn.present) {
            RatInterval Sn = div_sign_definite(R, yn.lo, yn.hi);
            S = have ? hull_rat(S, Sn) : Sn;
            have = true;
          }
          FpInterval nd = have ? clip_intersect(store.domain(c.x), S)
                               : FpInterval::empty(fmt);
          apply_domain(store, c.x, nd, changed, &any);
          if (store.failed()) return any;
        }
      }
      // y side
      {
        const FpInterval& Xd = store.domain(c.x);
        if (!(Xd.contains(zero) && zero_in_R)) {
          SignPart xp = positive_piece(Xd), xn = negative_piece(Xd);
          bool have = false;
          RatInterval S;
          if (xp.present) {
            S = div_sign_definite(R, xp.lo, xp.hi);
            have = true;
          }
          if (xn.present) {
            RatInterval Sn = div_sign_definite(R, xn.lo, xn.hi);
            S = have ? hull_rat(S, Sn) : Sn;
            have = true;
          }
          FpInterval nd = have ? clip_intersect(store.domain(c.y), S)
                               : FpInterval::empty(fmt);
          apply_domain(store, c.y, nd, changed, &any);
          if (store.failed()) return any;
        }
      }
      break;
    }
    case BinOp::Div: {
      // x in R * Y (y = 0 contributes nothing: the result is never finite)
      {
        const FpInterval& Yd = store.domain(c.y);
        SignPart yp = positive_piece(Yd), yn = negative_piece(Yd);
        bool have = false;
        RatInterval S;
        if (yp.present) {
          S = mul_sign_definite(R, yp.lo, yp.hi);
          have = true;
        }
        if (yn.present) {
          RatInterval Sn = mul_sign_definite(R, yn.lo, yn.hi);
          S = have ? hull_rat(S, Sn) : Sn;
          have = true;
        }
        FpInterval nd = have ? clip_intersect(store.domain(c.x), S) : FpInterval::empty(fmt);
        apply_domain(store, c.x, nd, changed, &any);
        if (store.failed()) return any;
      }
      // y in X / R, with sign split of R; 0 in R leaves y unconstrained.
      if (!R.contains_zero()) {
        const FpInterval& Xd = store.domain(c.x);
        mpq_class xlo = to_rational(Xd.lo()), xhi = to_rational(Xd.hi());
        RatInterval S;
        if (R.lo.value >= 0) {
          // reciprocal of positive R: [1/hi, 1/lo] (1/lo unbounded at lo == 0)
          RatBound inv_lo{true, mpq_class(1) / R.hi.value, R.hi.open};
          RatBound inv_hi = R.lo.value == 0 ? RatBound{false, mpq_class(0), false}
                                            : RatBound{true, mpq_class(1) / R.lo.value, R.lo.open};
          S = mul_by_reciprocal(xlo, xhi, inv_lo, inv_hi);
        } else {
          // y in X / R = -(X / (-R)); -R is positive
          RatInterval nR = negate_rat(R);
          RatBound inv_lo{true, mpq_class(1) / nR.hi.value, nR.hi.open};
          RatBound inv_hi = nR.lo.value == 0
                                ? RatBound{false, mpq_class(0), false}
                                : RatBound{true, mpq_class(1) / nR.lo.value, nR.lo.open};
          S = negate_rat(mul_by_reciprocal(xlo, xhi, inv_lo, inv_hi));
        }
        apply_domain(store, c.y, clip_intersect(store.domain(c.y), S), changed, &any);
      }
      break;
    }
  }
  return any;
}

bool project_sqrt(const Constraint& c, ConstraintStore& store, std::vector<VarId>* changed) {
  if (store.format() == FloatFormat::binary32()) return hw_project_sqrt(c, store, changed);
  bool any = false;
  apply_domain(store, c.z, forward_sqrt(store.domain(c.x)), changed, &any);
  if (store.failed()) return any;
  RatInterval R = rounding_preimage(store.domain(c.z));
  // sqrt(x) >= 0; clamp the preimage before squaring.
  RatBound lo = R.lo;
  if (lo.value < 0) lo = {true, mpq_class(0), false};
  RatInterval S{{true, mpq_class(lo.value * lo.value), lo.open},
                {true, mpq_class(R.hi.value * R.hi.value), R.hi.open}};
  apply_domain(store, c.x, clip_intersect(store.domain(c.x), S), changed, &any);
  return any;
}

bool project_neg(const Constraint& c, ConstraintStore& store, std::vector<VarId>* changed) {
  bool any = false;
  apply_domain(store, c.z, negate(store.domain(c.x)), changed, &any);
  if (store.failed()) return any;
  apply_domain(store, c.x, negate(store.domain(c.z)), changed, &any);
  return any;
}

bool project_assign(const Constraint& c, ConstraintStore& store, std::vector<VarId>* changed) {
  bool any = false;
  apply_domain(store, c.z, store.domain(c.x), changed, &any);
  if (store.failed()) return any;
  apply_domain(store, c.x, store.domain(c.z), changed, &any);
  return any;
}

// Clip X's upper bound to (hi of Y) + offset ordinals and Y's lower bound to
// (lo of X) - offset, the standard bound-consistency rule for x < y / x <= y.
bool clip_less(ConstraintStore& store, VarId xv, VarId yv, int64_t strict,
               std::vector<VarId>* changed) {
  bool any = false;
  const FloatFormat& fmt = store.format();
  int64_t maxo = static_cast<int64_t>(fmt.max_finite_magnitude());
  {
    const FpInterval& X = store.domain(xv);
    const FpInterval& Y = store.domain(yv);
    int64_t new_hi = ordinal(Y.hi()) - strict;
    if (new_hi < -maxo || new_hi < ordinal(X.lo())) {
      apply_domain(store, xv, FpInterval::empty(fmt), changed, &any);
      return any;
    }
    if (new_hi < ordinal(X.hi()))
      apply_domain(store, xv, FpInterval(X.lo(), from_ordinal(new_hi, fmt)), changed, &any);
    if (store.failed()) return any;
  }
  {
    const FpInterval& X = store.domain(xv);
    const FpInterval& Y = store.domain(yv);
    int64_t new_lo = ordinal(X.lo()) + strict;
    if (new_lo > maxo || new_lo > ordinal(Y.hi())) {
      apply_domain(store, yv, FpInterval::empty(fmt), changed, &any);
      return any;
    }
    if (new_lo > ordinal(Y.lo()))
      apply_domain(store, yv, FpInterval(from_ordinal(new_lo, fmt), Y.hi()), changed, &any);
  }
  return any;
}

bool project_compare(const Constraint& c, ConstraintStore& store, std::vector<VarId>* changed) {
  bool any = false;
  const FloatFormat& fmt = store.format();
  switch (c.rel) {
    case RelOp::Lt: return clip_less(store, c.x, c.y, 1, changed);
    case RelOp::Le: return clip_less(store, c.x, c.y, 0, changed);
    case RelOp::Gt: return clip_less(store, c.y, c.x, 1, changed);
    case RelOp::Ge: return clip_less(store, c.y, c.x, 0, changed);
    case RelOp::Eq: {
      FpInterval both = intersect(store.domain(c.x), store.domain(c.y));
      apply_domain(store, c.x, both, changed, &any);
      if (store.failed()) return any;
      apply_domain(store, c.y, both, changed, &any);
      return any;
    }
    case RelOp::Ne: {
      // prune only a singleton equal to the other side's bound
      auto prune = [&](VarId sv, VarId ov) {
        const FpInterval& S = store.domain(sv);
        if (!S.is_singleton() || store.failed()) return;
        const FpInterval& O = store.domain(ov);
        if (O.is_empty()) return;
        int64_t s = ordinal(S.lo()), lo = ordinal(O.lo()), hi = ordinal(O.hi());
        if (s == lo && s == hi) {
          apply_domain(store, ov, FpInterval::empty(fmt), changed, &any);
        } else if (s == lo) {
          apply_domain(store, ov, FpInterval(from_ordinal(lo + 1, fmt), O.hi()), changed, &any);
        } else if (s == hi) {
          apply_domain(store, ov, FpInterval(O.lo(), from_ordinal(hi - 1, fmt)), changed, &any);
        }
      };
      prune(c.x, c.y);
      prune(c.y, c.x);
      return any;
    }
  }
  return any;
}

}  // namespace

bool backward_project(const Constraint& c, ConstraintStore& store, std::vector<VarId>* changed) {
  if (store.failed()) return false;
  switch (c.kind) {
    case Constraint::Kind::Ternary: return project_ternary(c, store, changed);
    case Constraint::Kind::Sqrt: return project_sqrt(c, store, changed);
    case Constraint::Kind::Neg: return project_neg(c, store, changed);
    case Constraint::Kind::Assign: return project_assign(c, store, changed);
    case Constraint::Kind::Compare: return project_compare(c, store, changed);
  }
  return false;
}

namespace {

// On big formats a domain only re-enters the worklist after a sizeable
// cumulative shrink or once it collapses to (near) a point; this damps the
// ulp-by-ulp crawl that interval propagation is prone to on binary32. Small
// formats (the enumerable test oracles) always reach the exact fixpoint.
constexpr uint64_t kExactFixpointFormat = 1 << 16;  // finite_count at most this

// Hard ceilings per propagation call on big formats; they keep the worst-case
// cost of a single search node bounded even when a slow ulp-by-ulp
// convergence gets through. Stopping early is sound (domains stay correct).
// Hardware projections are cheap enough to requeue on every change, so
// binary32 runs to the exact fixpoint in all but pathological cases.
constexpr uint64_t kMaxProjectionsPerCall = 4096;
constexpr uint64_t kMaxProjectionsHw = 1 << 17;

bool worth_requeuing(uint64_t ref_count, uint64_t new_count) {
  if (new_count <= 2) return true;
  return new_count * 4 <= ref_count * 3;  // at least 25% fewer floats
}

PropagateStats propagate_worklist(ConstraintStore& store, std::deque<uint32_t> queue,
                                  std::vector<char> queued, PropagationEffort effort) {
  PropagateStats stats;
  const bool small = store.format().finite_count() <= kExactFixpointFormat;
  const bool hw = store.format() == FloatFormat::binary32() &&
                  effort == PropagationEffort::Exact;
  const bool exact = small || hw;
  const uint64_t cap =
      small ? std::numeric_limits<uint64_t>::max() : (hw ? kMaxProjectionsHw : kMaxProjectionsPerCall);
  // count at the last requeue caused by each variable
  std::vector<uint64_t> ref(store.num_vars());
  for (VarId v = 0; v < store.num_vars(); ++v) ref[v] = store.domain(v).count();
  std::vector<VarId> changed;
  while (!queue.empty()) {
    if (stats.projections >= cap) break;
    uint32_t ci = queue.front();
    queue.pop_front();
    queued[ci] = 0;
    changed.clear();
    ++stats.projections;
    backward_project(store.constraints()[ci], store, &changed);
    if (store.failed()) return stats;
    for (VarId v : changed) {
      uint64_t nc = store.domain(v).count();
      if (!exact && !worth_requeuing(ref[v], nc)) continue;
      ref[v] = nc;
      for (uint32_t w : store.watchers(v))
        if (!queued[w]) {
          queued[w] = 1;
          queue.push_back(w);
        }
    }
  }
  return stats;
}

}  // namespace

PropagateStats propagate_2b(ConstraintStore& store, PropagationEffort effort) {
  if (store.failed()) return {};
  const size_t n = store.constraints().size();
  std::deque<uint32_t> queue;
  for (uint32_t i = 0; i < n; ++i) queue.push_back(i);
  return propagate_worklist(store, std::move(queue), std::vector<char>(n, 1), effort);
}

PropagateStats propagate_2b(ConstraintStore& store, const std::vector<VarId>& seed_vars,
                            PropagationEffort effort) {
  if (store.failed()) return {};
  const size_t n = store.constraints().size();
  std::vector<char> queued(n, 0);
  std::deque<uint32_t> queue;
  for (VarId v : seed_vars)
    for (uint32_t w : store.watchers(v))
      if (!queued[w]) {
        queued[w] = 1;
        queue.push_back(w);
      }
  return propagate_worklist(store, std::move(queue), std::move(queued), effort);
}

PropagateStats filter_3b(ConstraintStore& store, double slice_fraction, PropagationEffort effort) {
  PropagateStats stats;
  PropagateStats p = propagate_2b(store, effort);
  stats.projections += p.projections;
  if (store.failed()) return stats;

  const FloatFormat& fmt = store.format();
  mpq_class frac(slice_fraction);
  bool improved = true;
  while (improved) {
    improved = false;
    for (VarId v = 0; v < store.num_vars(); ++v) {
      for (int side = 0; side < 2; ++side) {
        while (true) {
          const FpInterval& d = store.domain(v);
          if (d.is_empty()) return stats;
          if (d.count() <= 1) break;  // singleton slice equals the 2B-consistent point
          mpq_class w = d.width() * frac;
          int64_t lo_o = ordinal(d.lo()), hi_o = ordinal(d.hi());
          FpInterval slice = FpInterval::empty(fmt);
          int64_t cut_ord;
          if (side == 0) {
            auto s = float_below(to_rational(d.lo()) + w, fmt, false);
            cut_ord = s ? std::clamp(ordinal(*s), lo_o, hi_o) : lo_o;
            slice = FpInterval(d.lo(), from_ordinal(cut_ord, fmt));
          } else {
            auto s = float_above(to_rational(d.hi()) - w, fmt, false);
            cut_ord = s ? std::clamp(ordinal(*s), lo_o, hi_o) : hi_o;
            slice = FpInterval(from_ordinal(cut_ord, fmt), d.hi());
          }
          ConstraintStore trial = store;
          trial.set_domain(v, slice);
          p = propagate_2b(trial, {v}, effort);
          stats.projections += p.projections;
          if (!trial.failed()) break;
          // the boundary slice is infeasible; remove it
          FpInterval rest =
              side == 0
                  ? (cut_ord + 1 > hi_o ? FpInterval::empty(fmt)
                                        : FpInterval(from_ordinal(cut_ord + 1, fmt), d.hi()))
                  : (cut_ord - 1 < lo_o ? FpInterval::empty(fmt)
                                        : FpInterval(d.lo(), from_ordinal(cut_ord - 1, fmt)));
          store.set_domain(v, rest);
          if (store.failed()) return stats;
          p = propagate_2b(store, {v}, effort);
          stats.projections += p.projections;
          if (store.failed()) return stats;
          improved = true;
        }
      }
    }
  }
  return stats;
}

}  // namespace fpsolve
