#include "fpsolve/interval.hpp"

#include <algorithm>
#include <cassert>

namespace fpsolve {

namespace {

// Scans for tight bounds near the overflow boundary give up past this many
// steps and saturate to the max finite value (sound, possibly not attained).
// Tiny oracle formats always finish well under the cap.
constexpr int kScanCap = 1 << 16;

struct OrdAcc {
  bool any = false;
  int64_t lo = 0, hi = 0;
  void add(const FloatValue& v) {
    int64_t o = ordinal(v);
    if (!any) {
      lo = hi = o;
      any = true;
    } else {
      lo = std::min(lo, o);
      hi = std::max(hi, o);
    }
  }
  void add(const FpInterval& iv) {
    if (iv.is_empty()) return;
    add(iv.lo());
    add(iv.hi());
  }
};

FloatValue round_in_range(const mpq_class& r, const FloatFormat& fmt) {
  Rounded rr = round_nearest_even(r, fmt);
  assert(rr.finite());
  return rr.value;
}

}  // namespace

mpq_class FpInterval::width() const {
  if (empty_ || is_singleton()) return mpq_class(0);
  return to_rational(hi_) - to_rational(lo_);
}

bool FpInterval::operator==(const FpInterval& o) const {
  if (format() != o.format()) return false;
  if (empty_ || o.empty_) return empty_ == o.empty_;
  return lo_ == o.lo_ && hi_ == o.hi_;
}

std::string FpInterval::to_string() const {
  if (empty_) return "[]";
  return "[" + to_decimal_string(lo_) + ", " + to_decimal_string(hi_) + "] {bits: " +
         to_hex_string(lo_) + ", " + to_hex_string(hi_) + "}";
}

FpInterval hull(const FpInterval& a, const FpInterval& b) {
  if (a.is_empty()) return b;
  if (b.is_empty()) return a;
  const FloatFormat& fmt = a.format();
  int64_t lo = std::min(ordinal(a.lo()), ordinal(b.lo()));
  int64_t hi = std::max(ordinal(a.hi()), ordinal(b.hi()));
  return FpInterval(from_ordinal(lo, fmt), from_ordinal(hi, fmt));
}

FpInterval negate(const FpInterval& a) {
  if (a.is_empty()) return a;
  return FpInterval(fp_neg(a.hi()), fp_neg(a.lo()));
}

namespace {

// Max finite round(x + y) over the box, assuming some pair is finite and the
// top corner overflows positive.
FloatValue tight_hi_add(const FpInterval& X, const FpInterval& Y) {
  const FloatFormat& fmt = X.format();
  const mpq_class& T = fmt.overflow_threshold();
  mpq_class yhi = to_rational(Y.hi());
  OrdAcc best;
  FloatValue x = X.hi();
  for (int iters = 0; ; ++iters) {
    if (iters >= kScanCap) return FloatValue::max_finite(fmt);  // saturate
    mpq_class xv = to_rational(x);
    if (xv + yhi < T) {
      best.add(round_in_range(xv + yhi, fmt));
      break;
    }
    auto ystar = float_below(T - xv, fmt, /*strict=*/true);
    if (ystar && ordinal(*ystar) >= ordinal(Y.lo()))
      best.add(round_in_range(xv + to_rational(*ystar), fmt));
    if (x == X.lo()) break;
    x = pred(x);
  }
  assert(best.any);
  return from_ordinal(best.hi, fmt);
}

// Image bounds of round(x + y) over X x Y; empty when everything overflows.
FpInterval fwd_add(const FpInterval& X, const FpInterval& Y) {
  const FloatFormat& fmt = X.format();
  const mpq_class& T = fmt.overflow_threshold();
  mpq_class rlo = to_rational(X.lo()) + to_rational(Y.lo());
  mpq_class rhi = to_rational(X.hi()) + to_rational(Y.hi());
  if (rlo >= T || rhi <= -T) return FpInterval::empty(fmt);

  Rounded top = round_nearest_even(rhi, fmt);
  FloatValue hi = top.finite() ? top.value : tight_hi_add(X, Y);
  Rounded bot = round_nearest_even(rlo, fmt);
  FloatValue lo = bot.finite() ? bot.value
                               : fp_neg(tight_hi_add(negate(X), negate(Y)));
  return FpInterval(lo, hi);
}

// Max finite round(a * b) over positive boxes whose top corner overflows.
FloatValue tight_hi_mul(const FpInterval& A, const FpInterval& B) {
  const FloatFormat& fmt = A.format();
  const mpq_class& T = fmt.overflow_threshold();
  mpq_class bhi = to_rational(B.hi());
  OrdAcc best;
  FloatValue a = A.hi();
  for (int iters = 0; ; ++iters) {
    if (iters >= kScanCap) return FloatValue::max_finite(fmt);
    mpq_class av = to_rational(a);
    if (av * bhi < T) {
      best.add(round_in_range(av * bhi, fmt));
      break;
    }
    auto bstar = float_below(T / av, fmt, /*strict=*/true);
    if (bstar && ordinal(*bstar) >= ordinal(B.lo()))
      best.add(round_in_range(av * to_rational(*bstar), fmt));
    if (a == A.lo()) break;
    a = pred(a);
  }
  assert(best.any);
  return from_ordinal(best.hi, fmt);
}

// Image of round(a * b) over strictly positive A, B.
FpInterval quad_mul(const FpInterval& A, const FpInterval& B) {
  const FloatFormat& fmt = A.format();
  const mpq_class& T = fmt.overflow_threshold();
  mpq_class rlo = to_rational(A.lo()) * to_rational(B.lo());
  if (rlo >= T) return FpInterval::empty(fmt);
  mpq_class rhi = to_rational(A.hi()) * to_rational(B.hi());
  Rounded top = round_nearest_even(rhi, fmt);
  FloatValue hi = top.finite() ? top.value : tight_hi_mul(A, B);
  return FpInterval(round_in_range(rlo, fmt), hi);
}

// Max finite round(a / b) over positive boxes whose (a_hi, b_lo) corner
// overflows.
FloatValue tight_hi_div(const FpInterval& A, const FpInterval& B) {
  const FloatFormat& fmt = A.format();
  const mpq_class& T = fmt.overflow_threshold();
  mpq_class ahi = to_rational(A.hi());
  OrdAcc best;
  FloatValue b = B.lo();
  for (int iters = 0; ; ++iters) {
    if (iters >= kScanCap) return FloatValue::max_finite(fmt);
    mpq_class bv = to_rational(b);
    if (ahi / bv < T) {
      best.add(round_in_range(ahi / bv, fmt));
      break;
    }
    auto astar = float_below(T * bv, fmt, /*strict=*/true);
    if (astar && ordinal(*astar) >= ordinal(A.lo()))
      best.add(round_in_range(to_rational(*astar) / bv, fmt));
    if (b == B.hi()) break;
    b = succ(b);
  }
  assert(best.any);
  return from_ordinal(best.hi, fmt);
}

// Image of round(a / b) over strictly positive A, B.
FpInterval quad_div(const FpInterval& A, const FpInterval& B) {
  const FloatFormat& fmt = A.format();
  const mpq_class& T = fmt.overflow_threshold();
  mpq_class rlo = to_rational(A.lo()) / to_rational(B.hi());
  if (rlo >= T) return FpInterval::empty(fmt);
  mpq_class rhi = to_rational(A.hi()) / to_rational(B.lo());
  Rounded top = round_nearest_even(rhi, fmt);
  FloatValue hi = top.finite() ? top.value : tight_hi_div(A, B);
  return FpInterval(round_in_range(rlo, fmt), hi);
}

// Positive and negative parts, as magnitudes for the negative side.
FpInterval positive_part(const FpInterval& X) {
  const FloatFormat& fmt = X.format();
  if (X.is_empty() || ordinal(X.hi()) < 1) return FpInterval::empty(fmt);
  return FpInterval(from_ordinal(std::max<int64_t>(ordinal(X.lo()), 1), fmt), X.hi());
}

FpInterval negative_magnitudes(const FpInterval& X) {
  return positive_part(negate(X));
}

FpInterval fwd_mul(const FpInterval& X, const FpInterval& Y) {
  const FloatFormat& fmt = X.format();
  OrdAcc acc;
  if (X.contains(FloatValue::zero(fmt)) || Y.contains(FloatValue::zero(fmt)))
    acc.add(FloatValue::zero(fmt));
  FpInterval xp = positive_part(X), xn = negative_magnitudes(X);
  FpInterval yp = positive_part(Y), yn = negative_magnitudes(Y);
  if (!xp.is_empty() && !yp.is_empty()) acc.add(quad_mul(xp, yp));
  if (!xn.is_empty() && !yn.is_empty()) acc.add(quad_mul(xn, yn));
  if (!xp.is_empty() && !yn.is_empty()) acc.add(negate(quad_mul(xp, yn)));
  if (!xn.is_empty() && !yp.is_empty()) acc.add(negate(quad_mul(xn, yp)));
  if (!acc.any) return FpInterval::empty(fmt);
  return FpInterval(from_ordinal(acc.lo, fmt), from_ordinal(acc.hi, fmt));
}

FpInterval fwd_div(const FpInterval& X, const FpInterval& Y) {
  const FloatFormat& fmt = X.format();
  OrdAcc acc;
  FpInterval yp = positive_part(Y), yn = negative_magnitudes(Y);
  if (X.contains(FloatValue::zero(fmt)) && (!yp.is_empty() || !yn.is_empty()))
    acc.add(FloatValue::zero(fmt));
  FpInterval xp = positive_part(X), xn = negative_magnitudes(X);
  if (!xp.is_empty() && !yp.is_empty()) acc.add(quad_div(xp, yp));
  if (!xn.is_empty() && !yn.is_empty()) acc.add(quad_div(xn, yn));
  if (!xp.is_empty() && !yn.is_empty()) acc.add(negate(quad_div(xp, yn)));
  if (!xn.is_empty() && !yp.is_empty()) acc.add(negate(quad_div(xn, yp)));
  if (!acc.any) return FpInterval::empty(fmt);
  return FpInterval(from_ordinal(acc.lo, fmt), from_ordinal(acc.hi, fmt));
}

}  // namespace

FpInterval forward_eval(BinOp op, const FpInterval& X, const FpInterval& Y) {
  if (X.format() != Y.format()) throw std::invalid_argument("mixed-format operands");
  const FloatFormat& fmt = X.format();
  if (X.is_empty() || Y.is_empty()) return FpInterval::empty(fmt);
  switch (op) {
    case BinOp::Add: return fwd_add(X, Y);
    case BinOp::Sub: return fwd_add(X, negate(Y));
    case BinOp::Mul: return fwd_mul(X, Y);
    case BinOp::Div: return fwd_div(X, Y);
  }
  return FpInterval::empty(fmt);
}

FpInterval forward_sqrt(const FpInterval& X) {
  const FloatFormat& fmt = X.format();
  if (X.is_empty() || ordinal(X.hi()) < 0) return FpInterval::empty(fmt);
  FloatValue lo_clip =
      ordinal(X.lo()) < 0 ? FloatValue::zero(fmt) : X.lo();
  FloatValue lo = *fp_sqrt(lo_clip);
  FloatValue hi = *fp_sqrt(X.hi());
  return FpInterval(lo, hi);
}

}  // namespace fpsolve
