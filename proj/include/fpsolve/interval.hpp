#ifndef FPSOLVE_INTERVAL_HPP
#define FPSOLVE_INTERVAL_HPP

#include <cstdint>
#include <string>

#include "fpsolve/float_core.hpp"

namespace fpsolve {

/// Closed interval of finite floats in one format; the solver's domain
/// representation. The empty interval is a distinct sentinel.
class FpInterval {
 public:
  FpInterval(FloatValue lo, FloatValue hi) : lo_(lo), hi_(hi), empty_(false) {
    if (lo.format() != hi.format()) throw std::invalid_argument("mixed-format interval");
    if (!lo.is_finite() || !hi.is_finite()) throw DomainError("non-finite interval bound");
    if (ordinal(lo) > ordinal(hi)) throw std::invalid_argument("interval lo > hi");
  }

  static FpInterval empty(const FloatFormat& fmt) {
    FpInterval iv(FloatValue::zero(fmt), FloatValue::zero(fmt));
    iv.empty_ = true;
    return iv;
  }
  static FpInterval full(const FloatFormat& fmt) {
    return FpInterval(FloatValue::min_finite(fmt), FloatValue::max_finite(fmt));
  }
  static FpInterval singleton(const FloatValue& v) { return FpInterval(v, v); }

  bool is_empty() const { return empty_; }
  const FloatValue& lo() const { return lo_; }
  const FloatValue& hi() const { return hi_; }
  const FloatFormat& format() const { return lo_.format(); }

  bool contains(const FloatValue& v) const {
    if (empty_) return false;
    int64_t o = ordinal(v);
    return ordinal(lo_) <= o && o <= ordinal(hi_);
  }
  bool is_singleton() const { return !empty_ && lo_ == hi_; }

  /// Number of floats in the interval (0 for empty).
  uint64_t count() const {
    if (empty_) return 0;
    return static_cast<uint64_t>(ordinal(hi_) - ordinal(lo_)) + 1;
  }
  /// hi - lo as an exact real (0 for empty and singletons).
  mpq_class width() const;

  bool operator==(const FpInterval& o) const;
  bool operator!=(const FpInterval& o) const { return !(*this == o); }

  /// `[lo, hi]` in shortest decimals plus the exact bit patterns.
  std::string to_string() const;

 private:
  FloatValue lo_, hi_;
  bool empty_;
};

inline FpInterval intersect(const FpInterval& a, const FpInterval& b) {
  const FloatFormat& fmt = a.format();
  if (a.is_empty() || b.is_empty()) return FpInterval::empty(fmt);
  int64_t lo = std::max(ordinal(a.lo()), ordinal(b.lo()));
  int64_t hi = std::min(ordinal(a.hi()), ordinal(b.hi()));
  if (lo > hi) return FpInterval::empty(fmt);
  return FpInterval(from_ordinal(lo, fmt), from_ordinal(hi, fmt));
}
FpInterval hull(const FpInterval& a, const FpInterval& b);
/// Exact negation: [-hi, -lo].
FpInterval negate(const FpInterval& a);

/// Smallest interval containing { round(x op y) : x in X, y in Y, finite }.
/// Bounds are attained; an all-non-finite image yields the empty interval.
FpInterval forward_eval(BinOp op, const FpInterval& X, const FpInterval& Y);

/// Image of correctly rounded sqrt over X clipped to [0, max]; empty when X
/// is entirely negative.
FpInterval forward_sqrt(const FpInterval& X);

}  // namespace fpsolve

#endif  // FPSOLVE_INTERVAL_HPP
