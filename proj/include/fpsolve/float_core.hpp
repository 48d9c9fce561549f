#ifndef FPSOLVE_FLOAT_CORE_HPP
#define FPSOLVE_FLOAT_CORE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace fpsolve {

/// Thrown when succ/pred would step past the finite range.
struct OverflowBoundary : std::runtime_error {
  explicit OverflowBoundary(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an operation requiring a finite value receives NaN or infinity.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// A parametric IEEE-style binary format: sign bit, `exponent_bits` exponent
/// bits, `mantissa_bits` explicit fraction bits. binary32 is (8, 23).
/// Tiny instances such as (4, 3) are enumerable and serve as test oracles.
class FloatFormat {
 public:
  FloatFormat(int exponent_bits, int mantissa_bits, std::string name);

  int exponent_bits() const { return exponent_bits_; }
  int mantissa_bits() const { return mantissa_bits_; }
  const std::string& name() const { return name_; }

  int width() const { return 1 + exponent_bits_ + mantissa_bits_; }
  int bias() const { return (1 << (exponent_bits_ - 1)) - 1; }
  int max_biased_exp() const { return (1 << exponent_bits_) - 2; }
  int min_exp() const { return 1 - bias(); }  // unbiased exponent of smallest normal

  uint64_t sign_mask() const { return uint64_t{1} << (exponent_bits_ + mantissa_bits_); }
  uint64_t mantissa_mask() const { return (uint64_t{1} << mantissa_bits_) - 1; }
  uint64_t max_finite_magnitude() const {
    return (uint64_t(max_biased_exp()) << mantissa_bits_) | mantissa_mask();
  }

  // Number of distinct finite values with -0 and +0 collapsed.
  uint64_t finite_count() const { return 2 * max_finite_magnitude() + 1; }

  // Smallest positive real that rounds to infinity under nearest-even:
  // 2^emax * (2 - 2^-(mantissa_bits+1)).
  const mpq_class& overflow_threshold() const { return overflow_threshold_; }
  const mpq_class& max_finite_value() const { return max_finite_value_; }

  bool operator==(const FloatFormat& o) const {
    return exponent_bits_ == o.exponent_bits_ && mantissa_bits_ == o.mantissa_bits_;
  }
  bool operator!=(const FloatFormat& o) const { return !(*this == o); }

  static const FloatFormat& binary32();

 private:
  int exponent_bits_;
  int mantissa_bits_;
  std::string name_;
  mpq_class overflow_threshold_;
  mpq_class max_finite_value_;
};

enum class FloatClass { Zero, Subnormal, Normal, Infinity, NaN };

/// A value in a FloatFormat, identified by its bit pattern. The format is
/// referenced, not owned; formats must outlive their values.
class FloatValue {
 public:
  FloatValue() : bits_(0), fmt_(&FloatFormat::binary32()) {}
  FloatValue(uint64_t bits, const FloatFormat& fmt) : bits_(bits), fmt_(&fmt) {}

  uint64_t bits() const { return bits_; }
  const FloatFormat& format() const { return *fmt_; }

  bool sign() const { return (bits_ & fmt_->sign_mask()) != 0; }
  uint64_t magnitude() const { return bits_ & ~fmt_->sign_mask(); }
  uint64_t biased_exp() const { return magnitude() >> fmt_->mantissa_bits(); }
  uint64_t mantissa() const { return bits_ & fmt_->mantissa_mask(); }

  FloatClass classify() const {
    uint64_t be = biased_exp();
    if (be == uint64_t(fmt_->max_biased_exp()) + 1)
      return mantissa() == 0 ? FloatClass::Infinity : FloatClass::NaN;
    if (be == 0) return mantissa() == 0 ? FloatClass::Zero : FloatClass::Subnormal;
    return FloatClass::Normal;
  }
  bool is_finite() const { return biased_exp() <= uint64_t(fmt_->max_biased_exp()); }
  bool is_zero() const { return magnitude() == 0; }

  /// Equality in ordinal space: same format, same bits, with -0 == +0.
  bool operator==(const FloatValue& o) const {
    return *fmt_ == *o.fmt_ && (bits_ == o.bits_ || (is_zero() && o.is_zero()));
  }
  bool operator!=(const FloatValue& o) const { return !(*this == o); }

  static FloatValue zero(const FloatFormat& fmt) { return FloatValue(0, fmt); }
  static FloatValue max_finite(const FloatFormat& fmt) {
    return FloatValue(fmt.max_finite_magnitude(), fmt);
  }
  static FloatValue min_finite(const FloatFormat& fmt) {
    return FloatValue(fmt.sign_mask() | fmt.max_finite_magnitude(), fmt);
  }

 private:
  uint64_t bits_;
  const FloatFormat* fmt_;
};

/// Strictly monotone bijection from finite floats (with the two zeros
/// collapsed) onto a contiguous signed range; ordinal(0) = 0.
inline int64_t ordinal(const FloatValue& x) {
  if (!x.is_finite()) throw DomainError("ordinal of non-finite value");
  int64_t mag = static_cast<int64_t>(x.magnitude());
  return x.sign() ? -mag : mag;
}

inline FloatValue from_ordinal(int64_t o, const FloatFormat& fmt) {
  int64_t max_mag = static_cast<int64_t>(fmt.max_finite_magnitude());
  if (o > max_mag || o < -max_mag) throw OverflowBoundary("ordinal out of finite range");
  if (o >= 0) return FloatValue(static_cast<uint64_t>(o), fmt);
  return FloatValue(fmt.sign_mask() | static_cast<uint64_t>(-o), fmt);
}

/// Smallest finite float strictly greater than x.
/// Throws OverflowBoundary at max finite, DomainError on NaN/infinity.
inline FloatValue succ(const FloatValue& x) {
  if (!x.is_finite()) throw DomainError("succ of non-finite value");
  int64_t o = ordinal(x);
  if (o == static_cast<int64_t>(x.format().max_finite_magnitude()))
    throw OverflowBoundary("succ of max finite value");
  return from_ordinal(o + 1, x.format());
}

/// Largest finite float strictly less than x; mirror of succ.
inline FloatValue pred(const FloatValue& x) {
  if (!x.is_finite()) throw DomainError("pred of non-finite value");
  int64_t o = ordinal(x);
  if (o == -static_cast<int64_t>(x.format().max_finite_magnitude()))
    throw OverflowBoundary("pred of min finite value");
  return from_ordinal(o - 1, x.format());
}

/// Exact rational value of a finite float.
mpq_class to_rational(const FloatValue& x);

/// Result of rounding an exact rational: a finite float or a signed
/// overflow marker (there is no NaN case; rationals are never NaN).
struct Rounded {
  enum class Kind { Finite, OverflowPos, OverflowNeg };
  Kind kind;
  FloatValue value;  // meaningful iff kind == Finite

  bool finite() const { return kind == Kind::Finite; }
};

/// Round-to-nearest, ties to even mantissa. Total on exact rationals;
/// magnitudes at or beyond the overflow threshold yield a marker.
Rounded round_nearest_even(const mpq_class& r, const FloatFormat& fmt);

/// Exact decimal (or decimal-exponent) literal to rational. Accepts
/// e.g. "1.5", "-1e-5", "156.25001". Throws std::invalid_argument.
mpq_class parse_decimal(const std::string& text);

/// Nearest-even parse of a decimal literal into fmt.
Rounded parse_float(const std::string& text, const FloatFormat& fmt);

/// Largest float <= r (or < r when strict). nullopt when every float is above r.
std::optional<FloatValue> float_below(const mpq_class& r, const FloatFormat& fmt, bool strict);
/// Smallest float >= r (or > r when strict). nullopt when every float is below r.
std::optional<FloatValue> float_above(const mpq_class& r, const FloatFormat& fmt, bool strict);

/// Shortest decimal string that re-parses (nearest-even) to the same bits.
std::string to_decimal_string(const FloatValue& x);
/// Exact bit pattern, zero-padded to the format width, e.g. "0x40B08F2F".
std::string to_hex_string(const FloatValue& x);

enum class BinOp { Add, Sub, Mul, Div };

/// Correctly rounded binary operation on finite operands. nullopt when the
/// result is not a finite float (overflow, division by zero, 0/0).
/// binary32 uses hardware arithmetic; other formats go through the exact
/// rational path. fp_bin_soft forces the rational path for any format.
std::optional<FloatValue> fp_bin(BinOp op, const FloatValue& a, const FloatValue& b);
std::optional<FloatValue> fp_bin_soft(BinOp op, const FloatValue& a, const FloatValue& b);

/// Correctly rounded square root of a finite nonnegative float; nullopt for
/// negative input.
std::optional<FloatValue> fp_sqrt(const FloatValue& a);

/// Exact negation (sign-bit flip).
FloatValue fp_neg(const FloatValue& a);

// binary32 <-> hardware float bridge.
float to_hw_float(const FloatValue& x);
FloatValue from_hw_float(float f);

}  // namespace fpsolve

#endif  // FPSOLVE_FLOAT_CORE_HPP
