#include "fpsolve/float_core.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace fpsolve {

namespace {

mpz_class pow2(long e) {
  mpz_class z;
  mpz_ui_pow_ui(z.get_mpz_t(), 2, static_cast<unsigned long>(e));
  return z;
}

// 2^e as a rational, e possibly negative.
mpq_class pow2q(long e) {
  if (e >= 0) return mpq_class(pow2(e));
  mpq_class q(1, 1);
  q /= pow2(-e);
  return q;
}

}  // namespace

FloatFormat::FloatFormat(int exponent_bits, int mantissa_bits, std::string name)
    : exponent_bits_(exponent_bits), mantissa_bits_(mantissa_bits), name_(std::move(name)) {
  if (exponent_bits_ < 2 || mantissa_bits_ < 1 || width() > 63)
    throw std::invalid_argument("unsupported float format (" + std::to_string(exponent_bits) +
                                "," + std::to_string(mantissa_bits) + ")");
  int emax = max_biased_exp() - bias();
  // max finite = 2^emax * (2 - 2^-m); threshold = 2^emax * (2 - 2^-(m+1))
  max_finite_value_ = pow2q(emax) * (mpq_class(2) - pow2q(-mantissa_bits_));
  overflow_threshold_ = pow2q(emax) * (mpq_class(2) - pow2q(-(mantissa_bits_ + 1)));
}

const FloatFormat& FloatFormat::binary32() {
  static const FloatFormat fmt(8, 23, "binary32");
  return fmt;
}

mpq_class to_rational(const FloatValue& x) {
  if (!x.is_finite()) throw DomainError("to_rational of non-finite value");
  const FloatFormat& fmt = x.format();
  int m = fmt.mantissa_bits();
  uint64_t be = x.biased_exp();
  uint64_t man = x.mantissa();
  uint64_t sig;
  long qe;  // value = sig * 2^qe
  if (be == 0) {
    sig = man;
    qe = fmt.min_exp() - m;
  } else {
    sig = man | (uint64_t{1} << m);
    qe = static_cast<long>(be) - fmt.bias() - m;
  }
  mpq_class v;
  if (sig != 0) {
    // strip factors of two so the fraction is canonical by construction
    int tz = std::countr_zero(sig);
    sig >>= tz;
    qe += tz;
    mpz_set_ui(mpq_numref(v.get_mpq_t()), static_cast<unsigned long>(sig));
    if (qe >= 0)
      mpz_mul_2exp(mpq_numref(v.get_mpq_t()), mpq_numref(v.get_mpq_t()),
                   static_cast<unsigned long>(qe));
    else
      mpz_mul_2exp(mpq_denref(v.get_mpq_t()), mpq_denref(v.get_mpq_t()),
                   static_cast<unsigned long>(-qe));
    if (x.sign()) mpq_neg(v.get_mpq_t(), v.get_mpq_t());
  }
  return v;
}

Rounded round_nearest_even(const mpq_class& r, const FloatFormat& fmt) {
  int rs = sgn(r);
  if (rs == 0) return {Rounded::Kind::Finite, FloatValue::zero(fmt)};
  bool neg = rs < 0;
  const mpz_srcptr num0 = mpq_numref(r.get_mpq_t());
  const mpz_srcptr den = mpq_denref(r.get_mpq_t());

  const int m = fmt.mantissa_bits();
  const long qmin = fmt.min_exp() - m;  // quantum of subnormals

  // |r| vs 2^k without materializing the power: one shifted compare
  static thread_local mpz_class t;
  auto cmp_pow2 = [&](long k) {
    if (k >= 0) {
      mpz_mul_2exp(t.get_mpz_t(), den, static_cast<unsigned long>(k));
      return mpz_cmpabs(num0, t.get_mpz_t());
    }
    mpz_mul_2exp(t.get_mpz_t(), num0, static_cast<unsigned long>(-k));
    return mpz_cmpabs(t.get_mpz_t(), den);
  };

  // e = floor(log2 |r|), from bit lengths then adjusted by comparison
  long e = static_cast<long>(mpz_sizeinbase(num0, 2)) -
           static_cast<long>(mpz_sizeinbase(den, 2));
  while (cmp_pow2(e + 1) >= 0) ++e;
  while (cmp_pow2(e) < 0) --e;

  long qe = std::max(e - m, qmin);

  // n = |r| / 2^qe rounded to nearest-even integer, via floor + remainder
  static thread_local mpz_class num, den2, n, rem;
  mpz_abs(num.get_mpz_t(), num0);
  mpz_set(den2.get_mpz_t(), den);
  if (qe >= 0)
    mpz_mul_2exp(den2.get_mpz_t(), den2.get_mpz_t(), static_cast<unsigned long>(qe));
  else
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<unsigned long>(-qe));
  mpz_fdiv_qr(n.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), den2.get_mpz_t());
  mpz_mul_2exp(rem.get_mpz_t(), rem.get_mpz_t(), 1);
  int half_cmp = mpz_cmp(rem.get_mpz_t(), den2.get_mpz_t());
  if (half_cmp > 0 || (half_cmp == 0 && mpz_odd_p(n.get_mpz_t()))) mpz_add_ui(n.get_mpz_t(), n.get_mpz_t(), 1);

  if (mpz_sgn(n.get_mpz_t()) == 0) return {Rounded::Kind::Finite, FloatValue::zero(fmt)};

  // n < 2^(m+2) here, so it fits comfortably in 64 bits
  uint64_t ni = mpz_get_ui(n.get_mpz_t());
  if (ni >= (uint64_t{1} << (m + 1))) {
    // only reachable as exactly 2^(m+1) after a carry out of the mantissa
    ni >>= 1;
    ++qe;
  }

  uint64_t sign_bits = neg ? fmt.sign_mask() : 0;
  if (ni >= (uint64_t{1} << m)) {
    long biased = qe + m + fmt.bias();
    if (biased > fmt.max_biased_exp())
      return {neg ? Rounded::Kind::OverflowNeg : Rounded::Kind::OverflowPos, FloatValue()};
    uint64_t bits = sign_bits | (static_cast<uint64_t>(biased) << m) |
                    (ni & fmt.mantissa_mask());
    return {Rounded::Kind::Finite, FloatValue(bits, fmt)};
  }
  // subnormal (qe == qmin)
  uint64_t bits = sign_bits | ni;
  return {Rounded::Kind::Finite, FloatValue(bits, fmt)};
}

mpq_class parse_decimal(const std::string& text) {
  size_t i = 0;
  bool neg = false;
  auto fail = [&] { throw std::invalid_argument("malformed decimal literal: " + text); };
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
  std::string digits;
  long frac_digits = 0;
  bool any = false;
  while (i < text.size() && isdigit(static_cast<unsigned char>(text[i]))) {
    digits += text[i++];
    any = true;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && isdigit(static_cast<unsigned char>(text[i]))) {
      digits += text[i++];
      ++frac_digits;
      any = true;
    }
  }
  if (!any) fail();
  long exp10 = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) eneg = text[i++] == '-';
    if (i >= text.size()) fail();
    long v = 0;
    while (i < text.size() && isdigit(static_cast<unsigned char>(text[i]))) v = v * 10 + (text[i++] - '0');
    exp10 = eneg ? -v : v;
  }
  if (i != text.size()) fail();

  mpz_class mant(digits.empty() ? "0" : digits, 10);
  mpq_class val(mant);
  long e = exp10 - frac_digits;
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
  if (e > 0)
    val *= mpq_class(p10);
  else if (e < 0)
    val /= mpq_class(p10);
  return neg ? mpq_class(-val) : val;
}

Rounded parse_float(const std::string& text, const FloatFormat& fmt) {
  return round_nearest_even(parse_decimal(text), fmt);
}

std::optional<FloatValue> float_below(const mpq_class& r, const FloatFormat& fmt, bool strict) {
  if (r < -fmt.max_finite_value() || (strict && r == -fmt.max_finite_value()))
    return std::nullopt;
  Rounded rr = round_nearest_even(r, fmt);
  FloatValue f = rr.kind == Rounded::Kind::OverflowPos ? FloatValue::max_finite(fmt)
               : rr.kind == Rounded::Kind::OverflowNeg ? FloatValue::min_finite(fmt)
                                                       : rr.value;
  mpq_class fv = to_rational(f);
  if (fv > r || (strict && fv == r)) f = pred(f);
  return f;
}

std::optional<FloatValue> float_above(const mpq_class& r, const FloatFormat& fmt, bool strict) {
  if (r > fmt.max_finite_value() || (strict && r == fmt.max_finite_value()))
    return std::nullopt;
  Rounded rr = round_nearest_even(r, fmt);
  FloatValue f = rr.kind == Rounded::Kind::OverflowPos ? FloatValue::max_finite(fmt)
               : rr.kind == Rounded::Kind::OverflowNeg ? FloatValue::min_finite(fmt)
                                                       : rr.value;
  mpq_class fv = to_rational(f);
  if (fv < r || (strict && fv == r)) f = succ(f);
  return f;
}

std::string to_hex_string(const FloatValue& x) {
  int digits = (x.format().width() + 3) / 4;
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%0*llX", digits,
                static_cast<unsigned long long>(x.bits()));
  return buf;
}

std::string to_decimal_string(const FloatValue& x) {
  if (!x.is_finite()) {
    FloatClass c = x.classify();
    if (c == FloatClass::NaN) return "nan";
    return x.sign() ? "-inf" : "inf";
  }
  if (x.is_zero()) return "0";
  mpq_class exact = to_rational(x);
  double approx = mpq_get_d(exact.get_mpq_t());
  for (int prec = 1; prec <= 20; ++prec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, approx);
    try {
      Rounded back = parse_float(buf, x.format());
      if (back.finite() && back.value.bits() == x.bits()) return buf;
    } catch (const std::invalid_argument&) {
      break;  // "inf" etc., give up on shortest form
    }
  }
  // fall back to the exact rational rendering
  return exact.get_str();
}

float to_hw_float(const FloatValue& x) {
  assert(x.format() == FloatFormat::binary32());
  uint32_t b = static_cast<uint32_t>(x.bits());
  return std::bit_cast<float>(b);
}

FloatValue from_hw_float(float f) {
  return FloatValue(std::bit_cast<uint32_t>(f), FloatFormat::binary32());
}

std::optional<FloatValue> fp_bin_soft(BinOp op, const FloatValue& a, const FloatValue& b) {
  const FloatFormat& fmt = a.format();
  mpq_class x = to_rational(a), y = to_rational(b);
  mpq_class r;
  switch (op) {
    case BinOp::Add: r = x + y; break;
    case BinOp::Sub: r = x - y; break;
    case BinOp::Mul: r = x * y; break;
    case BinOp::Div:
      if (y == 0) return std::nullopt;
      r = x / y;
      break;
  }
  Rounded rr = round_nearest_even(r, fmt);
  if (!rr.finite()) return std::nullopt;
  return rr.value;
}

std::optional<FloatValue> fp_bin(BinOp op, const FloatValue& a, const FloatValue& b) {
  if (a.format() == FloatFormat::binary32()) {
    float x = to_hw_float(a), y = to_hw_float(b);
    float r;
    switch (op) {
      case BinOp::Add: r = x + y; break;
      case BinOp::Sub: r = x - y; break;
      case BinOp::Mul: r = x * y; break;
      case BinOp::Div: r = x / y; break;
    }
    if (!std::isfinite(r)) return std::nullopt;
    return from_hw_float(r);
  }
  return fp_bin_soft(op, a, b);
}

std::optional<FloatValue> fp_sqrt(const FloatValue& a) {
  const FloatFormat& fmt = a.format();
  if (a.is_zero()) return FloatValue::zero(fmt);
  if (a.sign()) return std::nullopt;
  if (fmt == FloatFormat::binary32()) {
    float r = std::sqrt(to_hw_float(a));
    if (!std::isfinite(r)) return std::nullopt;
    return from_hw_float(r);
  }
  mpq_class r = to_rational(a);
  // Largest f >= 0 with f^2 <= r, by ordinal binary search; then resolve the
  // rounding against the exact midpoint square.
  int64_t lo = 0, hi = ordinal(FloatValue::max_finite(fmt));
  while (lo < hi) {
    int64_t mid = lo + (hi - lo + 1) / 2;
    mpq_class fv = to_rational(from_ordinal(mid, fmt));
    if (fv * fv <= r)
      lo = mid;
    else
      hi = mid - 1;
  }
  FloatValue f = from_ordinal(lo, fmt);
  mpq_class fv = to_rational(f);
  if (fv * fv == r) return f;
  if (lo == ordinal(FloatValue::max_finite(fmt))) return f;  // sqrt never overflows here
  FloatValue g = succ(f);
  mpq_class midpt = (fv + to_rational(g)) / 2;
  mpq_class m2 = midpt * midpt;
  if (r < m2) return f;
  if (r > m2) return g;
  return (f.mantissa() & 1) == 0 ? f : g;  // exact tie
}

FloatValue fp_neg(const FloatValue& a) {
  return FloatValue(a.bits() ^ a.format().sign_mask(), a.format());
}

}  // namespace fpsolve
