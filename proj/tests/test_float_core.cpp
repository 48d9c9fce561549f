#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "fpsolve/float_core.hpp"
#include "test_util.hpp"

using namespace fpsolve;
using fptest::all_finite;
using fptest::f43;

namespace {

const FloatFormat& b32 = FloatFormat::binary32();

FloatValue rnd_finite32(std::mt19937_64& rng) {
  for (;;) {
    uint32_t bits = uint32_t(rng());
    FloatValue v(bits, b32);
    if (v.is_finite()) return v;
  }
}

}  // namespace

TEST_CASE("decimal parsing matches hardware strtof") {
  CHECK(parse_float("0.1", b32).value.bits() == 0x3DCCCCCD);

  const char* cases[] = {"0.1",        "1e-5",      "-1e-5",     "156.25001", "979.01",
                         "1262.21",    "3.14159265", "2.718281828", "1e38",    "-1e-38",
                         "0.00001",    "123456.789", "-0.5",      "1e-45",    "3.4e38",
                         "1000000000.0089999904"};
  for (const char* text : cases) {
    Rounded r = parse_float(text, b32);
    REQUIRE(r.finite());
    CHECK(r.value.bits() == from_hw_float(std::strtof(text, nullptr)).bits());
  }
}

TEST_CASE("rounding a double-exact rational matches hardware double-to-float") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mant(-2.0, 2.0);
  std::uniform_int_distribution<int> exp(-140, 130);
  for (int i = 0; i < 20000; ++i) {
    double d = std::ldexp(mant(rng), exp(rng));
    if (d == 0.0) continue;
    float f = float(d);  // one correctly rounded nearest-even conversion
    Rounded r = round_nearest_even(mpq_class(d), b32);
    if (!std::isfinite(f)) {
      CHECK(!r.finite());
      CHECK((r.kind == Rounded::Kind::OverflowPos) == (f > 0));
    } else {
      REQUIRE(r.finite());
      CHECK(r.value.bits() == from_hw_float(f).bits());
    }
  }
}

TEST_CASE("nearest-even ties") {
  // Exactly between 1 and succ(1): tie resolves to the even mantissa (1.0).
  mpq_class one_half_ulp = mpq_class(1) + mpq_class(1, 1 << 24);
  CHECK(round_nearest_even(one_half_ulp, b32).value.bits() == 0x3F800000);
  // Exactly between succ(1) (odd mantissa) and succ(succ(1)) (even).
  mpq_class three_half_ulp = mpq_class(1) + mpq_class(3) / mpq_class(1 << 24);
  CHECK(round_nearest_even(three_half_ulp, b32).value.bits() == 0x3F800002);
}

TEST_CASE("overflow threshold") {
  const mpq_class& t = b32.overflow_threshold();
  CHECK(!round_nearest_even(t, b32).finite());
  CHECK(round_nearest_even(t, b32).kind == Rounded::Kind::OverflowPos);
  CHECK(round_nearest_even(-t, b32).kind == Rounded::Kind::OverflowNeg);
  mpq_class below = t - mpq_class(1, 1000);
  Rounded r = round_nearest_even(below, b32);
  REQUIRE(r.finite());
  CHECK(r.value == FloatValue::max_finite(b32));
}

TEST_CASE("ordinal map is a contiguous monotone bijection on (4,3)") {
  int64_t m = int64_t(f43().max_finite_magnitude());
  CHECK(f43().finite_count() == 239);
  mpq_class prev;
  for (int64_t o = -m; o <= m; ++o) {
    FloatValue v = from_ordinal(o, f43());
    CHECK(ordinal(v) == o);
    CHECK(v.is_finite());
    mpq_class r = to_rational(v);
    if (o > -m) CHECK(r > prev);  // strictly monotone in ordinal order
    prev = r;
    if (o < m) CHECK(ordinal(succ(v)) == o + 1);
    if (o > -m) CHECK(ordinal(pred(v)) == o - 1);
  }
  CHECK(ordinal(FloatValue::zero(f43())) == 0);
  CHECK_THROWS_AS(succ(FloatValue::max_finite(f43())), OverflowBoundary);
  CHECK_THROWS_AS(pred(FloatValue::min_finite(f43())), OverflowBoundary);
  CHECK_THROWS_AS(from_ordinal(m + 1, f43()), OverflowBoundary);
}

TEST_CASE("round is the inverse of to_rational on every (4,3) float") {
  for (const FloatValue& v : all_finite(f43())) {
    Rounded r = round_nearest_even(to_rational(v), f43());
    REQUIRE(r.finite());
    CHECK(r.value == v);
  }
}

TEST_CASE("succ and pred on binary32 agree with hardware nextafter") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50000; ++i) {
    FloatValue v = rnd_finite32(rng);
    float f = to_hw_float(v);
    float up = std::nextafterf(f, HUGE_VALF);
    if (std::isfinite(up)) CHECK(succ(v) == from_hw_float(up));
    float dn = std::nextafterf(f, -HUGE_VALF);
    if (std::isfinite(dn)) CHECK(pred(v) == from_hw_float(dn));
  }
}

TEST_CASE("software arithmetic path equals the hardware path on binary32") {
  std::mt19937_64 rng(13);
  const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div};
  for (int i = 0; i < 250000; ++i) {
    FloatValue a = rnd_finite32(rng), b = rnd_finite32(rng);
    BinOp op = ops[i % 4];
    auto hw = fp_bin(op, a, b);
    auto soft = fp_bin_soft(op, a, b);
    CHECK(hw.has_value() == soft.has_value());
    if (hw && soft) CHECK(*hw == *soft);
  }
  for (int i = 0; i < 20000; ++i) {
    FloatValue a = rnd_finite32(rng);
    auto hw = fp_sqrt(a);
    float f = to_hw_float(a);
    if (f >= 0) {
      REQUIRE(hw.has_value());
      CHECK(*hw == from_hw_float(std::sqrt(f)));
    } else {
      CHECK(!hw.has_value());
    }
  }
}

TEST_CASE("float_below and float_above bracket rationals") {
  mpq_class q = (to_rational(FloatValue(0x3F800000, b32)) +
                 to_rational(FloatValue(0x3F800001, b32))) /
                2;  // midpoint between 1 and succ(1)
  CHECK(float_below(q, b32, false)->bits() == 0x3F800000);
  CHECK(float_above(q, b32, false)->bits() == 0x3F800001);

  mpq_class exact = 1;  // exactly representable
  CHECK(float_below(exact, b32, false)->bits() == 0x3F800000);
  CHECK(float_below(exact, b32, true)->bits() == pred(FloatValue(0x3F800000, b32)).bits());
  CHECK(float_above(exact, b32, false)->bits() == 0x3F800000);
  CHECK(float_above(exact, b32, true)->bits() == 0x3F800001);

  mpq_class way_low = -b32.max_finite_value() * 2;
  CHECK(!float_below(way_low, b32, false).has_value());
  mpq_class way_high = b32.max_finite_value() * 2;
  CHECK(!float_above(way_high, b32, false).has_value());

  // Agreement with an exhaustive scan on (4,3) for a rational grid.
  auto vals = all_finite(f43());
  for (int n = -500; n <= 500; n += 7) {
    mpq_class r(n, 2);
    std::optional<FloatValue> lo, hi;
    for (const FloatValue& v : vals) {
      if (to_rational(v) <= r) lo = v;
      if (!hi && to_rational(v) >= r) hi = v;
    }
    auto got_lo = float_below(r, f43(), false);
    auto got_hi = float_above(r, f43(), false);
    CHECK(got_lo.has_value() == lo.has_value());
    if (lo && got_lo) CHECK(*got_lo == *lo);
    CHECK(got_hi.has_value() == hi.has_value());
    if (hi && got_hi) CHECK(*got_hi == *hi);
  }
}

TEST_CASE("shortest decimal string round-trips") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20000; ++i) {
    FloatValue v = rnd_finite32(rng);
    Rounded back = parse_float(to_decimal_string(v), b32);
    REQUIRE(back.finite());
    CHECK(back.value == v);
  }
  for (const FloatValue& v : all_finite(f43())) {
    Rounded back = parse_float(to_decimal_string(v), f43());
    REQUIRE(back.finite());
    CHECK(back.value == v);
  }
}

TEST_CASE("classification and negation") {
  CHECK(FloatValue(0, b32).classify() == FloatClass::Zero);
  CHECK(FloatValue(0x80000000u, b32).classify() == FloatClass::Zero);
  CHECK(FloatValue(0x00000001u, b32).classify() == FloatClass::Subnormal);
  CHECK(FloatValue(0x3F800000u, b32).classify() == FloatClass::Normal);
  CHECK(FloatValue(0x7F800000u, b32).classify() == FloatClass::Infinity);
  CHECK(FloatValue(0x7FC00000u, b32).classify() == FloatClass::NaN);
  CHECK(!FloatValue(0x7F800000u, b32).is_finite());

  FloatValue one(0x3F800000u, b32);
  CHECK(fp_neg(one).bits() == 0xBF800000u);
  CHECK(fp_neg(fp_neg(one)) == one);
  CHECK(to_hex_string(one) == "0x3F800000");
}
