#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>
#include <random>
#include <vector>

#include "fpsolve/interval.hpp"
#include "test_util.hpp"

using namespace fpsolve;
using fptest::all_finite;
using fptest::f32s;
using fptest::f43;

namespace {

const FloatFormat& b32 = FloatFormat::binary32();

FpInterval rnd_interval(std::mt19937_64& rng, const FloatFormat& fmt) {
  int64_t m = int64_t(fmt.max_finite_magnitude());
  std::uniform_int_distribution<int64_t> d(-m, m);
  int64_t a = d(rng), b = d(rng);
  return FpInterval(from_ordinal(std::min(a, b), fmt), from_ordinal(std::max(a, b), fmt));
}

// Exact image hull of a rounded binary operation by full enumeration.
FpInterval brute_image(BinOp op, const FpInterval& X, const FpInterval& Y) {
  const FloatFormat& fmt = X.format();
  std::optional<int64_t> lo, hi;
  for (int64_t xo = ordinal(X.lo()); xo <= ordinal(X.hi()); ++xo)
    for (int64_t yo = ordinal(Y.lo()); yo <= ordinal(Y.hi()); ++yo) {
      auto r = fp_bin_soft(op, from_ordinal(xo, fmt), from_ordinal(yo, fmt));
      if (!r) continue;
      int64_t o = ordinal(*r);
      lo = lo ? std::min(*lo, o) : o;
      hi = hi ? std::max(*hi, o) : o;
    }
  if (!lo) return FpInterval::empty(fmt);
  return FpInterval(from_ordinal(*lo, fmt), from_ordinal(*hi, fmt));
}

}  // namespace

TEST_CASE("construction, membership, count") {
  FpInterval e = FpInterval::empty(b32);
  CHECK(e.is_empty());
  CHECK(e.count() == 0);
  CHECK(!e.contains(FloatValue::zero(b32)));

  FloatValue one(0x3F800000u, b32);
  FpInterval s = FpInterval::singleton(one);
  CHECK(s.is_singleton());
  CHECK(s.count() == 1);
  CHECK(s.contains(one));
  CHECK(!s.contains(succ(one)));

  FpInterval u(pred(one), succ(one));
  CHECK(u.count() == 3);
  CHECK(u.width() == to_rational(succ(one)) - to_rational(pred(one)));

  CHECK_THROWS(FpInterval(succ(one), one));
  CHECK(FpInterval::full(f43()).count() == f43().finite_count());
}

TEST_CASE("addition absorbs small magnitudes") {
  FloatValue big = parse_float("1e9", b32).value;
  FloatValue one = parse_float("1", b32).value;
  FpInterval r = forward_eval(BinOp::Add, FpInterval::singleton(big), FpInterval::singleton(one));
  CHECK(r.is_singleton());
  CHECK(r.lo() == big);  // 1e9 + 1 rounds back to 1e9 (ulp there is 64)
}

TEST_CASE("forward image bounds are exact on (3,2), all operations") {
  std::mt19937_64 rng(23);
  const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div};
  for (int i = 0; i < 400; ++i) {
    FpInterval X = rnd_interval(rng, f32s()), Y = rnd_interval(rng, f32s());
    for (BinOp op : ops) {
      FpInterval got = forward_eval(op, X, Y);
      FpInterval want = brute_image(op, X, Y);
      CHECK(got == want);
    }
  }
}

TEST_CASE("forward sqrt image is exact on (3,2), every interval") {
  auto vals = all_finite(f32s());
  int64_t m = int64_t(f32s().max_finite_magnitude());
  for (int64_t lo = -m; lo <= m; ++lo)
    for (int64_t hi = lo; hi <= m; ++hi) {
      FpInterval X(from_ordinal(lo, f32s()), from_ordinal(hi, f32s()));
      std::optional<int64_t> blo, bhi;
      for (int64_t o = lo; o <= hi; ++o) {
        auto r = fp_sqrt(from_ordinal(o, f32s()));
        if (!r) continue;
        int64_t ro = ordinal(*r);
        blo = blo ? std::min(*blo, ro) : ro;
        bhi = bhi ? std::max(*bhi, ro) : ro;
      }
      FpInterval got = forward_sqrt(X);
      if (!blo) {
        CHECK(got.is_empty());
      } else {
        CHECK(got == FpInterval(from_ordinal(*blo, f32s()), from_ordinal(*bhi, f32s())));
      }
    }
}

TEST_CASE("intersect, hull, negate membership algebra on (4,3)") {
  std::mt19937_64 rng(29);
  auto vals = all_finite(f43());
  for (int i = 0; i < 300; ++i) {
    FpInterval A = rnd_interval(rng, f43()), B = rnd_interval(rng, f43());
    FpInterval I = intersect(A, B), H = hull(A, B), N = negate(A);
    for (const FloatValue& v : vals) {
      bool a = A.contains(v), b = B.contains(v);
      CHECK(I.contains(v) == (a && b));
      if (a || b) CHECK(H.contains(v));
      CHECK(N.contains(fp_neg(v)) == a);
    }
    // hull is the smallest covering interval: its endpoints are members.
    if (!H.is_empty()) {
      CHECK((A.contains(H.lo()) || B.contains(H.lo())));
      CHECK((A.contains(H.hi()) || B.contains(H.hi())));
    }
    CHECK(intersect(A, FpInterval::empty(f43())).is_empty());
    CHECK(hull(A, FpInterval::empty(f43())) == A);
  }
}

TEST_CASE("forward division by an interval containing only zero is empty") {
  FpInterval z = FpInterval::singleton(FloatValue::zero(b32));
  FpInterval x = FpInterval::singleton(parse_float("1", b32).value);
  CHECK(forward_eval(BinOp::Div, x, z).is_empty());   // 1/0 is infinite
  FpInterval zz = forward_eval(BinOp::Div, z, z);     // 0/0 is NaN
  CHECK(zz.is_empty());
}

TEST_CASE("forward bounds saturate instead of overflowing") {
  FpInterval big = FpInterval::singleton(FloatValue::max_finite(b32));
  FpInterval r = forward_eval(BinOp::Mul, big, big);  // all products overflow
  CHECK(r.is_empty());
  FpInterval half = FpInterval::singleton(parse_float("0.5", b32).value);
  FpInterval near = forward_eval(BinOp::Mul, big, FpInterval(half.lo(), big.hi()));
  CHECK(!near.is_empty());
  CHECK(near.hi() == FloatValue::max_finite(b32));
}

TEST_CASE("to_string mentions both endpoints") {
  FloatValue one = parse_float("1", b32).value;
  FpInterval u(one, succ(one));
  std::string s = u.to_string();
  CHECK(s.find("1") != std::string::npos);
  CHECK(s.find("0x3F800000") != std::string::npos);
}
