#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "fpsolve/constraint.hpp"
#include "test_util.hpp"

using namespace fpsolve;
using fptest::all_finite;
using fptest::f43;

namespace {

const FloatFormat& b32 = FloatFormat::binary32();

bool rat_contains(const RatInterval& R, const mpq_class& q) {
  if (R.lo.finite && (R.lo.open ? !(q > R.lo.value) : !(q >= R.lo.value))) return false;
  if (R.hi.finite && (R.hi.open ? !(q < R.hi.value) : !(q <= R.hi.value))) return false;
  return true;
}

}  // namespace

TEST_CASE("rounding preimage of a binary32 singleton") {
  FloatValue one = parse_float("1", b32).value;  // even mantissa: closed bounds
  RatInterval R = rounding_preimage(FpInterval::singleton(one));
  mpq_class ulp_up(1, 1 << 23), half_dn = mpq_class(1, 1 << 24) / 2 * 2;  // 2^-24... explicit below
  mpq_class lo_expect = mpq_class(1) - mpq_class(1, 1) / mpq_class(uint64_t(1) << 25);
  mpq_class hi_expect = mpq_class(1) + mpq_class(1, 1) / mpq_class(uint64_t(1) << 24);
  REQUIRE(R.lo.finite);
  REQUIRE(R.hi.finite);
  CHECK(R.lo.value == lo_expect);
  CHECK(R.hi.value == hi_expect);
  CHECK(!R.lo.open);
  CHECK(!R.hi.open);

  FloatValue s = succ(one);  // odd mantissa: both midpoints go to the neighbors
  RatInterval R2 = rounding_preimage(FpInterval::singleton(s));
  CHECK(R2.lo.open);
  CHECK(R2.hi.open);
  CHECK(R2.lo.value == hi_expect);  // shared midpoint with 1.0
}

TEST_CASE("rounding preimage is exact on every (4,3) singleton") {
  for (const FloatValue& v : all_finite(f43())) {
    RatInterval R = rounding_preimage(FpInterval::singleton(v));
    // Probe the boundary and points just inside/outside with exact rationals.
    mpq_class eps(1, 1 << 20);
    std::vector<mpq_class> probes;
    if (R.lo.finite) probes.insert(probes.end(), {R.lo.value - eps, R.lo.value, R.lo.value + eps});
    if (R.hi.finite) probes.insert(probes.end(), {R.hi.value - eps, R.hi.value, R.hi.value + eps});
    probes.push_back(to_rational(v));
    for (const mpq_class& q : probes) {
      Rounded r = round_nearest_even(q, f43());
      bool rounds_to_v = r.finite() && r.value == v;
      CHECK(rat_contains(R, q) == rounds_to_v);
    }
  }
}

TEST_CASE("clip_to_floats agrees with an exhaustive scan on (4,3)") {
  std::mt19937_64 rng(31);
  auto vals = all_finite(f43());
  for (int i = 0; i < 500; ++i) {
    RatInterval R;
    auto rnd_q = [&] {
      mpq_class q(int64_t(rng() % 2001) - 1000, long(1 + rng() % 7));
      q.canonicalize();
      return q;
    };
    mpq_class a = rnd_q(), b = rnd_q();
    R.lo.value = std::min(a, b);
    R.hi.value = std::max(a, b);
    R.lo.open = rng() % 2;
    R.hi.open = rng() % 2;
    if (rng() % 8 == 0) R.lo.finite = false;
    if (rng() % 8 == 0) R.hi.finite = false;
    FpInterval got = clip_to_floats(R, f43());
    std::optional<FloatValue> lo, hi;
    for (const FloatValue& v : vals) {
      if (!rat_contains(R, to_rational(v))) continue;
      if (!lo) lo = v;
      hi = v;
    }
    if (!lo) {
      CHECK(got.is_empty());
    } else {
      REQUIRE(!got.is_empty());
      CHECK(got.lo() == *lo);
      CHECK(got.hi() == *hi);
    }
  }
}

TEST_CASE("projection through addition with zero ties domains together") {
  ConstraintStore st(b32);
  FloatValue two = parse_float("2", b32).value, five = parse_float("5", b32).value;
  FloatValue three = parse_float("3", b32).value, seven = parse_float("7", b32).value;
  VarId x = st.add_variable("x", FpInterval(two, seven));
  VarId zero = st.add_constant(FloatValue::zero(b32));
  VarId z = st.add_variable("z", FpInterval(three, five));
  st.add_constraint(Constraint::ternary(BinOp::Add, z, x, zero));
  propagate_2b(st);
  REQUIRE(!st.failed());
  CHECK(st.domain(x) == FpInterval(three, five));
  CHECK(st.domain(z) == FpInterval(three, five));
}

TEST_CASE("comparison constraints clip strict bounds by one ulp") {
  ConstraintStore st(b32);
  FloatValue one = parse_float("1", b32).value, four = parse_float("4", b32).value;
  VarId x = st.add_variable("x", FpInterval(one, four));
  VarId y = st.add_variable("y", FpInterval(one, four));
  st.add_constraint(Constraint::compare(RelOp::Lt, x, y));
  propagate_2b(st);
  REQUIRE(!st.failed());
  CHECK(st.domain(x).hi() == pred(four));
  CHECK(st.domain(y).lo() == succ(one));

  ConstraintStore st2(b32);
  VarId a = st2.add_variable("a", FpInterval(one, four));
  VarId b = st2.add_variable("b", FpInterval(one, four));
  st2.add_constraint(Constraint::compare(RelOp::Ge, a, b));
  propagate_2b(st2);
  CHECK(st2.domain(a) == FpInterval(one, four));  // non-strict: no clipping room
  CHECK(st2.domain(b) == FpInterval(one, four));
}

TEST_CASE("contradictory domains fail the store") {
  ConstraintStore st(b32);
  FloatValue one = parse_float("1", b32).value, two = parse_float("2", b32).value;
  VarId x = st.add_variable("x", FpInterval::singleton(one));
  VarId y = st.add_variable("y", FpInterval::singleton(two));
  st.add_constraint(Constraint::compare(RelOp::Gt, x, y));
  propagate_2b(st);
  CHECK(st.failed());

  ConstraintStore st2(b32);
  VarId v = st2.add_variable("v", FpInterval(one, two));
  CHECK(st2.tighten(v, FpInterval::singleton(parse_float("8", b32).value)) ==
        ConstraintStore::TightenResult::Empty);
  CHECK(st2.failed());
}

TEST_CASE("backward projection is sound on random (4,3) ternary systems") {
  std::mt19937_64 rng(37);
  const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div};
  int64_t m = int64_t(f43().max_finite_magnitude());
  auto rnd_iv = [&] {
    std::uniform_int_distribution<int64_t> d(-m, m);
    int64_t a = d(rng), b = d(rng);
    return FpInterval(from_ordinal(std::min(a, b), f43()), from_ordinal(std::max(a, b), f43()));
  };
  for (int i = 0; i < 120; ++i) {
    BinOp op = ops[i % 4];
    FpInterval X = rnd_iv(), Y = rnd_iv(), Z = rnd_iv();
    ConstraintStore st(f43());
    VarId x = st.add_variable("x", X), y = st.add_variable("y", Y), z = st.add_variable("z", Z);
    st.add_constraint(Constraint::ternary(op, z, x, y));
    propagate_2b(st);
    bool any = false;
    for (int64_t xo = ordinal(X.lo()); xo <= ordinal(X.hi()); ++xo)
      for (int64_t yo = ordinal(Y.lo()); yo <= ordinal(Y.hi()); ++yo) {
        FloatValue xv = from_ordinal(xo, f43()), yv = from_ordinal(yo, f43());
        auto r = fp_bin_soft(op, xv, yv);
        if (!r || !Z.contains(*r)) continue;
        any = true;
        REQUIRE(!st.failed());
        CHECK(st.domain(x).contains(xv));
        CHECK(st.domain(y).contains(yv));
        CHECK(st.domain(z).contains(*r));
      }
    if (!any) {
      // No solution exists; failing is allowed (and ideal) but not required.
      continue;
    }
  }
}

TEST_CASE("propagation reaches the same fixpoint under shuffled constraint order") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    fptest::RandomSystem sys = fptest::make_random_system(rng, f43());
    std::vector<Constraint> cons = sys.store.constraints();

    auto fixpoint = [&](const std::vector<Constraint>& order) {
      ConstraintStore st(f43());
      for (VarId v = 0; v < sys.store.num_vars(); ++v)
        st.add_variable(sys.store.name(v), sys.store.domain(v));
      for (const Constraint& c : order) st.add_constraint(c);
      propagate_2b(st);
      std::vector<FpInterval> doms;
      for (VarId v = 0; v < st.num_vars(); ++v) doms.push_back(st.domain(v));
      return std::make_pair(st.failed(), doms);
    };

    auto base = fixpoint(cons);
    for (int s = 0; s < 3; ++s) {
      std::shuffle(cons.begin(), cons.end(), rng);
      auto alt = fixpoint(cons);
      CHECK(alt.first == base.first);
      if (!base.first)
        for (size_t v = 0; v < base.second.size(); ++v) CHECK(alt.second[v] == base.second[v]);
    }
  }
}

TEST_CASE("3B shaving prunes bounds that 2B alone cannot") {
  // x + y = 0 and x - y = 0 with x, y in [-1, 1]: each constraint on its own
  // keeps the full boxes (hull consistency), but any boundary slice of x is
  // refuted by the conjunction, so shaving collapses the domains toward 0.
  ConstraintStore st(b32);
  FloatValue one = parse_float("1", b32).value;
  FpInterval box(fp_neg(one), one);
  VarId x = st.add_variable("x", box);
  VarId y = st.add_variable("y", box);
  VarId s = st.add_variable("s", FpInterval::singleton(FloatValue::zero(b32)));
  VarId d = st.add_variable("d", FpInterval::singleton(FloatValue::zero(b32)));
  st.add_constraint(Constraint::ternary(BinOp::Add, s, x, y));
  st.add_constraint(Constraint::ternary(BinOp::Sub, d, x, y));

  ConstraintStore plain = st;
  propagate_2b(plain);
  REQUIRE(!plain.failed());
  CHECK(plain.domain(x) == box);  // the 2B fixpoint alone cannot shrink this
  CHECK(plain.domain(y) == box);

  filter_3b(st, 0.1);
  REQUIRE(!st.failed());
  CHECK(to_rational(st.domain(x).hi()) < mpq_class(1, 100));
  CHECK(to_rational(st.domain(x).lo()) > mpq_class(-1, 100));
  CHECK(st.domain(x).contains(FloatValue::zero(b32)));  // x = y = 0 survives
  CHECK(st.domain(y).contains(FloatValue::zero(b32)));
}
