#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fpsolve/search.hpp"
#include "test_util.hpp"

using namespace fpsolve;
using fptest::f43;
using fptest::make_random_system;
using fptest::RandomSystem;

namespace {

const FloatFormat& b32 = FloatFormat::binary32();

FpInterval rnd_interval(std::mt19937_64& rng, const FloatFormat& fmt) {
  int64_t m = int64_t(fmt.max_finite_magnitude());
  std::uniform_int_distribution<int64_t> d(-m, m);
  int64_t a = d(rng), b = d(rng);
  return FpInterval(from_ordinal(std::min(a, b), fmt), from_ordinal(std::max(a, b), fmt));
}

void check_split_properties(const FpInterval& X, Strategy st) {
  auto pieces = split(X, st);
  REQUIRE(!pieces.empty());
  // Pairwise disjoint and inside X.
  for (size_t i = 0; i < pieces.size(); ++i) {
    CHECK(!pieces[i].is_empty());
    CHECK(X.contains(pieces[i].lo()));
    CHECK(X.contains(pieces[i].hi()));
    for (size_t j = i + 1; j < pieces.size(); ++j)
      CHECK(intersect(pieces[i], pieces[j]).is_empty());
  }
  uint64_t covered = 0;
  for (const FpInterval& p : pieces) covered += p.count();
  if (st == Strategy::Fp3s) {
    CHECK(pieces.size() == (X.count() == 2 ? 2 : 3));
    for (const FpInterval& p : pieces) CHECK(p.is_singleton());
    CHECK(covered <= X.count());
  } else {
    CHECK(covered == X.count());  // std and fpc partition X exactly
  }
  // Endpoints are always probed.
  bool has_lo = false, has_hi = false;
  for (const FpInterval& p : pieces) {
    has_lo |= p.contains(X.lo());
    has_hi |= p.contains(X.hi());
  }
  CHECK(has_lo);
  CHECK(has_hi);
}

}  // namespace

TEST_CASE("split: partition and disjointness properties") {
  std::mt19937_64 rng(43);
  const Strategy strategies[] = {Strategy::Std, Strategy::Fpc, Strategy::Fp3s};
  for (int i = 0; i < 400; ++i) {
    FpInterval X = rnd_interval(rng, f43());
    if (X.count() < 2) continue;
    for (Strategy st : strategies) check_split_properties(X, st);
  }
  for (Strategy st : strategies) {
    FpInterval wide = FpInterval::full(b32);
    check_split_properties(wide, st);
    FloatValue one = parse_float("1", b32).value;
    check_split_properties(FpInterval(one, succ(one)), st);  // count == 2
    CHECK_THROWS(split(FpInterval::singleton(one), st));
  }
}

TEST_CASE("variable selection picks the widest input") {
  ConstraintStore st(b32);
  FloatValue one = parse_float("1", b32).value, two = parse_float("2", b32).value;
  FloatValue ten = parse_float("10", b32).value;
  VarId narrow = st.add_variable("narrow", FpInterval(one, two));
  VarId wide = st.add_variable("wide", FpInterval(one, ten));
  st.add_variable("not_an_input", FpInterval::full(b32));
  st.mark_input(narrow);
  st.mark_input(wide);
  auto v = select_variable(st);
  REQUIRE(v.has_value());
  CHECK(*v == wide);

  st.set_domain(wide, FpInterval::singleton(two));
  st.set_domain(narrow, FpInterval::singleton(one));
  CHECK(!select_variable(st).has_value());  // all inputs instantiated
}

TEST_CASE("random (4,3) systems: std and fpc match the exhaustive oracle") {
  std::mt19937_64 rng(47);
  int sat_seen = 0, unsat_seen = 0;
  for (int trial = 0; trial < 150; ++trial) {
    RandomSystem sys = make_random_system(rng, f43());
    bool truth = sys.brute_force_sat();
    (truth ? sat_seen : unsat_seen)++;
    for (Strategy st : {Strategy::Std, Strategy::Fpc}) {
      SolverConfig cfg;
      cfg.strategy = st;
      SolveResult r = solve(sys.store, sys.spec, cfg, sys.verifier());
      if (truth) {
        REQUIRE(r.status == Status::Sat);
        CHECK(r.verified);
        auto v = sys.verifier()(r.witness);
        REQUIRE(v.has_value());
        CHECK(sys.spec.interval.contains(*v));
      } else {
        REQUIRE(r.status == Status::Unsat);
      }
    }
  }
  CHECK(sat_seen > 10);    // the generator produces a healthy mix
  CHECK(unsat_seen > 10);
}

TEST_CASE("fp3s never answers Unsat and its witnesses are genuine") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    RandomSystem sys = make_random_system(rng, f43());
    bool truth = sys.brute_force_sat();
    SolverConfig cfg;
    cfg.strategy = Strategy::Fp3s;
    SolveResult r = solve(sys.store, sys.spec, cfg, sys.verifier());
    CHECK(r.status != Status::Unsat);
    if (r.status == Status::Sat) {
      CHECK(truth);
      auto v = sys.verifier()(r.witness);
      REQUIRE(v.has_value());
      CHECK(sys.spec.interval.contains(*v));
    }
  }
}

TEST_CASE("identical configuration implies identical result and node count") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 20; ++trial) {
    RandomSystem sys = make_random_system(rng, f43());
    SolverConfig cfg;
    SolveResult a = solve(sys.store, sys.spec, cfg, sys.verifier());
    SolveResult b = solve(sys.store, sys.spec, cfg, sys.verifier());
    CHECK(a.status == b.status);
    CHECK(a.stats.nodes == b.stats.nodes);
    CHECK(a.stats.propagations == b.stats.propagations);
    if (a.status == Status::Sat) {
      REQUIRE(b.status == Status::Sat);
      CHECK(a.witness == b.witness);
    }
  }
}

TEST_CASE("node limit reports Unknown with a reason") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    RandomSystem sys = make_random_system(rng, f43());
    SolverConfig cfg;
    cfg.node_limit = 1;
    SolveResult r = solve(sys.store, sys.spec, cfg, sys.verifier());
    if (r.status == Status::Unknown) {
      CHECK(!r.reason.empty());
      return;
    }
  }
  FAIL("no trial hit the node limit");
}
