#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fpsolve/frontend.hpp"
#include "test_util.hpp"

using namespace fpsolve;

namespace {

const FloatFormat& b32 = FloatFormat::binary32();

const char* kHeron = R"(
input a in [5, 10];
input b in [0, 5];
input c in [0, 5];

squared_area = 0.0;
if (a <= b + c) {
  s = (a + b + c) / 2.0;
  squared_area = s * (s - a) * (s - b) * (s - c);
}
@suspect squared_area in [-1262.21, -0.00001);
)";

const char* kOptimizedHeron = R"(
input a in [5, 10];
input b in [0, 5];
input c in [0, 5];

squared_area = 0.0;
if (a <= b + c) {
  squared_area = ((a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))) / 16.0;
}
@suspect squared_area in [-1262.21, -0.00001);
)";

std::map<std::string, FloatValue> inputs3(const char* a, const char* b, const char* c) {
  return {{"a", parse_float(a, b32).value},
          {"b", parse_float(b, b32).value},
          {"c", parse_float(c, b32).value}};
}

}  // namespace

TEST_CASE("parsing: structure and literal bits") {
  Program p = parse_program(kHeron);
  REQUIRE(p.inputs.size() == 3);
  CHECK(p.inputs[0].name == "a");
  REQUIRE(p.inputs[0].range.has_value());
  CHECK(p.inputs[0].range->lo() == parse_float("5", b32).value);
  CHECK(p.inputs[0].range->hi() == parse_float("10", b32).value);

  REQUIRE(p.stmts.size() == 3);
  CHECK(p.stmts[0]->kind == Stmt::Kind::Assign);
  CHECK(p.stmts[0]->target == "squared_area");
  CHECK(p.stmts[0]->value->kind == Expr::Kind::Literal);
  CHECK(p.stmts[0]->value->value.bits() == 0);  // 0.0
  CHECK(p.stmts[1]->kind == Stmt::Kind::If);
  REQUIRE(p.stmts[1]->cond.has_value());
  CHECK(p.stmts[1]->cond->rel == RelOp::Le);
  CHECK(p.stmts[2]->kind == Stmt::Kind::Suspect);
  CHECK(p.stmts[2]->suspect_var == "squared_area");

  // The open upper endpoint -1e-5 is materialized one float inward.
  REQUIRE(p.stmts[2]->suspect_interval.has_value());
  FloatValue parsed_eps = parse_float("-0.00001", b32).value;
  CHECK(p.stmts[2]->suspect_interval->hi() == pred(parsed_eps));
  CHECK(p.stmts[2]->suspect_interval->lo() == parse_float("-1262.21", b32).value);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_program("x = y + 1.0;"), ParseError);     // use before def
  CHECK_THROWS_AS(parse_program("input a in [0, 1]; x = ;"), ParseError);
  CHECK_THROWS_AS(parse_program("input a in [1, 0];"), ParseError);  // empty range
  CHECK_THROWS_AS(parse_program("input a in [0, 1]; @suspect b in [0, 1];"), ParseError);
  Program two = parse_program(
      "input a in [0,1]; x = a; @suspect x in [0,1]; y = a; @suspect y in [0,1];");
  CHECK_THROWS(make_suspect_spec(two));  // exactly one annotation required
}

TEST_CASE("loop unrolling produces k guarded copies plus a residual marker") {
  const char* src = R"(
input n in [0, 100];
x = n;
i = 0.0;
while (i < 3.0) {
  x = x * 0.5;
  i = i + 1.0;
}
@suspect x in [0, 1];
)";
  Program p = parse_program(src);
  Program u = unroll_loops(p, 2);
  // After unrolling no While remains anywhere.
  std::function<void(const std::vector<StmtPtr>&)> no_while = [&](const std::vector<StmtPtr>& b) {
    for (const auto& s : b) {
      CHECK(s->kind != Stmt::Kind::While);
      no_while(s->then_body);
      no_while(s->else_body);
    }
  };
  no_while(u.stmts);
  // Unrolling depth 2 leaves a residual marker at nesting depth 2.
  const Stmt* cur = nullptr;
  for (const auto& s : u.stmts)
    if (s->kind == Stmt::Kind::If && s->cond && s->cond->to_string().find('<') != std::string::npos)
      cur = s.get();
  REQUIRE(cur != nullptr);
  int depth = 0;
  bool residual_found = false;
  while (cur) {
    ++depth;
    const Stmt* next = nullptr;
    for (const auto& s : cur->then_body) {
      if (s->kind == Stmt::Kind::If) next = s.get();
      if (s->kind == Stmt::Kind::Residual) residual_found = true;
    }
    cur = next;
  }
  CHECK(depth == 2);
  CHECK(residual_found);
}

TEST_CASE("dynamic single assignment gives every assignment a fresh version") {
  Program p = parse_program(kHeron);
  Program d = to_dsa(p);
  std::map<std::string, int> seen;  // rendered name -> times assigned
  std::function<void(const std::vector<StmtPtr>&)> walk = [&](const std::vector<StmtPtr>& b) {
    for (const auto& s : b) {
      if (s->kind == Stmt::Kind::Assign) {
        CHECK(s->target_version >= 1);
        seen[dsa_name(s->target, s->target_version)]++;
      }
      walk(s->then_body);
      walk(s->else_body);
    }
  };
  walk(d.stmts);
  CHECK(!seen.empty());
  for (const auto& [name, n] : seen) {
    CAPTURE(name);
    CHECK(n == 1);
  }
}

TEST_CASE("path enumeration counts") {
  auto count_paths = [](const std::string& src) {
    Program p = parse_program(src);
    Program d = to_dsa(unroll_loops(p, 8));
    SuspectSpec spec = make_suspect_spec(d);
    auto paths = enumerate_paths(d, spec);
    size_t with_target = 0;
    for (const auto& ps : paths)
      if (ps.has_target) ++with_target;
    return with_target;
  };
  CHECK(count_paths("input a in [0,1]; x = a + 1.0; @suspect x in [0,2];") == 1);
  CHECK(count_paths(R"(
input a in [0,1];
x = a;
if (a < 0.5) { x = x + 1.0; }
@suspect x in [0,2];)") == 2);
  CHECK(count_paths(R"(
input a in [0,1];
x = a;
if (a < 0.5) { x = x + 1.0; } else { x = x - 1.0; }
if (x > 0.0) { x = x * 2.0; }
@suspect x in [-2,4];)") == 4);
}

TEST_CASE("concrete replay of known cancellation witnesses") {
  Program heron = parse_program(kHeron);
  Trace t1 = concrete_eval(heron, inputs3("5.517474", "4.7105823", "0.8068917"));
  CHECK(t1.final_values.at("squared_area") == parse_float("-1.0000001e-5", b32).value);

  Trace t2 = concrete_eval(heron, inputs3("7.072597", "5", "5"));
  CHECK(t2.final_values.at("squared_area") == parse_float("156.25003", b32).value);

  Program opt = parse_program(kOptimizedHeron);
  Trace t3 = concrete_eval(opt, inputs3("7.0755463", "4.350216", "2.72533"));
  CHECK(t3.final_values.at("squared_area") == parse_float("-1.0000001e-5", b32).value);
}

TEST_CASE("DSA transformation preserves concrete semantics") {
  std::mt19937_64 rng(67);
  const char* programs[] = {kHeron, kOptimizedHeron, R"(
input a in [0, 8];
input b in [1, 4];
x = a / b;
if (x < 1.0) { x = x + b; } else { x = x - b; }
if (a > b) { x = x * x; }
@suspect x in [-100, 100];
)"};
  for (const char* src : programs) {
    Program p = parse_program(src);
    Program d = to_dsa(unroll_loops(p, 8));
    for (int i = 0; i < 200; ++i) {
      std::map<std::string, FloatValue> in;
      for (const auto& decl : p.inputs) {
        int64_t lo = ordinal(decl.range->lo()), hi = ordinal(decl.range->hi());
        std::uniform_int_distribution<int64_t> dist(lo, hi);
        in[decl.name] = from_ordinal(dist(rng), b32);
      }
      Trace tp = concrete_eval(p, in);
      Trace td = concrete_eval(d, in);
      for (const auto& [name, v] : tp.final_values) {
        REQUIRE(td.final_values.count(name) == 1);
        CHECK(td.final_values.at(name).bits() == v.bits());
      }
      // Decision strings render DSA-versioned names, so compare count and
      // branch outcomes rather than the full text.
      REQUIRE(tp.decisions.size() == td.decisions.size());
      for (size_t k = 0; k < tp.decisions.size(); ++k) {
        auto outcome = [](const std::string& s) { return s.substr(s.rfind("-> ")); };
        CHECK(outcome(tp.decisions[k]) == outcome(td.decisions[k]));
      }
    }
  }
}

TEST_CASE("exactly one path system stays feasible for any concrete execution") {
  std::mt19937_64 rng(71);
  const char* src = R"(
input a in [1, 9];
input b in [1, 9];
x = a - b;
if (x < 0.0) { x = 0.0 - x; }
if (x > 4.0) { x = x * 0.5; } else { x = x + 1.0; }
@suspect x in [-1000, 1000];
)";
  Program p = parse_program(src);
  Program d = to_dsa(unroll_loops(p, 8));
  SuspectSpec spec = make_suspect_spec(d);
  auto paths = enumerate_paths(d, spec);

  for (int i = 0; i < 300; ++i) {
    std::map<std::string, FloatValue> in;
    for (const auto& decl : p.inputs) {
      int64_t lo = ordinal(decl.range->lo()), hi = ordinal(decl.range->hi());
      std::uniform_int_distribution<int64_t> dist(lo, hi);
      in[decl.name] = from_ordinal(dist(rng), b32);
    }
    Trace t = concrete_eval(p, in);
    REQUIRE(t.final_values.count("x") == 1);
    FloatValue traced = t.final_values.at("x");

    int feasible = 0;
    for (const auto& ps : paths) {
      if (!ps.has_target) continue;
      ConstraintStore st = ps.store;
      for (const auto& [name, v] : in) st.tighten(st.var(name), FpInterval::singleton(v));
      propagate_2b(st);
      if (st.failed()) continue;
      ++feasible;
      // The path that matches the trace must keep the traced value.
      CHECK(st.domain(ps.target).contains(traced));
    }
    CHECK(feasible == 1);
  }
}
