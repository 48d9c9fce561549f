#include <chrono>

#include "fpsolve/frontend.hpp"

namespace fpsolve {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

PipelineResult solve_program(const Program& p, const PipelineOptions& opt) {
  auto t0 = Clock::now();
  SuspectSpec spec = make_suspect_spec(p, opt.tolerance);
  PipelineResult pr{SolveResult{}, spec, {}, 0};

  Program dsa = to_dsa(unroll_loops(p, opt.solver.unroll_k));
  std::vector<PathSystem> paths = enumerate_paths(dsa, spec);
  pr.paths_total = uint32_t(paths.size());

  WitnessVerifier verify = [&](const std::map<std::string, FloatValue>& w)
      -> std::optional<FloatValue> {
    Trace t = concrete_eval(p, w);
    std::optional<FloatValue> last;
    for (const auto& h : t.suspect_hits) {
      if (h.label != spec.location) continue;
      last = h.value;
      if (h.value.is_finite() && spec.interval.contains(h.value)) return h.value;
    }
    return last;
  };

  SolveStats total;
  bool any_unknown = false, bound_hit = false;
  std::string unknown_reason;

  for (PathSystem& path : paths) {
    double left_ms = double(opt.solver.timeout.count()) - ms_since(t0);
    if (left_ms <= 0) {
      any_unknown = true;
      unknown_reason = "timeout";
      break;
    }
    if (path.residual) {
      // refutation-only: a residual guard that survives propagation means the
      // unrolling bound may be too small
      PropagateStats ps = propagate_2b(path.store);
      total.propagations += ps.projections;
      if (!path.store.failed()) {
        PropagateStats s3 = filter_3b(path.store, opt.solver.shave_fraction);
        total.propagations += s3.projections;
      }
      if (!path.store.failed()) bound_hit = true;
      continue;
    }
    SolverConfig cfg = opt.solver;
    cfg.timeout = std::chrono::milliseconds(int64_t(left_ms));
    SolveResult r = solve(path.store, spec, cfg, verify);
    total.nodes += r.stats.nodes;
    total.propagations += r.stats.propagations;
    total.max_depth = std::max(total.max_depth, r.stats.max_depth);
    if (r.status == Status::Sat) {
      pr.result = std::move(r);
      Trace t = concrete_eval(p, pr.result.witness);
      pr.witness_path = t.decisions;
      break;
    }
    if (r.status == Status::Unknown) {
      any_unknown = true;
      if (unknown_reason.empty()) unknown_reason = r.reason;
    }
  }

  if (pr.result.status != Status::Sat) {
    if (any_unknown) {
      pr.result.status = Status::Unknown;
      pr.result.reason = unknown_reason;
    } else if (bound_hit) {
      pr.result.status = Status::Unknown;
      pr.result.reason = "loop unrolling bound may be insufficient";
    } else {
      pr.result.status = opt.solver.strategy == Strategy::Fp3s ? Status::NotFound : Status::Unsat;
    }
  }
  pr.result.stats = total;
  pr.result.stats.time_ms = ms_since(t0);
  return pr;
}

// ------------------------------------------------------------- generate-and-test

namespace {

struct SplitMix64 {
  uint64_t state;

  uint64_t next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // unbiased [0, span)
  uint64_t bounded(uint64_t span) {
    if (span <= 1) return 0;
    uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % span;
  }
};

}  // namespace

GenTestResult generate_and_test(const Program& p, uint64_t max_trials, uint64_t seed,
                                const std::string& tolerance) {
  auto t0 = Clock::now();
  GenTestResult out{SolveResult{}, make_suspect_spec(p, tolerance), 0};
  const SuspectSpec& spec = out.spec;

  struct Range {
    std::string name;
    int64_t lo;
    uint64_t span;
  };
  std::vector<Range> ranges;
  for (const auto& d : p.inputs) {
    int64_t lo = ordinal(d.range->lo());
    int64_t hi = ordinal(d.range->hi());
    ranges.push_back({d.name, lo, uint64_t(hi - lo) + 1});
  }

  SplitMix64 rng{seed ^ 0xD1B54A32D192ED03ull};
  std::map<std::string, FloatValue> w;
  for (uint64_t trial = 0; trial < max_trials; ++trial) {
    for (const auto& r : ranges)
      w[r.name] = from_ordinal(r.lo + int64_t(rng.bounded(r.span)), *p.format);
    ++out.trials_run;
    Trace t = concrete_eval(p, w);
    for (const auto& h : t.suspect_hits) {
      if (h.label != spec.location) continue;
      if (h.value.is_finite() && spec.interval.contains(h.value)) {
        out.result.status = Status::Sat;
        out.result.witness = w;
        out.result.verified = true;
        out.result.target_value = h.value;
        out.result.stats.nodes = out.trials_run;
        out.result.stats.time_ms = ms_since(t0);
        return out;
      }
    }
  }
  out.result.status = Status::NotFound;
  out.result.reason = "no hit in " + std::to_string(max_trials) + " random trials";
  out.result.stats.nodes = out.trials_run;
  out.result.stats.time_ms = ms_since(t0);
  return out;
}

}  // namespace fpsolve
