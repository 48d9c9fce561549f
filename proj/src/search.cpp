#include "fpsolve/search.hpp"

#include <cstdlib>

namespace fpsolve {

Strategy strategy_from_string(const std::string& s) {
  if (s == "std") return Strategy::Std;
  if (s == "fpc") return Strategy::Fpc;
  if (s == "fp3s" || s == "fpc3s") return Strategy::Fp3s;
  throw std::invalid_argument("unknown strategy: " + s);
}

std::string strategy_to_string(Strategy s) {
  switch (s) {
    case Strategy::Std: return "std";
    case Strategy::Fpc: return "fpc";
    case Strategy::Fp3s: return "fp3s";
  }
  return "?";
}

std::string status_to_string(Status s) {
  switch (s) {
    case Status::Sat: return "sat";
    case Status::Unsat: return "unsat";
    case Status::NotFound: return "not-found";
    case Status::Unknown: return "unknown";
  }
  return "?";
}

std::optional<VarId> select_variable(const ConstraintStore& store) {
  std::optional<VarId> best;
  mpq_class best_width;
  for (VarId v : store.inputs()) {
    const FpInterval& d = store.domain(v);
    if (d.count() <= 1) continue;
    mpq_class w = d.width();
    if (!best || w > best_width ||
        (w == best_width && store.name(v) < store.name(*best))) {
      best = v;
      best_width = w;
    }
  }
  return best;
}

namespace {

// Rounded arithmetic midpoint lo + (hi-lo)/2, replaced by the ordinal
// midpoint when it collides with an endpoint.
FloatValue split_midpoint(const FpInterval& X, bool force_ordinal) {
  const FloatFormat& fmt = X.format();
  int64_t olo = ordinal(X.lo()), ohi = ordinal(X.hi());
  int64_t omid = olo + (ohi - olo) / 2;
  if (force_ordinal) return from_ordinal(omid, fmt);
  mpq_class mean = (to_rational(X.lo()) + to_rational(X.hi())) / 2;
  Rounded r = round_nearest_even(mean, fmt);
  FloatValue m = r.value;  // a mean of finite values cannot overflow
  if (m == X.lo() || m == X.hi()) m = from_ordinal(omid, fmt);
  return m;
}

}  // namespace

std::vector<FpInterval> split(const FpInterval& X, Strategy strategy, bool std_ordinal_midpoint) {
  if (X.is_empty() || X.count() < 2)
    throw std::invalid_argument("split of a degenerate interval");
  FloatValue l = X.lo(), r = X.hi();
  if (X.count() == 2) return {FpInterval::singleton(l), FpInterval::singleton(r)};
  FloatValue m = split_midpoint(X, strategy == Strategy::Std && std_ordinal_midpoint);

  std::vector<FpInterval> out;
  switch (strategy) {
    case Strategy::Std:
      out.push_back(FpInterval(l, m));
      out.push_back(FpInterval(succ(m), r));
      break;
    case Strategy::Fpc: {
      // Singletons first: boundary and midpoint values are the likeliest
      // witnesses, and checking them is cheap before the interval pieces.
      out.push_back(FpInterval::singleton(l));
      out.push_back(FpInterval::singleton(m));
      out.push_back(FpInterval::singleton(r));
      if (ordinal(succ(l)) <= ordinal(pred(m)))
        out.push_back(FpInterval(succ(l), pred(m)));
      if (ordinal(succ(m)) <= ordinal(pred(r)))
        out.push_back(FpInterval(succ(m), pred(r)));
      break;
    }
    case Strategy::Fp3s:
      out.push_back(FpInterval::singleton(l));
      out.push_back(FpInterval::singleton(m));
      out.push_back(FpInterval::singleton(r));
      break;
  }
  return out;
}

namespace {

enum class LogLevel { Off, Stats, Trace };

LogLevel log_level() {
  const char* env = std::getenv("FPCS_LOG");
  if (!env) return LogLevel::Off;
  std::string v(env);
  if (v == "trace") return LogLevel::Trace;
  if (v == "stats") return LogLevel::Stats;
  return LogLevel::Off;
}

struct Search {
  const SuspectSpec& spec;
  const SolverConfig& cfg;
  const WitnessVerifier& verify;
  SolveResult result = {};
  bool limit_hit = false;
  std::string limit_reason = {};
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  LogLevel log = log_level();
  // fp3s is the quick, deliberately incomplete sampler: it probes a constant
  // number of points per variable, so it runs on the damped (bounded-cost)
  // propagation regime instead of chasing exact binary32 fixpoints.
  PropagationEffort effort = cfg.strategy == Strategy::Fp3s ? PropagationEffort::Damped
                                                            : PropagationEffort::Exact;

  bool out_of_budget() {
    if (cfg.node_limit && result.stats.nodes >= cfg.node_limit) {
      limit_hit = true;
      limit_reason = "node limit reached";
      return true;
    }
    auto elapsed = std::chrono::steady_clock::now() - start;
    if (elapsed >= cfg.timeout) {
      limit_hit = true;
      limit_reason = "timeout";
      return true;
    }
    return false;
  }

  // Returns true when a verified witness was found (stops the search).
  // seed names the variable whose domain changed since the parent's fixpoint.
  bool dfs(ConstraintStore store, uint32_t depth, std::optional<VarId> seed) {
    ++result.stats.nodes;
    result.stats.max_depth = std::max(result.stats.max_depth, depth);
    if (out_of_budget()) return false;

    PropagateStats p =
        seed ? propagate_2b(store, {*seed}, effort) : propagate_2b(store, effort);
    result.stats.propagations += p.projections;
    if (store.failed()) return false;
    if (cfg.shave_at_nodes && depth > 0) {
      p = filter_3b(store, cfg.shave_fraction, effort);
      result.stats.propagations += p.projections;
      if (store.failed()) return false;
    }

    std::optional<VarId> v = select_variable(store);
    if (!v) {
      // all inputs instantiated: replay concretely and accept only a real hit
      std::map<std::string, FloatValue> witness;
      for (VarId in : store.inputs()) witness[store.name(in)] = store.domain(in).lo();
      std::optional<FloatValue> value = verify(witness);
      if (log == LogLevel::Trace) {
        fprintf(stderr, "[fpcs] leaf depth=%u %s\n", depth,
                value ? to_decimal_string(*value).c_str() : "(ct not reached)");
      }
      if (value && spec.interval.contains(*value)) {
        result.witness = std::move(witness);
        result.target_value = value;
        result.verified = true;
        return true;
      }
      return false;
    }

    for (const FpInterval& piece : split(store.domain(*v), cfg.strategy,
                                         cfg.std_ordinal_midpoint)) {
      ConstraintStore child = store;
      child.set_domain(*v, piece);
      if (dfs(std::move(child), depth + 1, *v)) return true;
      if (limit_hit) return false;
    }
    return false;
  }
};

}  // namespace

SolveResult solve(ConstraintStore store, const SuspectSpec& spec, const SolverConfig& cfg,
                  const WitnessVerifier& verify) {
  Search s{spec, cfg, verify};

  PropagateStats p = propagate_2b(store, s.effort);
  s.result.stats.propagations += p.projections;
  bool found = false;
  if (!store.failed()) {
    if (cfg.shave_at_root) {
      p = filter_3b(store, cfg.shave_fraction, s.effort);
      s.result.stats.propagations += p.projections;
    }
    if (!store.failed()) found = s.dfs(std::move(store), 0, std::nullopt);
  }

  if (found)
    s.result.status = Status::Sat;
  else if (s.limit_hit) {
    s.result.status = Status::Unknown;
    s.result.reason = s.limit_reason;
  } else
    s.result.status = cfg.strategy == Strategy::Fp3s ? Status::NotFound : Status::Unsat;

  s.result.stats.time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - s.start)
          .count();
  if (s.log != LogLevel::Off) {
    fprintf(stderr, "[fpcs] %s nodes=%llu propagations=%llu depth=%u time=%.1fms\n",
            status_to_string(s.result.status).c_str(),
            static_cast<unsigned long long>(s.result.stats.nodes),
            static_cast<unsigned long long>(s.result.stats.propagations),
            s.result.stats.max_depth, s.result.stats.time_ms);
  }
  return s.result;
}

}  // namespace fpsolve
