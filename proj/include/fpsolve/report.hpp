#ifndef FPSOLVE_REPORT_HPP
#define FPSOLVE_REPORT_HPP

#include <string>

#include <json.hpp>

#include "fpsolve/frontend.hpp"

namespace fpsolve {

/// Machine-readable run summary; one per solve/gentest invocation.
struct RunReport {
  struct Value {
    std::string dec, hex;
    bool operator==(const Value&) const = default;
  };

  std::string status;                    // "sat" | "unsat" | "notfound" | "unknown"
  std::map<std::string, Value> witness;  // present iff sat
  std::optional<Value> target;           // value at the annotation, sat only
  bool verified = false;                 // always true for sat
  std::string strategy;
  SolveStats stats;
  std::vector<std::string> path;  // branch decisions of the verified replay
  std::string reason;             // unknown/notfound detail
  std::string program_digest;     // FNV-1a 64 of the source text
  std::string tolerance;

  bool operator==(const RunReport& o) const;

  nlohmann::json to_json() const;
  static RunReport from_json(const nlohmann::json& j);

  std::string to_text() const;

  /// 0 sat, 1 unsat, 2 notfound/unknown.
  int exit_code() const;
};

RunReport make_report(const PipelineResult& pr, const Program& p, Strategy strategy);
RunReport make_report(const GenTestResult& gr, const Program& p);

uint64_t fnv1a64(const std::string& data);

}  // namespace fpsolve

#endif  // FPSOLVE_REPORT_HPP
