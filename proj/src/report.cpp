#include <sstream>

#include "fpsolve/report.hpp"

namespace fpsolve {

uint64_t fnv1a64(const std::string& data) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

namespace {

std::string hex64(uint64_t v) {
  char buf[19];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

RunReport::Value value_of(const FloatValue& v) {
  return {to_decimal_string(v), to_hex_string(v)};
}

std::string status_name(Status s) {
  switch (s) {
    case Status::Sat: return "sat";
    case Status::Unsat: return "unsat";
    case Status::NotFound: return "notfound";
    default: return "unknown";
  }
}

RunReport base_report(const SolveResult& r, const Program& p) {
  RunReport rep;
  rep.status = status_name(r.status);
  rep.verified = r.verified;
  if (r.status == Status::Sat) {
    for (const auto& [name, v] : r.witness) rep.witness[name] = value_of(v);
    if (r.target_value) rep.target = value_of(*r.target_value);
  }
  rep.stats = r.stats;
  rep.reason = r.reason;
  rep.program_digest = hex64(fnv1a64(p.source));
  return rep;
}

}  // namespace

bool RunReport::operator==(const RunReport& o) const {
  return status == o.status && witness == o.witness && target == o.target &&
         verified == o.verified && strategy == o.strategy && stats.nodes == o.stats.nodes &&
         stats.propagations == o.stats.propagations && path == o.path && reason == o.reason &&
         program_digest == o.program_digest && tolerance == o.tolerance;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["status"] = status;
  nlohmann::json w = nlohmann::json::object();
  for (const auto& [name, v] : witness) w[name] = {{"dec", v.dec}, {"hex", v.hex}};
  j["witness"] = w;
  if (target) j["target"] = {{"dec", target->dec}, {"hex", target->hex}};
  j["verified"] = verified;
  j["strategy"] = strategy;
  j["stats"] = {{"nodes", stats.nodes},
                {"propagations", stats.propagations},
                {"time_ms", stats.time_ms}};
  j["path"] = path;
  if (!reason.empty()) j["reason"] = reason;
  j["program_digest"] = program_digest;
  j["tolerance"] = tolerance;
  return j;
}

RunReport RunReport::from_json(const nlohmann::json& j) {
  RunReport r;
  r.status = j.at("status").get<std::string>();
  for (const auto& [name, v] : j.at("witness").items())
    r.witness[name] = {v.at("dec").get<std::string>(), v.at("hex").get<std::string>()};
  if (j.contains("target"))
    r.target = Value{j["target"].at("dec").get<std::string>(),
                     j["target"].at("hex").get<std::string>()};
  r.verified = j.at("verified").get<bool>();
  r.strategy = j.at("strategy").get<std::string>();
  r.stats.nodes = j.at("stats").at("nodes").get<uint64_t>();
  r.stats.propagations = j.at("stats").at("propagations").get<uint64_t>();
  r.stats.time_ms = j.at("stats").at("time_ms").get<double>();
  r.path = j.at("path").get<std::vector<std::string>>();
  if (j.contains("reason")) r.reason = j["reason"].get<std::string>();
  r.program_digest = j.at("program_digest").get<std::string>();
  r.tolerance = j.at("tolerance").get<std::string>();
  return r;
}

std::string RunReport::to_text() const {
  std::ostringstream os;
  os << "status:    " << status << "\n";
  if (!witness.empty()) {
    os << "witness:\n";
    for (const auto& [name, v] : witness)
      os << "  " << name << " = " << v.dec << "  (" << v.hex << ")\n";
  }
  if (target) os << "target:    " << target->dec << "  (" << target->hex << ")\n";
  if (status == "sat") os << "verified:  " << (verified ? "yes" : "NO") << "\n";
  if (!reason.empty()) os << "reason:    " << reason << "\n";
  if (!path.empty()) {
    os << "path:\n";
    for (const auto& d : path) os << "  " << d << "\n";
  }
  if (!strategy.empty()) os << "strategy:  " << strategy << "\n";
  os << "stats:     nodes=" << stats.nodes << " propagations=" << stats.propagations
     << " time_ms=" << stats.time_ms << "\n";
  os << "digest:    " << program_digest << "\n";
  return os.str();
}

int RunReport::exit_code() const {
  if (status == "sat") return 0;
  if (status == "unsat") return 1;
  return 2;
}

RunReport make_report(const PipelineResult& pr, const Program& p, Strategy strategy) {
  RunReport rep = base_report(pr.result, p);
  rep.strategy = strategy_to_string(strategy);
  rep.path = pr.witness_path;
  rep.tolerance = pr.spec.tolerance;
  return rep;
}

RunReport make_report(const GenTestResult& gr, const Program& p) {
  RunReport rep = base_report(gr.result, p);
  rep.strategy = "gentest";
  rep.tolerance = gr.spec.tolerance;
  return rep;
}

}  // namespace fpsolve
