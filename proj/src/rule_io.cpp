#include "splinequad/rule_io.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace splinequad {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Traced: return "traced";
    case Provenance::Asymptotic: return "asymptotic";
    case Provenance::Hybrid: return "hybrid";
  }
  return "traced";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "traced") return Provenance::Traced;
  if (s == "asymptotic") return Provenance::Asymptotic;
  if (s == "hybrid") return Provenance::Hybrid;
  throw std::invalid_argument("unknown provenance '" + s + "'");
}

nlohmann::json to_json(const RuleDocument& doc) {
  const auto& r = doc.rule;
  nlohmann::json j;
  j["schema_version"] = doc.schema_version;
  j["provenance"] = to_string(doc.provenance);
  j["degree"] = r.degree;
  j["continuity"] = r.continuity ? nlohmann::json(*r.continuity) : nlohmann::json(nullptr);
  j["breaks"] = r.breaks;
  j["mults"] = r.mults;
  j["interval"] = {r.interval.a, r.interval.b};
  if (doc.period) j["period"] = *doc.period;
  j["nodes"] = r.nodes;
  j["weights"] = r.weights;
  j["residual_norm"] = r.residual_norm;
  if (r.trace) {
    j["trace"] = {{"steps_taken", r.trace->steps_taken},
                  {"newton_failures", r.trace->newton_failures},
                  {"t_reached", r.trace->t_reached}};
  }
  return j;
}

RuleDocument document_from_json(const nlohmann::json& j) {
  try {
    RuleDocument doc;
    doc.schema_version = j.at("schema_version").get<int>();
    if (doc.schema_version != kSchemaVersion) {
      throw std::invalid_argument("unsupported schema_version");
    }
    doc.provenance = provenance_from_string(j.at("provenance").get<std::string>());
    auto& r = doc.rule;
    r.degree = j.at("degree").get<int>();
    if (j.contains("continuity") && !j["continuity"].is_null()) {
      r.continuity = j["continuity"].get<int>();
    }
    r.breaks = j.at("breaks").get<std::vector<double>>();
    r.mults = j.at("mults").get<std::vector<int>>();
    const auto iv = j.at("interval").get<std::vector<double>>();
    if (iv.size() != 2) throw std::invalid_argument("interval needs two entries");
    r.interval = Interval{iv[0], iv[1]};
    if (j.contains("period")) doc.period = j["period"].get<int>();
    r.nodes = j.at("nodes").get<std::vector<double>>();
    r.weights = j.at("weights").get<std::vector<double>>();
    if (r.nodes.size() != r.weights.size()) {
      throw std::invalid_argument("nodes and weights differ in length");
    }
    r.residual_norm = j.value("residual_norm", 0.0);
    if (j.contains("trace")) {
      const auto& t = j["trace"];
      r.trace = TraceStats{t.at("steps_taken").get<int>(), t.at("newton_failures").get<int>(),
                           t.at("t_reached").get<double>()};
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed rule document: ") + e.what());
  }
}

RuleDocument traced_document(const QuadratureRule& rule) {
  return RuleDocument{kSchemaVersion, Provenance::Traced, rule, std::nullopt};
}

RuleDocument hybrid_document(const QuadratureRule& rule) {
  return RuleDocument{kSchemaVersion, Provenance::Hybrid, rule, std::nullopt};
}

RuleDocument pattern_document(const AsymptoticPattern& p) {
  QuadratureRule r;
  r.degree = p.degree;
  r.continuity = p.continuity;
  r.interval = Interval{0.0, static_cast<double>(p.period)};
  for (int e = 0; e <= p.period; ++e) r.breaks.push_back(e);
  r.mults.assign(p.period + 1, p.degree - p.continuity);
  r.nodes = p.offsets;
  r.weights = p.weights;
  r.residual_norm = p.residual_norm;
  return RuleDocument{kSchemaVersion, Provenance::Asymptotic, std::move(r), p.period};
}

SplineSpace document_space(const RuleDocument& doc) {
  if (doc.provenance == Provenance::Asymptotic) {
    throw std::invalid_argument("asymptotic patterns have no finite space");
  }
  const auto& r = doc.rule;
  return SplineSpace(r.degree, KnotVector(r.breaks, r.mults));
}

std::string to_csv(const RuleDocument& doc) {
  const auto& r = doc.rule;
  std::string out = "element,i,tau,omega\n";
  char buf[128];
  for (std::size_t j = 0; j < r.nodes.size(); ++j) {
    const auto& br = r.breaks;
    long e = 1;
    if (br.size() >= 2) {
      e = std::upper_bound(br.begin(), br.end(), r.nodes[j]) - br.begin();
      e = std::clamp<long>(e, 1, static_cast<long>(br.size()) - 1);
    }
    std::snprintf(buf, sizeof buf, "%ld,%zu,%.20f,%.20f\n", e, j + 1, r.nodes[j], r.weights[j]);
    out += buf;
  }
  return out;
}

}  // namespace splinequad
