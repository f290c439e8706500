#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "splinequad/asymptotic.hpp"
#include "splinequad/quadrature_rule.hpp"

namespace splinequad {

inline constexpr int kSchemaVersion = 1;

enum class Provenance { Traced, Asymptotic, Hybrid };
std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct RuleDocument {
  int schema_version = kSchemaVersion;
  Provenance provenance = Provenance::Traced;
  QuadratureRule rule;
  std::optional<int> period;  // asymptotic patterns only
};

nlohmann::json to_json(const RuleDocument& doc);
/// Throws std::invalid_argument on a malformed document.
RuleDocument document_from_json(const nlohmann::json& j);

RuleDocument traced_document(const QuadratureRule& rule);
RuleDocument hybrid_document(const QuadratureRule& rule);
/// The pattern as a rule on [0, period].
RuleDocument pattern_document(const AsymptoticPattern& p);

/// The space a document's rule was built for.
SplineSpace document_space(const RuleDocument& doc);

/// Columns element,i,tau,omega with 20 decimals; element and i count from 1.
std::string to_csv(const RuleDocument& doc);

}  // namespace splinequad
