#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#ifndef SPLINEQUAD_DATA_DIR
#error "SPLINEQUAD_DATA_DIR must be defined"
#endif

namespace golden {

struct Row {
  int element = 0;
  int i = 0;
  double tau = 0.0;
  double omega = 0.0;
  std::string provenance;
};

struct Table {
  std::string name;
  int degree = 0;
  int continuity = -2;
  int elements = 0;
  std::string knots;
  double a = 0.0, b = 0.0;
  std::vector<Row> rows;
};

inline std::string data_path(const std::string& rel) {
  return std::string(SPLINEQUAD_DATA_DIR) + "/" + rel;
}

inline nlohmann::json read(const std::string& rel) {
  std::ifstream in(data_path(rel));
  return nlohmann::json::parse(in);
}

inline Table load(const std::string& name) {
  const auto j = read("golden/" + name + ".json");
  Table t;
  t.name = name;
  t.degree = j.at("degree").get<int>();
  if (j.contains("continuity")) t.continuity = j["continuity"].get<int>();
  if (j.contains("elements")) t.elements = j["elements"].get<int>();
  if (j.contains("knots")) t.knots = j["knots"].get<std::string>();
  t.a = j["interval"][0].get<double>();
  t.b = j["interval"][1].get<double>();
  for (const auto& r : j.at("rows")) {
    t.rows.push_back({r.at("element").get<int>(), r.at("i").get<int>(),
                      std::stod(r.at("tau").get<std::string>()),
                      std::stod(r.at("omega").get<std::string>()),
                      r.at("provenance").get<std::string>()});
  }
  return t;
}

}  // namespace golden
