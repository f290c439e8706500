#include "splinequad/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "splinequad/asymptotic.hpp"
#include "splinequad/continuation.hpp"
#include "splinequad/galerkin.hpp"
#include "splinequad/rule_io.hpp"
#include "splinequad/validation.hpp"

namespace splinequad::cli {

using nlohmann::json;

double default_tolerance() {
  const char* env = std::getenv("SPLINEQUAD_TOLERANCE");
  if (!env || !*env) return 1e-12;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v > 0.0)) {
    throw std::invalid_argument("SPLINEQUAD_TOLERANCE must be a positive number");
  }
  return v;
}

namespace {

struct Failure : std::runtime_error {
  std::string kind;
  json extra;
  Failure(std::string k, const std::string& msg, json x = json::object())
      : std::runtime_error(msg), kind(std::move(k)), extra(std::move(x)) {}
};

void report(std::ostream& err, const std::string& kind, const std::string& msg,
            const json& extra = json::object()) {
  json j{{"error", kind}, {"message", msg}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  err << j.dump() << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure("io", "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Failure("malformed", path + ": " + e.what());
  }
}

SplineSpace uniform_target(int d, int c, int N, const std::vector<double>& interval) {
  const double a = interval.empty() ? 0.0 : interval[0];
  const double b = interval.empty() ? static_cast<double>(N) : interval[1];
  return SplineSpace(d, KnotVector::uniform(d, c, N, a, b));
}

struct RuleJob {
  int degree = 0;
  std::optional<int> continuity;
  std::optional<int> elements;
  std::vector<double> interval;
  std::string knots;
};

SplineSpace job_target(const RuleJob& job) {
  if (!job.knots.empty()) {
    const json j = read_json(job.knots);
    if (j.contains("degree") && j["degree"].get<int>() != job.degree) {
      throw Failure("usage", "degree differs from the knot file");
    }
    return SplineSpace(job.degree, knot_vector_from_json(j));
  }
  if (!job.continuity || !job.elements) {
    throw Failure("usage", "give either --knots or both -c and -N");
  }
  return uniform_target(job.degree, *job.continuity, *job.elements, job.interval);
}

TraceConfig config(double tol) {
  TraceConfig cfg;
  cfg.acceptance_tol = tol;
  return cfg;
}

// Runs a trace; throws Failure unless it converged.
RuleDocument traced(const RuleJob& job, double tol) {
  const SplineSpace target = job_target(job);
  TraceResult res;
  try {
    res = trace(target, config(tol));
  } catch (const ParityError& e) {
    throw Failure("parity", e.what());
  }
  if (res.status != TraceStatus::Converged) {
    throw Failure("stalled", res.message,
                  {{"t_reached", res.t_reached},
                   {"steps_taken", res.steps_taken},
                   {"newton_failures", res.newton_failures}});
  }
  return traced_document(res.rule);
}

void emit(std::ostream& out, const RuleDocument& doc, const std::string& format) {
  if (format == "csv") {
    out << to_csv(doc);
  } else {
    out << to_json(doc).dump(2) << '\n';
  }
}

void add_interval(CLI::App* sub, std::vector<double>& interval) {
  sub->add_option("--interval", interval, "Interval a b (default 0 N)")
      ->expected(2);
}

void check_interval(const std::vector<double>& interval) {
  if (!interval.empty() && !(interval.size() == 2 && interval[1] > interval[0])) {
    throw Failure("usage", "--interval needs a < b");
  }
}

int cmd_validate(const std::string& path, int samples, std::uint64_t seed, double tol,
                 std::ostream& out, std::ostream& err) {
  RuleDocument doc;
  try {
    doc = document_from_json(read_json(path));
  } catch (const std::invalid_argument& e) {
    throw Failure("malformed", e.what());
  }
  json j;
  bool ok = false;
  if (doc.provenance == Provenance::Asymptotic) {
    AsymptoticPattern p;
    p.degree = doc.rule.degree;
    p.continuity = doc.rule.continuity.value_or(0);
    p.period = doc.period.value_or(1);
    p.offsets = doc.rule.nodes;
    p.weights = doc.rule.weights;
    const auto F = pattern_residual(p);
    double worst = 0.0;
    for (double f : F) worst = std::max(worst, std::abs(f));
    ok = worst <= tol;
    j = {{"passed", ok}, {"max_basis_error", worst}};
  } else {
    SplineSpace space = document_space(doc);
    const auto rep = validate_rule(space, doc.rule, tol, samples, seed);
    ok = rep.passed;
    j = to_json(rep);
    j["nodes"] = doc.rule.nodes.size();
    j["dimension"] = space.dimension();
  }
  j["tolerance"] = tol;
  out << j.dump(2) << '\n';
  if (!ok) report(err, "validation", j.value("reason", std::string("tolerance exceeded")));
  return ok ? 0 : 1;
}

json batch(const json& spec, double tol) {
  if (!spec.contains("jobs") || !spec["jobs"].is_array()) {
    throw Failure("malformed", "batch file needs a \"jobs\" array");
  }
  std::vector<RuleJob> jobs;
  for (const auto& j : spec["jobs"]) {
    RuleJob job;
    job.degree = j.at("degree").get<int>();
    if (j.contains("continuity")) job.continuity = j["continuity"].get<int>();
    if (j.contains("elements")) job.elements = j["elements"].get<int>();
    if (j.contains("interval")) job.interval = j["interval"].get<std::vector<double>>();
    if (j.contains("knots")) job.knots = j["knots"].get<std::string>();
    jobs.push_back(std::move(job));
  }
  std::vector<std::future<json>> futures;
  for (const auto& job : jobs) {
    futures.push_back(std::async(std::launch::async, [job, tol]() -> json {
      try {
        return to_json(traced(job, tol));
      } catch (const Failure& f) {
        json e{{"error", f.kind}, {"message", f.what()}};
        for (auto& [k, v] : f.extra.items()) e[k] = v;
        return e;
      } catch (const std::exception& ex) {
        return json{{"error", "invalid"}, {"message", ex.what()}};
      }
    }));
  }
  json results = json::array();
  for (auto& f : futures) results.push_back(f.get());
  return json{{"results", results}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal quadrature rules for odd-degree spline spaces", "splinequad"};
  app.require_subcommand(1);
  std::optional<double> tol_opt;
  app.add_option("--tol", tol_opt, "Acceptance tolerance (default $SPLINEQUAD_TOLERANCE or 1e-12)");

  RuleJob job;
  std::string format = "json";
  auto* rule = app.add_subcommand("rule", "Trace the optimal rule of a target space");
  rule->add_option("-d,--degree", job.degree, "Odd degree")->required();
  rule->add_option("-c,--continuity", job.continuity, "Uniform continuity");
  rule->add_option("-N,--elements", job.elements, "Number of uniform elements");
  add_interval(rule, job.interval);
  rule->add_option("--knots", job.knots, "Knot vector JSON {breaks, mults}");
  rule->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  std::string doc_path;
  int samples = 100;
  std::uint64_t seed = 20240531;
  auto* validate = app.add_subcommand("validate", "Check a rule document");
  validate->add_option("document", doc_path, "Rule document (JSON)")->required();
  validate->add_option("--samples", samples, "Random splines")->check(CLI::NonNegativeNumber);
  validate->add_option("--seed", seed, "Random seed");

  int ad = 0, ac = 0;
  auto* asym = app.add_subcommand("asymptotic", "Periodic interior rule");
  asym->add_option("-d,--degree", ad)->required();
  asym->add_option("-c,--continuity", ac)->required();
  asym->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  int hd = 0, hc = 0, hN = 0;
  std::optional<int> depth;
  std::vector<double> hinterval;
  auto* hyb = app.add_subcommand("hybrid", "Traced boundary with asymptotic interior");
  hyb->add_option("-d,--degree", hd)->required();
  hyb->add_option("-c,--continuity", hc)->required();
  hyb->add_option("-N,--elements", hN)->required();
  hyb->add_option("--boundary-depth", depth, "Traced elements kept at each end");
  add_interval(hyb, hinterval);
  hyb->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  DiscretizationSpec spec;
  int gN = 0;
  std::vector<double> ginterval;
  std::string matrix, matrix_format = "csv";
  auto* asmb = app.add_subcommand("assemble", "Mass and stiffness matrices with the optimal rule");
  asmb->add_option("-p", spec.p, "Trial degree")->required();
  asmb->add_option("-k", spec.k, "Trial continuity")->required();
  asmb->add_option("-l", spec.l, "Derivative order")->required();
  asmb->add_option("-N,--elements", gN)->required();
  add_interval(asmb, ginterval);
  asmb->add_option("--matrix", matrix, "Print this matrix instead of the report")
      ->check(CLI::IsMember({"mass", "stiffness"}));
  asmb->add_option("--matrix-format", matrix_format)->check(CLI::IsMember({"csv", "triplets"}));

  std::string batch_path;
  auto* bat = app.add_subcommand("batch", "Trace several targets in parallel");
  bat->add_option("file", batch_path, "JSON {\"jobs\": [{degree, continuity, elements}...]}")
      ->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const double tol = tol_opt ? *tol_opt : default_tolerance();
    if (!(tol > 0.0)) throw Failure("usage", "tolerance must be positive");

    if (*rule) {
      check_interval(job.interval);
      emit(out, traced(job, tol), format);
      return 0;
    }
    if (*validate) return cmd_validate(doc_path, samples, seed, tol, out, err);
    if (*asym) {
      AsymptoticPattern p;
      try {
        p = asymptotic_rule(ad, ac);
      } catch (const std::runtime_error& e) {
        throw Failure("unsupported", e.what());
      }
      emit(out, pattern_document(p), format);
      const auto F = pattern_residual(p);
      double worst = 0.0;
      for (double f : F) worst = std::max(worst, std::abs(f));
      if (worst > tol) {
        report(err, "validation", "pattern defect above tolerance", {{"max_defect", worst}});
        return 1;
      }
      return 0;
    }
    if (*hyb) {
      check_interval(hinterval);
      if (!depth) depth = default_boundary_depth(hd, hc);
      if (!depth) {
        throw Failure("usage", "no default boundary depth for continuity >= 2; "
                               "pass --boundary-depth");
      }
      const Interval iv = hinterval.empty() ? Interval{0.0, static_cast<double>(hN)}
                                            : Interval{hinterval[0], hinterval[1]};
      QuadratureRule r;
      try {
        r = hybrid_rule(hd, hc, hN, *depth, iv, config(tol));
      } catch (const ParityError& e) {
        throw Failure("parity", e.what());
      }
      emit(out, hybrid_document(r), format);
      const SplineSpace target(hd, KnotVector::uniform(hd, hc, hN, iv.a, iv.b));
      if (auto why = check_rule(target, r, config(tol))) {
        report(err, "validation", *why, {{"residual_norm", r.residual_norm}});
        return 1;
      }
      return 0;
    }
    if (*asmb) {
      check_interval(ginterval);
      spec.validate();
      const double a = ginterval.empty() ? 0.0 : ginterval[0];
      const double b = ginterval.empty() ? static_cast<double>(gN) : ginterval[1];
      const auto mesh = KnotVector::uniform(1, 0, gN, a, b);
      SavingsReport rep;
      try {
        if (!matrix.empty()) {
          const auto M = assemble(spec, mesh, optimal_rule(spec, mesh, config(tol)));
          const auto& A = matrix == "mass" ? M.mass : M.stiffness;
          out << (matrix_format == "csv" ? to_csv(A) : to_triplets(A));
          return 0;
        }
        rep = savings_report(spec, mesh, config(tol));
      } catch (const ParityError& e) {
        throw Failure("parity", e.what());
      }
      const auto [d, c] = rule_space(spec);
      json j{{"p", spec.p}, {"k", spec.k}, {"l", spec.l},
             {"rule_degree", d}, {"rule_continuity", c},
             {"elements", rep.elements},
             {"classical", {{"nodes", rep.classical_nodes},
                            {"evaluations", rep.classical_evaluations},
                            {"interior_nodes_per_element", rep.classical_interior_per_element}}},
             {"optimal", {{"nodes", rep.optimal_nodes},
                          {"evaluations", rep.optimal_evaluations},
                          {"interior_nodes_per_element", rep.optimal_interior_per_element}}},
             {"mass_difference", rep.mass_difference},
             {"stiffness_difference", rep.stiffness_difference}};
      out << j.dump(2) << '\n';
      if (!(rep.mass_difference <= tol && rep.stiffness_difference <= tol)) {
        report(err, "validation", "matrices differ beyond tolerance");
        return 1;
      }
      return 0;
    }
    if (*bat) {
      const json res = batch(read_json(batch_path), tol);
      out << res.dump(2) << '\n';
      for (const auto& r : res["results"]) {
        if (r.contains("error")) return 1;
      }
      return 0;
    }
  } catch (const Failure& f) {
    report(err, f.kind, f.what(), f.extra);
    return f.kind == "usage" ? 2 : 1;
  } catch (const std::invalid_argument& e) {
    report(err, "invalid", e.what());
    return 2;
  } catch (const std::exception& e) {
    report(err, "internal", e.what());
    return 1;
  }
  return 2;
}

}  // namespace splinequad::cli
