#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bregman/quantum.hpp"
#include "bregman/suite.hpp"
#include "cli_io.hpp"

using namespace bregman;
using namespace bregman::cli;

namespace {

struct Flags {
  std::string input, output, trace, format = "json";
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::optional<int> max_cycles;
};

// Exit codes.
constexpr int kOk = 0, kFail = 1, kSchema = 2, kInfeasible = 3, kTolerance = 4;

struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_document(const Flags& f, bool optional) {
  std::string text;
  if (!f.input.empty()) {
    std::ifstream in(f.input);
    if (!in) throw SchemaError("/", "cannot read input file " + f.input);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else if (optional) {
    return json::object({{"version", "1"}});
  } else {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("invalid JSON: ") + e.what());
  }
}

void write_text(const Flags& f, const std::string& text) {
  if (f.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(f.output);
  if (!out) throw std::runtime_error("cannot write " + f.output);
  out << text;
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), rows);
  } else if (j.is_number_float()) {
    rows.emplace_back(prefix, format_number(j.get<double>()));
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

void emit(const Flags& f, const json& result, const std::string& def) {
  result_validator().validate(result, def);
  if (f.format == "csv") {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(result, "", rows);
    std::string text = "field,value\n";
    for (const auto& [k, v] : rows) {
      const bool quote = v.find_first_of(",\"\n") != std::string::npos;
      std::string cell = v;
      if (quote) {
        cell.clear();
        for (char c : v) cell += c == '"' ? std::string("\"\"") : std::string(1, c);
        cell = "\"" + cell + "\"";
      }
      text += k + "," + cell + "\n";
    }
    write_text(f, text);
  } else {
    write_text(f, dump(result));
  }
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace " + path);
  out << text;
}

std::string trace_csv(const SolveTrace& t) {
  std::string s = "cycle,displacement,divergence_to_prev\n";
  for (const auto& r : t.records)
    s += std::to_string(r.cycle) + "," + csv_number(r.displacement) + "," + csv_number(r.divergence_to_prev) + "\n";
  return s;
}

SolveConfig solve_config(const json& doc, const Flags& f) {
  SolveConfig cfg;
  if (doc.contains("config")) {
    const json& c = doc["config"];
    if (c.contains("max_cycles")) cfg.max_cycles = c["max_cycles"].get<int>();
    if (c.contains("tol")) cfg.residual_tol = c["tol"].get<double>();
  }
  if (f.tol) cfg.residual_tol = *f.tol;
  if (f.max_cycles) cfg.max_cycles = *f.max_cycles;
  cfg.trace = !f.trace.empty();
  return cfg;
}

void validate_doc(const json& doc, const std::string& def) { problem_validator().validate(doc, def); }

// Infers the ambient of a divergence-only document from its first point.
void require_ambient_from(Context& ctx, const json& doc, std::initializer_list<const char*> keys,
                          bool list) {
  if (ctx.ambient) return;
  for (const char* k : keys) {
    if (!doc.contains(k)) continue;
    const json& v = list ? doc[k][0] : doc[k];
    ctx.ambient = parse_point(v, std::nullopt, "/" + std::string(k) + (list ? "/0" : "")).ambient();
    return;
  }
}

// Kraus-type operations fix the ambient when no point does.
void ambient_from_maps(Context& ctx, const json& doc, const char* key) {
  if (ctx.ambient || !doc.contains(key)) return;
  for (const auto& m : doc[key])
    if (m.contains("dim")) {
      ctx.ambient = Ambient::matrix(m["dim"].get<long>());
      return;
    }
}

// ---------------------------------------------------------------------------

int cmd_divergence(const Flags& f) {
  const json doc = read_document(f, false);
  validate_doc(doc, "divergence_doc");
  Context ctx = parse_context(doc, true);
  const Point omega = parse_point(doc["omega"], ctx.ambient, "/omega");
  const Point phi = parse_point(doc["phi"], omega.ambient(), "/phi");
  ExtendedReal v;
  try {
    v = (*ctx.divergence)(omega, phi);
  } catch (const ArgumentError& e) {
    throw SchemaError("/omega", e.what());
  }
  emit(f, {{"command", "divergence"}, {"divergence", ctx.divergence->name}, {"value", real_json(v)}},
       "divergence_result");
  return kOk;
}

int cmd_project(const Flags& f) {
  const json doc = read_document(f, false);
  validate_doc(doc, "project_doc");
  const Context ctx = parse_context(doc, false);
  const DivergenceSpec& spec = *ctx.spec;
  const Point y = parse_point(doc["y"], spec.ambient(), "/y");
  const ConstraintSet target = parse_set(doc["target"], spec.ambient(), "/target");
  const Side side = doc.value("side", std::string("left")) == "right" ? Side::Right : Side::Left;
  const SolveConfig cfg = solve_config(doc, f);

  ProjectionResult r;
  try {
    r = side == Side::Left ? left_project(spec, target, y, cfg) : right_project(spec, target, y, cfg);
  } catch (const DomainError& e) {
    throw SchemaError("/y", e.what());
  } catch (const InfeasibleError& e) {
    if (!f.trace.empty()) write_trace_file(f.trace, trace_csv(e.trace()));
    throw;
  } catch (const ToleranceError&) {
    throw;
  }
  if (!f.trace.empty()) write_trace_file(f.trace, trace_csv(r.trace));
  if (r.status == ProjectionStatus::Empty) throw Infeasible("empty arrow");
  if (r.status != ProjectionStatus::Ok) throw std::runtime_error("projection unsupported: " + r.method);
  const ExtendedReal d = side == Side::Left ? embedded_divergence(spec, r.point, y) : embedded_divergence(spec, y, r.point);
  emit(f,
       {{"command", "project"},
        {"side", to_string(side)},
        {"method", r.method},
        {"point", point_json(r.point)},
        {"divergence", real_json(d)},
        {"cycles", r.trace.records.size()},
        {"converged", r.trace.records.empty() || r.trace.converged}},
       "project_result");
  return kOk;
}

int cmd_compose(const Flags& f) {
  const json doc = read_document(f, false);
  validate_doc(doc, "compose_doc");
  const Context ctx = parse_context(doc, false);
  const DivergenceSpec& spec = *ctx.spec;
  const Ambient amb = spec.ambient();
  const std::optional<ConstraintSet> anchor =
      doc.contains("anchor") ? std::optional(parse_set(doc["anchor"], amb, "/anchor")) : std::nullopt;

  std::optional<ProjectionOperator> composite;
  std::optional<HomMonoidElement> element;
  for (std::size_t i = 0; i < doc["targets"].size(); ++i) {
    const std::string ptr = pointer_join("/targets", i);
    const ConstraintSet t = parse_set(doc["targets"][i], amb, ptr);
    if (anchor) {
      HomMonoidElement e = [&] {
        try {
          return HomMonoidElement::make(spec, t, *anchor);
        } catch (const ArgumentError& err) {
          throw SchemaError(ptr, err.what());
        }
      }();
      element = element ? compose_diamond(*element, e) : e;
    } else {
      ProjectionOperator op(Side::Left, spec, t);
      composite = composite ? diamond(*composite, op) : op;
    }
  }
  const ProjectionOperator& op = element ? element->op : *composite;
  json out = {{"command", "compose"}, {"target", op.target.describe()}, {"empty", op.target.is_empty()}};
  if (anchor) {
    const Verdict v = subset_of(op.target, *anchor).verdict;
    out["within_anchor"] = v == Verdict::True ? "true" : v == Verdict::False ? "false" : "unknown";
  }
  if (doc.contains("y")) {
    const Point y = parse_point(doc["y"], amb, "/y");
    if (op.target.is_empty()) throw Infeasible("empty arrow");
    const SolveConfig cfg = solve_config(doc, f);
    ProjectionResult r;
    try {
      r = op.run(y, cfg);
    } catch (const DomainError& e) {
      throw SchemaError("/y", e.what());
    } catch (const InfeasibleError& e) {
      if (!f.trace.empty()) write_trace_file(f.trace, trace_csv(e.trace()));
      throw;
    }
    if (!f.trace.empty()) write_trace_file(f.trace, trace_csv(r.trace));
    if (r.status == ProjectionStatus::Empty) throw Infeasible("empty arrow");
    out["method"] = r.method;
    out["point"] = point_json(r.point);
  }
  emit(f, out, "compose_result");
  return kOk;
}

MapClass class_of(const std::string& s) {
  return s == "CN" ? MapClass::CN : s == "LSQ" ? MapClass::LSQ : MapClass::RSQ;
}

int cmd_certify(const Flags& f) {
  const json doc = read_document(f, false);
  validate_doc(doc, "certify_doc");
  Context ctx = parse_context(doc, true);
  require_ambient_from(ctx, doc, {"samples", "fixed_points"}, true);
  if (!ctx.ambient && doc["map"].contains("dim")) ctx.ambient = Ambient::matrix(doc["map"]["dim"].get<long>());
  if (!ctx.ambient) throw SchemaError("/samples", "the state space cannot be inferred; supply samples");
  const CandidateMap T = parse_map(doc["map"], ctx, "/map", 0);
  const MapClass cls = class_of(doc["class"].get<std::string>());

  std::vector<Point> samples;
  if (doc.contains("samples")) {
    samples = parse_points(doc["samples"], ctx.ambient, "/samples");
  } else {
    Rng rng(f.seed);
    const StateSampler sampler = default_sampler(ctx);
    const int n = doc.value("sample_count", 20);
    for (int i = 0; i < n; ++i) samples.push_back(sampler(rng));
  }
  std::vector<Point> fixed;
  if (doc.contains("fixed_points")) {
    fixed = parse_points(doc["fixed_points"], ctx.ambient, "/fixed_points");
  } else if (cls != MapClass::CN) {
    // Images of a quasi-nonexpansive projection-like map are fixed points.
    for (const auto& s : samples) {
      try {
        const Point p = T.map(s);
        if (distance(T.map(p), p) <= 1e-9) fixed.push_back(p);
      } catch (const Error&) {
      }
      if (fixed.size() >= 5) break;
    }
    if (fixed.empty()) throw SchemaError("/fixed_points", "not supplied and none found among the sample images");
  }
  CertificateReport rep;
  try {
    rep = certify_class(T.map, samples, fixed, *ctx.divergence, cls);
  } catch (const ArgumentError& e) {
    throw SchemaError("/fixed_points", e.what());
  }
  json out = {{"command", "certify"},
              {"class", to_string(cls)},
              {"verdict", rep.pass ? "PASS" : "FAIL"},
              {"max_violation", real_json(rep.max_violation)},
              {"pairs", rep.pairs}};
  if (rep.partial) {
    out["partial"] = true;
    out["note"] = rep.sequence_note;
  }
  if (!rep.pass && rep.witness) out["witness"] = json::array({point_json(rep.witness->first), point_json(rep.witness->second)});
  emit(f, out, "certify_result");
  return rep.pass ? kOk : kFail;
}

ParametrizedModel model_of(const json& pts, const std::string& ptr, Ambient& amb) {
  std::vector<Point> images = parse_points(pts, std::nullopt, ptr);
  amb = images.front().ambient();
  for (std::size_t i = 0; i < images.size(); ++i)
    if (!(images[i].ambient() == amb)) throw SchemaError(pointer_join(ptr, i), "points of a model must share one shape");
  std::vector<Eigen::VectorXd> grid;
  for (std::size_t i = 0; i < images.size(); ++i) grid.push_back(Eigen::VectorXd::Constant(1, static_cast<double>(i)));
  try {
    return ParametrizedModel(std::move(grid), std::move(images));
  } catch (const ConstructionError& e) {
    throw SchemaError(ptr, e.what());
  }
}

json reals(const std::vector<ExtendedReal>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(real_json(x));
  return a;
}

int cmd_deficiency(const Flags& f) {
  const json doc = read_document(f, false);
  validate_doc(doc, "deficiency_doc");
  Context ctx = parse_context(doc, true);
  Ambient a1, a2;
  const ParametrizedModel M1 = model_of(doc["model1"], "/model1", a1);
  const ParametrizedModel M2 = model_of(doc["model2"], "/model2", a2);
  if (M1.size() != M2.size()) throw SchemaError("/model2", "models must be indexed by the same parameter grid");
  Context c1 = ctx, c2 = ctx;
  c1.ambient = a1;
  c2.ambient = a2;
  const CandidateMapSet c12 = parse_maps(doc["candidates12"], c1, "/candidates12");
  const DeficiencyResult d = deficiency(M1, M2, c12, *ctx.divergence);
  json out = {{"command", "deficiency"},
              {"deficiency", real_json(d.value)},
              {"best", c12[d.best].name},
              {"per_candidate", reals(d.per_candidate)}};
  if (doc.contains("candidates21")) {
    const CandidateMapSet c21 = parse_maps(doc["candidates21"], c2, "/candidates21");
    const DeficiencyResult back = deficiency(M2, M1, c21, *ctx.divergence);
    out["reverse"] = real_json(back.value);
    out["mutual"] = real_json(std::max(d.value, back.value));
    out["equivalent"] = equivalence_check(M1, M2, c12, c21).equivalent;
  }
  emit(f, out, "deficiency_result");
  return kOk;
}

int cmd_resource(const Flags& f) {
  const json doc = read_document(f, false);
  validate_doc(doc, "resource_doc");
  Context ctx = parse_context(doc, true);
  require_ambient_from(ctx, doc, {"free_points", "fixed_points"}, true);
  if (!ctx.ambient && doc.contains("orbit")) ctx.ambient = parse_point(doc["orbit"]["point"], std::nullopt, "/orbit/point").ambient();
  ambient_from_maps(ctx, doc, "operations");
  if (!ctx.ambient) throw SchemaError("/free_points", "the state space cannot be inferred");
  const std::string type = doc["type"].get<std::string>();
  const StateSampler sampler = default_sampler(ctx);
  const Side side = doc.value("side", std::string("left")) == "right" ? Side::Right : Side::Left;

  auto require = [&](const char* key) -> const json& {
    if (!doc.contains(key)) throw SchemaError(pointer_join("", key), "required for a type (" + type + ") theory");
    return doc[key];
  };
  json out = {{"command", "resource"}, {"type", type}};
  std::optional<ResourceTheory> theory;
  try {
    if (type == "i") {
      CandidateMapSet ops = parse_maps(require("operations"), ctx, "/operations");
      FreeSet S;
      if (doc.contains("free_points")) {
        S = FreeSet::finite(parse_points(doc["free_points"], ctx.ambient, "/free_points"));
      } else {
        ConstraintSet s = parse_set(require("free_set"), *ctx.ambient, "/free_set");
        std::optional<ConstraintSet> dual;
        if (doc.contains("free_dual_set")) dual = parse_set(doc["free_dual_set"], *ctx.ambient, "/free_dual_set");
        S = FreeSet::of(std::move(s), std::move(dual));
      }
      theory = build_theory_i(std::move(ops), std::move(S), *ctx.divergence, ctx.spec, sampler, 20, f.seed);
    } else if (type == "ii") {
      CandidateMapSet ops = parse_maps(require("operations"), ctx, "/operations");
      std::vector<Point> fixed = parse_points(require("fixed_points"), ctx.ambient, "/fixed_points");
      theory = build_theory_ii(std::move(ops), std::move(fixed), *ctx.divergence, ctx.spec, sampler, 20, f.seed);
    } else {
      if (!ctx.spec) throw SchemaError("/potential", "a type (iii) theory needs a potential");
      const ConstraintSet K = parse_set(require("K"), *ctx.ambient, "/K");
      std::vector<ConstraintSet> anchors;
      const json& aj = require("anchors");
      for (std::size_t i = 0; i < aj.size(); ++i) anchors.push_back(parse_set(aj[i], *ctx.ambient, pointer_join("/anchors", i)));
      theory = build_theory_iii(K, anchors, *ctx.spec, side, sampler);
    }
  } catch (const ConstructionError& e) {
    out["verdict"] = "FAIL";
    out["pairs"] = 0;
    out["notes"] = json::array({e.what()});
    emit(f, out, "resource_result");
    return kFail;
  }
  const ResourceTheory& t = *theory;
  const TheoryCheck chk = validate(t, doc.value("validate_pairs", 100), f.seed);
  out["verdict"] = chk.pass() ? "PASS" : "FAIL";
  out["pairs"] = chk.pairs;
  out["stability_violations"] = chk.stability_violations;
  out["monotone_violations"] = chk.monotone_violations;
  out["max_stability_defect"] = real_json(chk.max_stability_defect);
  out["max_monotone_excess"] = real_json(chk.max_monotone_excess);
  json ops = json::array(), mons = json::array(), notes = json::array();
  for (const auto& o : t.operations) ops.push_back(o.name);
  for (const auto& m : t.monotones) mons.push_back(m.name);
  for (const auto& n : t.notes) notes.push_back(n);
  out["operations"] = ops;
  out["monotones"] = mons;
  out["notes"] = notes;

  if (doc.contains("orbit")) {
    const json& oj = doc["orbit"];
    const Point phi = parse_point(oj["point"], ctx.ambient, "/orbit/point");
    const int steps = oj.value("steps", 5);
    const std::size_t op = oj.value("operation", std::size_t{0});
    const std::size_t mon = oj.value("monotone", std::size_t{0});
    if (op >= t.operations.size()) throw SchemaError("/orbit/operation", "no such operation");
    if (mon >= t.monotones.size()) throw SchemaError("/orbit/monotone", "no such monotone");
    json orbit = json::array();
    for (double v : monotone_orbit(t, op, mon, phi, steps)) orbit.push_back(real_json(v));
    out["orbit"] = orbit;
    if (!f.trace.empty()) {
      std::string csv = "operation,monotone,step,value\n";
      for (std::size_t i = 0; i < t.operations.size(); ++i)
        for (std::size_t m = 0; m < t.monotones.size(); ++m) {
          const auto vals = monotone_orbit(t, i, m, phi, steps);
          for (std::size_t k = 0; k < vals.size(); ++k)
            csv += t.operations[i].name + "," + t.monotones[m].name + "," + std::to_string(k) + "," + csv_number(vals[k]) + "\n";
        }
      write_trace_file(f.trace, csv);
    }
  }
  emit(f, out, "resource_result");
  return chk.pass() ? kOk : kFail;
}

int cmd_quantum_demo(const Flags& f) {
  const json doc = read_document(f, true);
  validate_doc(doc, "quantum_demo_doc");
  const int instances = doc.value("instances", 5);
  const int restarts = doc.value("restarts", 10);
  constexpr double kGap = 1e-5;
  Rng rng(f.seed);
  std::string csv = "check,instance,iteration,objective\n";
  json checks = json::array();
  bool all = true;
  auto record = [&](const char* name, int instance, const quantum::OracleReport& r, double& worst) {
    worst = std::max(worst, r.gap);
    for (std::size_t k = 0; k < r.convergence.size(); ++k)
      csv += std::string(name) + "," + std::to_string(instance) + "," + std::to_string(k) + "," + csv_number(r.convergence[k]) + "\n";
  };
  double wl = 0, wj = 0, wp = 0;
  for (int i = 0; i < instances; ++i) {
    const auto rho = quantum::random_density(3, 3, rng);
    const auto P = quantum::projectors_from_unitary(quantum::random_unitary(3, rng));
    record("lueders", i, quantum::verify_lueders(rho, P, rng.next_seed(), restarts), wl);
    const Eigen::VectorXd p = rng.probability_vector(3, 0.5);
    record("jeffrey", i, quantum::verify_jeffrey(rho, P, {p(0), p(1), p(2)}, rng.next_seed(), restarts), wj);
    const auto rho4 = quantum::random_density(4, 4, rng);
    record("partial_trace", i, quantum::partial_trace_projection(rho4, 2, 2, rng.next_seed(), restarts), wp);
  }
  for (auto [name, w] : {std::pair{"lueders", wl}, {"jeffrey", wj}, {"partial_trace", wp}}) {
    const bool ok = w <= kGap;
    all = all && ok;
    checks.push_back({{"name", name}, {"instances", instances}, {"max_gap", real_json(w)}, {"verdict", ok ? "PASS" : "FAIL"}});
  }
  if (!f.trace.empty()) write_trace_file(f.trace, csv);
  emit(f, {{"command", "quantum-demo"}, {"checks", checks}, {"verdict", all ? "PASS" : "FAIL"}}, "quantum_demo_result");
  return all ? kOk : kFail;
}

int cmd_suite(const Flags& f) {
  const auto results = suite::run_all(f.seed);
  bool all = true;
  for (const auto& r : results) all = all && r.pass();
  if (f.format == "json") {
    json crit = json::array();
    for (const auto& r : results) {
      json c = {{"id", r.id},
                {"name", r.name},
                {"checks", r.checks},
                {"failures", r.failures},
                {"worst", real_json(r.worst)},
                {"verdict", r.pass() ? "PASS" : "FAIL"}};
      if (!r.details.empty()) c["details"] = r.details;
      crit.push_back(c);
    }
    emit(f, {{"command", "suite"}, {"seed", f.seed}, {"criteria", crit}, {"verdict", all ? "PASS" : "FAIL"}}, "suite_result");
  } else {
    write_text(f, suite::summary(results));
  }
  return all ? kOk : kFail;
}

int fail(int code, const std::string& message, const std::string& pointer = "", const std::string& trace = "") {
  json e = {{"error", message}, {"code", code}};
  if (!pointer.empty()) e["pointer"] = pointer;
  if (!trace.empty()) e["trace"] = trace;
  std::cerr << dump(e);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bregman projections, divergences and resource theories"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--input", flags.input, "problem document (default: standard input)");
  app.add_option("--output", flags.output, "result file (default: standard output)");
  app.add_option("--trace", flags.trace, "CSV trace file");
  app.add_option("--seed", flags.seed, "seed for every stochastic component");
  app.add_option("--tol", flags.tol, "residual tolerance of iterative solves")->check(CLI::PositiveNumber);
  app.add_option("--max-cycles", flags.max_cycles, "cycle budget of iterative solves")->check(CLI::PositiveNumber);
  app.add_option("--format", flags.format, "output format")->check(CLI::IsMember({"json", "csv"}));

  const std::vector<std::pair<const char*, int (*)(const Flags&)>> commands = {
      {"divergence", cmd_divergence}, {"project", cmd_project},       {"compose", cmd_compose},
      {"certify", cmd_certify},       {"deficiency", cmd_deficiency}, {"resource", cmd_resource},
      {"quantum-demo", cmd_quantum_demo}, {"suite", cmd_suite}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const std::string chosen = app.get_subcommands().front()->get_name();
  std::string trace_ref = flags.trace.empty() ? "" : flags.trace;
  try {
    for (const auto& [name, fn] : commands)
      if (chosen == name) return fn(flags);
  } catch (const SchemaError& e) {
    return fail(kSchema, std::string("schema violation at ") + e.pointer() + ": " + e.what(), e.pointer());
  } catch (const Infeasible& e) {
    return fail(kInfeasible, e.what(), "", trace_ref);
  } catch (const InfeasibleError& e) {
    const std::string ref = trace_ref.empty() ? "cycles=" + std::to_string(e.trace().records.size()) : trace_ref;
    return fail(kInfeasible, e.what(), "", ref);
  } catch (const ToleranceError& e) {
    return fail(kTolerance, e.what(), "", trace_ref);
  } catch (const std::exception& e) {
    return fail(kFail, e.what());
  }
  return kFail;
}
