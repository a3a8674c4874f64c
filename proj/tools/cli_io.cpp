#include "cli_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "bregman/quantum.hpp"
#include "bregman_schemas.hpp"

namespace bregman::cli {

namespace {

std::string escape_token(const std::string& t) {
  std::string out;
  for (char c : t) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

std::string type_of(const json& j) {
  if (j.is_null()) return "null";
  if (j.is_boolean()) return "boolean";
  if (j.is_number_integer()) return "integer";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  return "object";
}

bool is_integral(const json& j) {
  if (j.is_number_integer()) return true;
  if (!j.is_number_float()) return false;
  const double v = j.get<double>();
  return std::isfinite(v) && v == std::floor(v);
}

bool has_type(const json& j, const std::string& t) {
  if (t == "object") return j.is_object();
  if (t == "array") return j.is_array();
  if (t == "string") return j.is_string();
  if (t == "boolean") return j.is_boolean();
  if (t == "null") return j.is_null();
  if (t == "number") return j.is_number();
  if (t == "integer") return is_integral(j);
  return false;
}

std::size_t depth(const std::string& ptr) {
  std::size_t d = 0;
  for (char c : ptr) d += c == '/';
  return d;
}

}  // namespace

std::string pointer_join(const std::string& base, const std::string& token) {
  return base + "/" + escape_token(token);
}
std::string pointer_join(const std::string& base, std::size_t index) {
  return base + "/" + std::to_string(index);
}

// ---------------------------------------------------------------------------
// validator

SchemaValidator::SchemaValidator(json root) : root_(std::move(root)) {}

const json& SchemaValidator::resolve(const std::string& ref) const {
  if (ref.rfind("#/", 0) != 0) throw std::runtime_error("only local $ref supported: " + ref);
  return root_.at(json::json_pointer(ref.substr(1)));
}

void SchemaValidator::validate(const json& instance, const std::string& def) const {
  const json& schema = resolve("#/$defs/" + def);
  if (auto f = check(schema, instance, "")) {
    throw SchemaError(f->pointer.empty() ? "/" : f->pointer, f->message);
  }
}

std::optional<SchemaValidator::Failure> SchemaValidator::check(const json& s, const json& inst,
                                                               const std::string& ptr) const {
  if (s.is_boolean()) {
    if (s.get<bool>()) return std::nullopt;
    return Failure{ptr, "value not allowed"};
  }
  if (s.contains("$ref")) {
    if (auto f = check(resolve(s["$ref"].get<std::string>()), inst, ptr)) return f;
  }
  if (s.contains("type")) {
    const json& t = s["type"];
    bool ok = false;
    if (t.is_string()) ok = has_type(inst, t.get<std::string>());
    else for (const auto& ti : t) ok = ok || has_type(inst, ti.get<std::string>());
    if (!ok) return Failure{ptr, "expected " + t.dump() + ", got " + type_of(inst)};
  }
  if (s.contains("const") && inst != s["const"])
    return Failure{ptr, "expected " + s["const"].dump()};
  if (s.contains("enum")) {
    bool ok = false;
    for (const auto& e : s["enum"]) ok = ok || inst == e;
    if (!ok) return Failure{ptr, "expected one of " + s["enum"].dump()};
  }
  if (inst.is_number()) {
    const double v = inst.get<double>();
    if (s.contains("minimum") && v < s["minimum"].get<double>())
      return Failure{ptr, "must be >= " + s["minimum"].dump()};
    if (s.contains("maximum") && v > s["maximum"].get<double>())
      return Failure{ptr, "must be <= " + s["maximum"].dump()};
    if (s.contains("exclusiveMinimum") && v <= s["exclusiveMinimum"].get<double>())
      return Failure{ptr, "must be > " + s["exclusiveMinimum"].dump()};
    if (s.contains("exclusiveMaximum") && v >= s["exclusiveMaximum"].get<double>())
      return Failure{ptr, "must be < " + s["exclusiveMaximum"].dump()};
  }
  if (inst.is_object()) {
    if (s.contains("required")) {
      for (const auto& r : s["required"]) {
        const auto key = r.get<std::string>();
        if (!inst.contains(key)) return Failure{pointer_join(ptr, key), "missing required field"};
      }
    }
    const json* props = s.contains("properties") ? &s["properties"] : nullptr;
    for (auto it = inst.begin(); it != inst.end(); ++it) {
      const std::string p = pointer_join(ptr, it.key());
      if (props && props->contains(it.key())) {
        if (auto f = check((*props)[it.key()], it.value(), p)) return f;
      } else if (s.contains("additionalProperties")) {
        const json& ap = s["additionalProperties"];
        if (ap.is_boolean() && !ap.get<bool>()) return Failure{p, "unknown field"};
        if (ap.is_object())
          if (auto f = check(ap, it.value(), p)) return f;
      }
    }
  }
  if (inst.is_array()) {
    if (s.contains("minItems") && inst.size() < s["minItems"].get<std::size_t>())
      return Failure{ptr, "expected at least " + s["minItems"].dump() + " items"};
    if (s.contains("items")) {
      for (std::size_t i = 0; i < inst.size(); ++i)
        if (auto f = check(s["items"], inst[i], pointer_join(ptr, i))) return f;
    }
  }
  // Alternatives: on failure report the branch that got deepest, which is
  // the one the author most plausibly meant.
  auto alternatives = [&](const json& branches, bool exactly_one) -> std::optional<Failure> {
    std::optional<Failure> best;
    int matches = 0;
    for (const auto& b : branches) {
      auto f = check(b, inst, ptr);
      if (!f) {
        ++matches;
        continue;
      }
      if (!best || depth(f->pointer) > depth(best->pointer)) best = f;
    }
    if (exactly_one && matches > 1) return Failure{ptr, "matches more than one allowed form"};
    if (matches > 0) return std::nullopt;
    if (best && depth(best->pointer) > depth(ptr)) return best;
    return Failure{ptr, best ? "no allowed form matches (" + best->message + ")"
                             : "no allowed form matches"};
  };
  if (s.contains("anyOf"))
    if (auto f = alternatives(s["anyOf"], false)) return f;
  if (s.contains("oneOf"))
    if (auto f = alternatives(s["oneOf"], true)) return f;
  return std::nullopt;
}

const SchemaValidator& problem_validator() {
  static const SchemaValidator v(json::parse(schemas::problem));
  return v;
}
const SchemaValidator& result_validator() {
  static const SchemaValidator v(json::parse(schemas::result));
  return v;
}

// ---------------------------------------------------------------------------
// output

std::string format_number(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"+inf\"" : "\"-inf\"";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {
void write(std::ostringstream& os, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  if (j.is_number_float()) {
    os << format_number(j.get<double>());
  } else if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) os << ",\n";
      first = false;
      os << inner << json(it.key()).dump() << ": ";
      write(os, it.value(), indent + 1);
    }
    os << "\n" << pad << "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      os << "[]";
      return;
    }
    // Arrays of scalars stay on one line.
    bool flat = true;
    for (const auto& e : j) flat = flat && !e.is_structured();
    if (flat) {
      os << "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ", ";
        write(os, j[i], indent + 1);
      }
      os << "]";
      return;
    }
    os << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) os << ",\n";
      os << inner;
      write(os, j[i], indent + 1);
    }
    os << "\n" << pad << "]";
  } else {
    os << j.dump();
  }
}
}  // namespace

std::string dump(const json& j) {
  std::ostringstream os;
  write(os, j, 0);
  os << "\n";
  return os.str();
}

json real_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}
json real_json(const ExtendedReal& v) {
  if (v.is_infinite()) return "+inf";
  return v.value();
}

json point_json(const Point& p) {
  if (p.is_vector()) {
    json a = json::array();
    for (Eigen::Index i = 0; i < p.vec().size(); ++i) a.push_back(real_json(p.vec()(i)));
    return a;
  }
  json rows = json::array();
  const auto& m = p.mat();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back({{"re", real_json(m(i, j).real())}, {"im", real_json(m(i, j).imag())}});
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// input

namespace {

const json& field(const json& j, const char* key, const std::string& ptr) {
  if (!j.is_object() || !j.contains(key))
    throw SchemaError(pointer_join(ptr, key), "missing required field");
  return j[key];
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw SchemaError(ptr, "expected number");
  return j.get<double>();
}

double number_field(const json& j, const char* key, const std::string& ptr) {
  return number(field(j, key, ptr), pointer_join(ptr, key));
}

Eigen::VectorXd parse_vector(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) throw SchemaError(ptr, "expected non-empty array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], pointer_join(ptr, i));
  return v;
}

Eigen::MatrixXd parse_real_matrix(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) throw SchemaError(ptr, "expected non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::string rp = pointer_join(ptr, static_cast<std::size_t>(i));
    const Eigen::VectorXd r = parse_vector(j[static_cast<std::size_t>(i)], rp);
    if (i == 0) m.resize(rows, r.size());
    if (r.size() != m.cols()) throw SchemaError(rp, "ragged matrix row");
    m.row(i) = r.transpose();
  }
  return m;
}

// Library errors raised while assembling objects are reported against the
// JSON value that described them.
template <class F>
auto guarded(const std::string& ptr, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const ArgumentError& e) {
    throw SchemaError(ptr, e.what());
  } catch (const ConstructionError& e) {
    throw SchemaError(ptr, e.what());
  } catch (const DomainError& e) {
    throw SchemaError(ptr, e.what());
  }
}

Ambient infer_ambient(const json& j) {
  if (j.is_array() && !j.empty() && j[0].is_array())
    return Ambient::matrix(static_cast<Eigen::Index>(j.size()));
  return Ambient::vector(static_cast<Eigen::Index>(j.is_array() ? j.size() : 0));
}

}  // namespace

Eigen::MatrixXcd parse_matrix(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) throw SchemaError(ptr, "expected non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXcd m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::string rp = pointer_join(ptr, static_cast<std::size_t>(i));
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.empty()) throw SchemaError(rp, "expected non-empty row");
    if (i == 0) m.resize(rows, static_cast<Eigen::Index>(row.size()));
    if (static_cast<Eigen::Index>(row.size()) != m.cols()) throw SchemaError(rp, "ragged matrix row");
    for (std::size_t k = 0; k < row.size(); ++k) {
      const std::string ep = pointer_join(rp, k);
      const json& e = row[k];
      if (e.is_number()) {
        m(i, static_cast<Eigen::Index>(k)) = e.get<double>();
      } else if (e.is_object()) {
        m(i, static_cast<Eigen::Index>(k)) = {number_field(e, "re", ep), number_field(e, "im", ep)};
      } else {
        throw SchemaError(ep, "expected number or {\"re\",\"im\"} pair");
      }
    }
  }
  return m;
}

Point parse_point(const json& j, const std::optional<Ambient>& ambient, const std::string& ptr) {
  const Ambient inferred = infer_ambient(j);
  Point p;
  if (inferred.kind == PointKind::Matrix) {
    Eigen::MatrixXcd m = parse_matrix(j, ptr);
    if (m.rows() != m.cols()) throw SchemaError(ptr, "matrix state must be square");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
      throw SchemaError(ptr, "matrix state must be hermitian");
    p = Point(Eigen::MatrixXcd(0.5 * (m + m.adjoint())));
  } else {
    p = Point(parse_vector(j, ptr));
  }
  if (ambient && !(p.ambient() == *ambient)) {
    const bool want_matrix = ambient->kind == PointKind::Matrix;
    throw SchemaError(ptr, std::string("expected a ") + (want_matrix ? "matrix of side " : "vector of length ") +
                               std::to_string(ambient->dim));
  }
  return p;
}

std::vector<Point> parse_points(const json& j, const std::optional<Ambient>& ambient,
                                const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected array of points");
  std::vector<Point> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_point(j[i], ambient, pointer_join(ptr, i)));
  return out;
}

OrliczFunction parse_orlicz(const json& j, const std::string& ptr) {
  const std::string kind = field(j, "kind", ptr).get<std::string>();
  if (kind == "power") {
    const double p = number_field(j, "p", ptr);
    return guarded(pointer_join(ptr, "p"), [&] { return OrliczFunction::power(p); });
  }
  if (kind == "exp_minus_one") return OrliczFunction::exp_minus_one();
  if (kind == "cosh_minus_one") return OrliczFunction::cosh_minus_one();
  throw SchemaError(pointer_join(ptr, "kind"), "unknown Orlicz function " + kind);
}

Potential parse_potential(const json& j, const std::string& ptr) {
  const std::string kind = field(j, "kind", ptr).get<std::string>();
  const auto dim = static_cast<Eigen::Index>(field(j, "dim", ptr).get<long>());
  const bool matrix = j.value("matrix", false);
  const Ambient amb = matrix ? Ambient::matrix(dim) : Ambient::vector(dim);
  return guarded(ptr, [&]() -> Potential {
    if (kind == "euclidean") return Potential::euclidean(amb);
    if (kind == "negative_entropy") return Potential::negative_entropy(dim);
    if (kind == "power_gauge") return Potential::power_gauge(number_field(j, "beta", ptr), amb);
    if (kind == "orlicz_gauge")
      return Potential::orlicz_gauge(parse_orlicz(field(j, "orlicz", ptr), pointer_join(ptr, "orlicz")),
                                     Gauge::linear(), dim);
    if (kind == "von_neumann") return Potential::spectral_von_neumann(dim);
    if (kind == "spectral_power")
      return Potential::spectral_power(number_field(j, "gamma", ptr), number_field(j, "beta", ptr), dim);
    throw SchemaError(pointer_join(ptr, "kind"), "unknown potential kind " + kind);
  });
}

EmbeddingMap parse_embedding(const json& j, const std::string& ptr) {
  const std::string kind = field(j, "kind", ptr).get<std::string>();
  return guarded(ptr, [&]() -> EmbeddingMap {
    if (kind == "identity") return EmbeddingMap::identity();
    if (kind == "mazur") return EmbeddingMap::mazur_power(number_field(j, "gamma", ptr));
    if (kind == "orlicz_kaczmarz")
      return EmbeddingMap::orlicz_kaczmarz(parse_orlicz(field(j, "orlicz", ptr), pointer_join(ptr, "orlicz")));
    throw SchemaError(pointer_join(ptr, "kind"), "unknown embedding kind " + kind);
  });
}

Context parse_context(const json& doc, bool need_divergence) {
  Context ctx;
  if (doc.contains("potential")) {
    Potential p = parse_potential(doc["potential"], "/potential");
    EmbeddingMap e = doc.contains("embedding") ? parse_embedding(doc["embedding"], "/embedding")
                                               : EmbeddingMap::identity();
    ctx.spec.emplace(std::move(p), std::move(e));
    ctx.ambient = ctx.spec->ambient();
  } else if (doc.contains("embedding")) {
    throw SchemaError("/embedding", "an embedding needs a potential");
  }
  std::string tag = doc.value("divergence", std::string());
  if (tag.empty() && ctx.spec) tag = "bregman";
  if (tag.empty()) {
    if (need_divergence) throw SchemaError("/divergence", "missing required field");
    return ctx;
  }
  ctx.divergence_tag = tag;
  if (tag == "bregman") {
    if (!ctx.spec) throw SchemaError("/potential", "the bregman divergence needs a potential");
    ctx.divergence = Divergence::from_spec(*ctx.spec);
  } else if (tag == "umegaki") {
    ctx.divergence = Divergence::umegaki();
  } else if (tag == "d_gamma") {
    ctx.divergence = Divergence::gamma(number_field(doc, "gamma", ""));
  } else if (tag == "d_gamma_beta") {
    ctx.divergence = Divergence::gamma_beta(number_field(doc, "gamma", ""), number_field(doc, "beta", ""));
  } else if (tag == "orlicz") {
    const OrliczFunction phi = parse_orlicz(field(doc, "orlicz", ""), "/orlicz");
    ctx.divergence = Divergence{"orlicz(" + phi.name + ")", [phi](const Point& a, const Point& b) {
                                  return orlicz_divergence(phi, Gauge::linear(), a.vec(), b.vec());
                                }};
  } else {
    throw SchemaError("/divergence", "unknown divergence " + tag);
  }
  if (tag != "bregman" && ctx.spec)
    throw SchemaError("/potential", "a potential is only used with the bregman divergence");
  return ctx;
}

ConstraintSet parse_set(const json& j, const Ambient& amb, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected array of primitives");
  ConstraintSet out = ConstraintSet::whole(amb);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string pp = pointer_join(ptr, i);
    const json& prim = j[i];
    if (!prim.is_object() || prim.size() != 1) throw SchemaError(pp, "a primitive is an object with one key");
    const std::string key = prim.begin().key();
    const json& v = prim.begin().value();
    const std::string vp = pointer_join(pp, key);
    ConstraintSet piece = guarded(vp, [&]() -> ConstraintSet {
      if (key == "affine")
        return ConstraintSet::affine(amb, parse_real_matrix(field(v, "A", vp), pointer_join(vp, "A")),
                                     parse_vector(field(v, "b", vp), pointer_join(vp, "b")));
      if (key == "hyperplane" || key == "halfspace") {
        const Eigen::VectorXd a = coords(parse_point(field(v, "a", vp), amb, pointer_join(vp, "a")));
        const double c = number_field(v, "c", vp);
        return key == "hyperplane" ? ConstraintSet::hyperplane(amb, a, c) : ConstraintSet::halfspace(amb, a, c);
      }
      if (key == "box") {
        Eigen::VectorXd lo = parse_vector(field(v, "lo", vp), pointer_join(vp, "lo"));
        Eigen::VectorXd hi = parse_vector(field(v, "hi", vp), pointer_join(vp, "hi"));
        if (amb.kind != PointKind::Vector || lo.size() != amb.dim || hi.size() != amb.dim)
          throw SchemaError(vp, "box bounds must match the vector ambient");
        return ConstraintSet::box(lo, hi);
      }
      if (key == "simplex") {
        if (amb.kind != PointKind::Vector) throw SchemaError(vp, "simplex requires a vector ambient");
        return ConstraintSet::simplex(amb.dim, number(v, vp));
      }
      if (key == "norm_ball") {
        double p = 2.0;
        if (v.contains("p")) {
          p = v["p"].is_string() ? std::numeric_limits<double>::infinity() : number(v["p"], pointer_join(vp, "p"));
        }
        return ConstraintSet::norm_ball(amb, p, number_field(v, "radius", vp));
      }
      if (key == "spectral_trace") {
        if (amb.kind != PointKind::Matrix) throw SchemaError(vp, "spectral_trace requires a matrix ambient");
        return ConstraintSet::spectral_trace(amb.dim, number(v, vp));
      }
      if (key == "spectral_expectation") {
        Eigen::MatrixXcd H = parse_matrix(field(v, "H", vp), pointer_join(vp, "H"));
        if (amb.kind != PointKind::Matrix || H.rows() != amb.dim || H.cols() != amb.dim)
          throw SchemaError(pointer_join(vp, "H"), "H must match the matrix ambient");
        return ConstraintSet::spectral_expectation(H, number_field(v, "e", vp));
      }
      if (key == "spectral_simplex") {
        if (amb.kind != PointKind::Matrix) throw SchemaError(vp, "spectral_simplex requires a matrix ambient");
        return ConstraintSet::spectral_simplex(amb.dim);
      }
      if (key == "empty") return ConstraintSet::empty(amb);
      throw SchemaError(vp, "unknown primitive " + key);
    });
    out = intersect(out, piece);
  }
  return out;
}

namespace {

MapClass parse_class(const std::string& s) {
  if (s == "CN") return MapClass::CN;
  if (s == "LSQ") return MapClass::LSQ;
  if (s == "RSQ") return MapClass::RSQ;
  return MapClass::Unclassified;
}

}  // namespace

CandidateMap parse_map(const json& j, const Context& ctx, const std::string& ptr, std::size_t index) {
  const std::string kind = field(j, "kind", ptr).get<std::string>();
  CandidateMap out;
  out.name = j.value("name", kind + std::to_string(index));
  if (kind == "identity") {
    out.map = [](const Point& x) { return x; };
    out.cls = MapClass::CN;
  } else if (kind == "linear") {
    const Eigen::MatrixXd M = parse_real_matrix(field(j, "matrix", ptr), pointer_join(ptr, "matrix"));
    const bool matrix_in = ctx.ambient && ctx.ambient->kind == PointKind::Matrix;
    Ambient out_amb = Ambient::vector(M.rows());
    if (matrix_in) {
      const auto side = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(M.rows()))));
      if (side * side != M.rows())
        throw SchemaError(pointer_join(ptr, "matrix"), "row count must be a square for matrix states");
      out_amb = Ambient::matrix(side);
    }
    out.map = [M, out_amb](const Point& x) {
      const Eigen::VectorXd c = coords(x);
      if (c.size() != M.cols()) throw ArgumentError("linear map: input has wrong dimension");
      return from_coords(M * c, out_amb);
    };
  } else if (kind == "scale") {
    const double s = number_field(j, "factor", ptr);
    out.map = [s](const Point& x) { return s * x; };
  } else if (kind == "kraus") {
    const json& ops = field(j, "ops", ptr);
    std::vector<Eigen::MatrixXcd> ks;
    for (std::size_t i = 0; i < ops.size(); ++i)
      ks.push_back(parse_matrix(ops[i], pointer_join(pointer_join(ptr, "ops"), i)));
    auto K = guarded(pointer_join(ptr, "ops"), [&] { return quantum::KrausMap(ks); });
    out.map = [K](const Point& x) { return K(x); };
    out.cls = MapClass::CN;
  } else if (kind == "depolarizing") {
    const double p = number_field(j, "p", ptr);
    const auto d = static_cast<Eigen::Index>(field(j, "dim", ptr).get<long>());
    auto K = guarded(ptr, [&] { return quantum::KrausMap::depolarizing(d, p); });
    out.map = [K](const Point& x) { return K(x); };
    out.cls = MapClass::CN;
  } else if (kind == "projection") {
    if (!ctx.spec) throw SchemaError(ptr, "a projection map needs a potential");
    const Side side = j.value("side", std::string("left")) == "right" ? Side::Right : Side::Left;
    ConstraintSet target = parse_set(field(j, "target", ptr), ctx.spec->ambient(), pointer_join(ptr, "target"));
    ProjectionOperator op(side, *ctx.spec, std::move(target));
    out.map = [op](const Point& x) { return op.apply(x); };
    out.cls = side == Side::Left ? MapClass::LSQ : MapClass::RSQ;
  } else {
    throw SchemaError(pointer_join(ptr, "kind"), "unknown map kind " + kind);
  }
  if (j.contains("class")) out.cls = parse_class(j["class"].get<std::string>());
  return out;
}

CandidateMapSet parse_maps(const json& j, const Context& ctx, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected array of maps");
  CandidateMapSet out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_map(j[i], ctx, pointer_join(ptr, i), i));
  return out;
}

StateSampler default_sampler(const Context& ctx) {
  if (!ctx.ambient) throw std::logic_error("default_sampler: ambient unknown");
  const Ambient amb = *ctx.ambient;
  const auto density = [](Eigen::Index d) {
    return [d](Rng& rng) {
      const Eigen::MatrixXcd g = rng.ginibre(d, d);
      Eigen::MatrixXcd r = g * g.adjoint() + 0.05 * Eigen::MatrixXcd::Identity(d, d);
      r /= r.trace().real();
      return Point(Eigen::MatrixXcd(0.5 * (r + r.adjoint())));
    };
  };
  if (ctx.spec) {
    switch (ctx.spec->potential.kind()) {
      case PotentialKind::NegativeEntropy:
        return [n = amb.dim](Rng& rng) { return Point(rng.positive_vector(n, 0.5)); };
      case PotentialKind::SpectralVonNeumann:
        return density(amb.dim);
      default:
        break;
    }
    if (amb.kind == PointKind::Matrix)
      return [d = amb.dim](Rng& rng) { return Point(rng.hermitian(d)); };
    return [n = amb.dim](Rng& rng) { return Point(rng.normal_vector(n)); };
  }
  if (ctx.divergence_tag == "orlicz")
    return [n = amb.dim](Rng& rng) { return Point(rng.normal_vector(n)); };
  if (amb.kind == PointKind::Matrix) return density(amb.dim);
  return [n = amb.dim](Rng& rng) { return Point(rng.probability_vector(n, 0.5)); };
}

}  // namespace bregman::cli
