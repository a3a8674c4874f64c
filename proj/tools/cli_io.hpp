#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bregman/category.hpp"
#include "bregman/resources.hpp"

namespace bregman::cli {

using json = nlohmann::json;

/// Input rejected before (or while) building solver objects; carries the
/// JSON pointer of the offending value.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string pointer, const std::string& message)
      : std::runtime_error(message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

// Validator for the subset of JSON Schema used by the published schemas:
// $ref (local), type, const, enum, properties, required,
// additionalProperties, items, minItems, minimum/maximum (exclusive too),
// anyOf and oneOf.
class SchemaValidator {
 public:
  explicit SchemaValidator(json root);
  /// Validates against #/$defs/<def>; throws SchemaError on the first failure.
  void validate(const json& instance, const std::string& def) const;
  const json& root() const { return root_; }

  struct Failure {
    std::string pointer;
    std::string message;
  };

 private:
  std::optional<Failure> check(const json& schema, const json& inst, const std::string& ptr) const;
  const json& resolve(const std::string& ref) const;
  json root_;
};

const SchemaValidator& problem_validator();
const SchemaValidator& result_validator();

std::string pointer_join(const std::string& base, const std::string& token);
std::string pointer_join(const std::string& base, std::size_t index);

// Output.  Numbers are written with 17 significant digits; non-finite
// values become the strings "+inf", "-inf", "nan".
std::string format_number(double v);
std::string dump(const json& j);
json real_json(double v);
json real_json(const ExtendedReal& v);
json point_json(const Point& p);

// Input.

/// Potential, embedding and divergence read from a document's top level.
struct Context {
  std::optional<DivergenceSpec> spec;
  std::optional<Divergence> divergence;  // set when the document names one
  std::optional<Ambient> ambient;
  std::string divergence_tag;
};

/// `need_divergence` requires the "divergence" tag (or a potential, which
/// implies "bregman").
Context parse_context(const json& doc, bool need_divergence);

Potential parse_potential(const json& j, const std::string& ptr);
EmbeddingMap parse_embedding(const json& j, const std::string& ptr);
OrliczFunction parse_orlicz(const json& j, const std::string& ptr);

/// A vector (array of numbers) or a row-major matrix whose entries are
/// numbers or {"re","im"} pairs.  With an ambient the shape is checked.
Point parse_point(const json& j, const std::optional<Ambient>& ambient, const std::string& ptr);
std::vector<Point> parse_points(const json& j, const std::optional<Ambient>& ambient,
                                const std::string& ptr);
Eigen::MatrixXcd parse_matrix(const json& j, const std::string& ptr);

/// Array of primitives, intersected; [] is the whole space.
ConstraintSet parse_set(const json& j, const Ambient& ambient, const std::string& ptr);

CandidateMap parse_map(const json& j, const Context& ctx, const std::string& ptr,
                       std::size_t index);
CandidateMapSet parse_maps(const json& j, const Context& ctx, const std::string& ptr);

/// Fresh states appropriate for the context (interior of the domain).
StateSampler default_sampler(const Context& ctx);

}  // namespace bregman::cli
