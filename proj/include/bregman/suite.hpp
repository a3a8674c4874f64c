#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bregman::suite {

struct CriterionResult {
  int id = 0;
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // largest measured error against the criterion's tolerance
  std::vector<std::string> details;  // first few failure descriptions
  bool pass() const { return checks > 0 && failures == 0; }
};

// Each battery is deterministic in its seed.
CriterionResult divergence_axioms(std::uint64_t seed);       // 1
CriterionResult legendre_machinery(std::uint64_t seed);      // 2
CriterionResult pythagorean_identities(std::uint64_t seed);  // 3
CriterionResult diamond_composition(std::uint64_t seed);     // 4
CriterionResult right_projection_identity(std::uint64_t seed);  // 5
CriterionResult quantum_verification(std::uint64_t seed);    // 6
CriterionResult cptp_contraction(std::uint64_t seed);        // 7
CriterionResult hom_monoid_laws(std::uint64_t seed);         // 8
CriterionResult naturality(std::uint64_t seed);              // 9
CriterionResult resource_theories(std::uint64_t seed);       // 10
CriterionResult deficiency_laws(std::uint64_t seed);         // 11

struct Battery {
  int id;
  const char* name;
  std::function<CriterionResult(std::uint64_t)> run;
};

const std::vector<Battery>& batteries();

std::vector<CriterionResult> run_all(std::uint64_t seed);

/// One line per criterion plus a verdict line; contains no timings, so it
/// is reproducible for a fixed seed.
std::string summary(const std::vector<CriterionResult>& results);

}  // namespace bregman::suite
