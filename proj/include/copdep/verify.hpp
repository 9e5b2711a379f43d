#ifndef COPDEP_VERIFY_HPP
#define COPDEP_VERIFY_HPP

#include "copdep/common.hpp"

#include <cstdint>
#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace copdep {

struct PropertyResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  Index trials = 0;
  std::vector<PropertyResult> properties;

  bool passed() const;
  nlohmann::json to_json() const;
};

/// Names accepted by run_suite.
const std::vector<std::string>& suite_names();

/// Runs one of the property suites: axioms, dpi, equitability, bounds.
/// `trials` scales the randomized parts; pass 0 for each suite's default.
SuiteReport run_suite(std::string_view name, std::uint64_t seed, Index trials = 0);

}  // namespace copdep

#endif  // COPDEP_VERIFY_HPP
