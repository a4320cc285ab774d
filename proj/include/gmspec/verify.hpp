#pragma once

// Self-checks over all modules, reported as named pass/fail entries.

#include <cstdint>
#include <string>
#include <vector>

namespace gmspec::verify {

struct Options {
  std::string suite = "all";  // combinatorics | graph_matrix | constraint_graphs | spectrum | all
  bool allow_slow = false;
  bool mutate_z3_fprime = false;  // use 177x^2 - 192x as the 3-layer f' coefficient
  double split_fraction = 0.1;    // quadrature split point, fraction of a
  unsigned threads = 0;
  std::uint64_t seed = 20240611;
};

struct Check {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Report {
  Options options;
  std::vector<Check> checks;

  bool passed() const;
  std::string to_json() const;
};

/// Throws InvalidArgument for an unknown suite name.
Report verify_all(const Options& options = {});

const std::vector<std::string>& suite_names();

}  // namespace gmspec::verify
