#include <doctest.h>

#include <json.hpp>

#include "gmspec/error.hpp"
#include "gmspec/verify.hpp"

using namespace gmspec::verify;

TEST_CASE("verify suites pass and report JSON") {
  for (const char* suite : {"combinatorics", "constraint_graphs", "spectrum"}) {
    Options o;
    o.suite = suite;
    const auto r = verify_all(o);
    CHECK(r.passed());
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["passed"].get<bool>());
    CHECK(j["suite"] == suite);
    for (const auto& c : j["checks"]) {
      CAPTURE(c["name"].get<std::string>());
      CHECK(c["passed"].get<bool>());
      CHECK(c["suite"] == suite);
    }
  }
}

TEST_CASE("mutated f' coefficient fails the m = 3 checks") {
  Options o;
  o.suite = "spectrum";
  o.mutate_z3_fprime = true;
  const auto r = verify_all(o);
  CHECK_FALSE(r.passed());
  for (const auto& c : r.checks)
    if (c.name.rfind("z3_", 0) == 0) CHECK_FALSE(c.passed);
    else CHECK(c.passed);
}

TEST_CASE("moment checks survive moving the split point") {
  Options o;
  o.suite = "spectrum";
  o.split_fraction = 0.5;
  CHECK(verify_all(o).passed());
}

TEST_CASE("verify option validation") {
  Options o;
  o.suite = "nope";
  CHECK_THROWS_AS(verify_all(o), gmspec::InvalidArgument);
  o.suite = "all";
  o.split_fraction = 1.5;
  CHECK_THROWS_AS(verify_all(o), gmspec::InvalidArgument);
  CHECK(suite_names().size() == 5);
}
