#pragma once

#include <string>
#include <vector>

#include "masslab/fixtures.hpp"

namespace masslab::checks {

struct CheckResult {
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

// Suites: kernel, operators, identities, collapse, dnrsquare, noncup,
// forcing, stagewise, classes, determinism — or "all".
std::vector<CheckResult> run_suite(const std::string& suite, Fixtures& fx, nat seed);

bool all_pass(const std::vector<CheckResult>& results);
std::string render(const CheckResult& r);

}  // namespace masslab::checks
