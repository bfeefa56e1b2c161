#pragma once

#include <string>
#include <utility>
#include <vector>

namespace rpl {

// One recorded inequality lhs <= rhs (margin = rhs - lhs).
struct Check {
  std::string what;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  double margin() const { return rhs - lhs; }
};

struct Certificate {
  std::string name;
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<std::pair<std::string, double>> quantities;
  std::vector<Check> checks;
  std::string note;
  bool pass = false;

  void param(const std::string& k, double v) { parameters.emplace_back(k, v); }
  void quantity(const std::string& k, double v) { quantities.emplace_back(k, v); }
  // Records a check and returns its outcome.
  bool check(const std::string& what, double lhs, double rhs, bool strict = false) {
    const bool ok = strict ? lhs < rhs : lhs <= rhs;
    checks.push_back({what, lhs, rhs, ok});
    return ok;
  }
  double quantity_or(const std::string& k, double fallback) const {
    for (const auto& [n, v] : quantities)
      if (n == k) return v;
    return fallback;
  }
};

}  // namespace rpl
