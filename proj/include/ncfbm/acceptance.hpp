#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ncfbm {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;   // measured quantities, one line
  double seconds = 0.0;
  double budget = 0.0;  // allowed runtime in seconds
};

inline constexpr int kCriterionCount = 12;

/// Runs one acceptance experiment (1..12) with the given base seed.
CriterionResult run_criterion(int id, std::uint64_t seed = 20240601);

/// "PASS  3  title  (1.2 s)  detail"
std::string format_result(const CriterionResult& r);

}  // namespace ncfbm
