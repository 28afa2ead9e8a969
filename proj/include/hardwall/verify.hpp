#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace hardwall {

// One acceptance criterion: a numbered, named check with a measured verdict.
struct CriterionResult {
  int id = 0;
  std::string slug;    // stable selector for --only
  std::string title;   // one-line human description
  bool passed = false;
  std::string details;  // the measured values behind the verdict
  double seconds = 0.0;
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;
  bool all_passed = true;
  double total_seconds = 0.0;

  // Machine-readable report; embeds the config it was run with plus the
  // git-style hash of that config.
  nlohmann::json as_json(std::uint64_t seed,
                         const std::vector<std::string>& only) const;
  // One pass/fail line per criterion plus a closing summary.
  std::string text_summary() const;
};

// Runs the acceptance suite.  `only` filters criteria by substring match
// against the slug (empty list = run everything); `seed` drives the
// stochastic criteria.  Expensive DP tables are built once and shared;
// each criterion's reported time covers the work it triggered.
AcceptanceReport run_acceptance(const std::vector<std::string>& only,
                                std::uint64_t seed);

}  // namespace hardwall
