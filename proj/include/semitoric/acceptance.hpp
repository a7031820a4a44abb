#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace semitoric {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // measured quantities
  double seconds = 0.0;
};

// Runs the numbered criteria (1 to 9); an empty selection runs all of
// them. A criterion that throws is reported as failed with the error name.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& selection = {});

CriterionResult run_criterion(int id);

// One line per criterion: "[PASS] 3 singularity census: ...".
std::string format_line(const CriterionResult& r);

nlohmann::json to_json(const CriterionResult& r);

}  // namespace semitoric
