#pragma once

#include <string>
#include <vector>

#include "semitoric/model.hpp"

namespace semitoric {

struct ParamSpec {
  std::string name;
  double default_value = 0.0;
  std::string range;
};

struct ModelDescriptor {
  std::string id;
  std::string summary;
  std::vector<ParamSpec> params;
  ModelFlags flags;
  int dof = 2;
};

std::vector<ModelDescriptor> catalog();

// Builds a model; missing parameters take their defaults. Throws
// UnknownModel or BadParameter naming the violated range.
ModelPtr instantiate(const std::string& model_id, const Params& params = {});

// Same system with f2 replaced by factor * f2 (used to exercise
// normalization). The periodic component must be f1.
ModelPtr scale_second_component(const ModelPtr& model, double factor);

}  // namespace semitoric
