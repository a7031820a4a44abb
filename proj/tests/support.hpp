#pragma once

#include <initializer_list>

#include "semitoric/phase_space.hpp"

namespace semitoric::test {

inline Vec vec_of(std::initializer_list<double> values) {
  Vec out(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) out[i++] = v;
  return out;
}

}  // namespace semitoric::test
