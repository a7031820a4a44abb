#pragma once

#include <cstdint>
#include <vector>

namespace semitoric {

// Radical-inverse low-discrepancy points in [0,1)^dim. The seed is an
// integer offset into the sequence so runs are reproducible.
class Halton {
 public:
  explicit Halton(int dim, std::uint64_t seed = 0);

  std::vector<double> point(std::uint64_t index) const;
  int dimension() const { return static_cast<int>(bases_.size()); }

 private:
  std::vector<int> bases_;
  std::uint64_t seed_;
};

double radical_inverse(std::uint64_t n, int base);

}  // namespace semitoric
