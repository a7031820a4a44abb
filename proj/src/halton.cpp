#include "semitoric/halton.hpp"

#include "semitoric/error.hpp"

namespace semitoric {

namespace {
constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
}

double radical_inverse(std::uint64_t n, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (n > 0) {
    result += f * static_cast<double>(n % base);
    n /= base;
    f /= base;
  }
  return result;
}

Halton::Halton(int dim, std::uint64_t seed) : seed_(seed) {
  if (dim < 1 || dim > static_cast<int>(std::size(kPrimes)))
    fail(ErrorKind::BadParameter, "Halton dimension out of range");
  bases_.assign(kPrimes, kPrimes + dim);
}

std::vector<double> Halton::point(std::uint64_t index) const {
  std::vector<double> u(bases_.size());
  // Skip index 0, which maps to the corner of the cube.
  const std::uint64_t n = index + seed_ + 1;
  for (std::size_t k = 0; k < bases_.size(); ++k) u[k] = radical_inverse(n, bases_[k]);
  return u;
}

}  // namespace semitoric
