#include "semitoric/model.hpp"

#include <sstream>

#include "semitoric/error.hpp"

namespace semitoric {

ModelSystem::ModelSystem(Definition def) : def_(std::move(def)) {}

double ModelSystem::param(const std::string& name) const {
  auto it = def_.params.find(name);
  if (it == def_.params.end()) fail(ErrorKind::BadParameter, "model has no parameter " + name);
  return it->second;
}

Vec ModelSystem::field(int component, const Vec& x) const {
  return def_.chart.field_from_gradient(x, def_.gradient(component, x));
}

void ModelSystem::check_on_manifold(const Vec& x, double tol) const {
  if (x.size() != def_.chart.dimension()) {
    std::ostringstream os;
    os << "point has " << x.size() << " coordinates, chart of " << def_.id << " has "
       << def_.chart.dimension();
    fail(ErrorKind::ConstraintViolation, os.str());
  }
  const double r = def_.chart.constraint_residual(x);
  if (!(r <= tol)) {
    std::ostringstream os;
    os << "point off manifold for " << def_.id << ": constraint residual " << r;
    fail(ErrorKind::ConstraintViolation, os.str());
  }
}

PhasePoint ModelSystem::point(const Vec& coords, double tol) const {
  check_on_manifold(coords, tol);
  return PhasePoint{coords, def_.id};
}

std::vector<Vec2> ModelSystem::fixed_point_values() const {
  std::vector<Vec2> out;
  for (const auto& p : def_.metadata.fixed_points) out.push_back(value(p));
  return out;
}

}  // namespace semitoric
