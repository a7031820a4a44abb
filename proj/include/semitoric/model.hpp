#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "semitoric/phase_space.hpp"

namespace semitoric {

struct KnownInvariant {
  std::string name;
  double value = 0.0;
  std::string provenance;
};

struct ModelMetadata {
  // Rank-0 points known in closed form (verified by the singularity tests).
  std::vector<Vec> fixed_points;
  // Closed-form momentum polytope for toric models (vertices, in order).
  std::vector<Vec2> declared_polytope;
  std::vector<KnownInvariant> invariants;
  // Upper bound on f1 used when an image is unbounded.
  std::optional<double> f1_window;
  std::string provenance;
};

struct ModelFlags {
  bool toric = false;
  bool semitoric = false;
  bool non_proper_periodic = false;  // periodic component is not proper
  bool local_model = false;          // synthetic normal form, non-compact
};

using Params = std::map<std::string, double>;

// A catalog system: closed-form momentum map on a product chart. Immutable
// once built and shared through ModelPtr.
class ModelSystem {
 public:
  struct Definition {
    std::string id;
    Params params;
    Chart chart;
    int dof = 2;
    ModelFlags flags;
    ModelMetadata metadata;
    // Index (1 or 2) of the component generating the 2pi-periodic flow.
    int periodic_component = 1;
    std::function<Vec2(const Vec&)> value;
    std::function<Vec(int, const Vec&)> gradient;
    // Closed-form time-s flow of the periodic component.
    std::function<Vec(const Vec&, double)> circle;
    int sample_dim = 0;
    std::function<Vec(const std::vector<double>&)> sample;
  };

  explicit ModelSystem(Definition def);

  const std::string& id() const { return def_.id; }
  const Params& params() const { return def_.params; }
  double param(const std::string& name) const;
  const Chart& chart() const { return def_.chart; }
  int dof() const { return def_.dof; }
  const ModelFlags& flags() const { return def_.flags; }
  const ModelMetadata& metadata() const { return def_.metadata; }
  int periodic_component() const { return def_.periodic_component; }
  int sample_dimension() const { return def_.sample_dim; }
  SymplecticPairing pairing() const { return SymplecticPairing(def_.chart); }

  Vec2 value(const Vec& x) const { return def_.value(x); }
  Vec gradient(int component, const Vec& x) const { return def_.gradient(component, x); }
  Vec field(int component, const Vec& x) const;
  Vec circle(const Vec& x, double s) const { return def_.circle(x, s); }
  Vec sample(const std::vector<double>& u) const { return def_.sample(u); }

  // Validated point: throws ConstraintViolation beyond tolerance.
  PhasePoint point(const Vec& coords, double tol = 1e-9) const;
  void check_on_manifold(const Vec& x, double tol = 1e-9) const;

  // Critical values of the closed-form rank-0 points.
  std::vector<Vec2> fixed_point_values() const;

  const Definition& definition() const { return def_; }

 private:
  Definition def_;
};

using ModelPtr = std::shared_ptr<const ModelSystem>;

}  // namespace semitoric
