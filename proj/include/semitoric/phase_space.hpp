#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace semitoric {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class FactorKind { Sphere, Plane, CotangentSphere, Projective };

// One symplectic factor of a product chart. `scale` multiplies the standard
// form of the factor:
//   Sphere:          s * <p, u x v>
//   Plane:           s * du ^ dv
//   CotangentSphere: s * (dp ^ dq), pairing u_p.v_q - u_q.v_p
//   Projective:      2 s * Im<u, v> on horizontal vectors (s is lambda)
struct Factor {
  FactorKind kind;
  int offset = 0;
  double scale = 1.0;
  int complex_dim = 0;  // projective factors only: n + 1

  int size() const;
  int tangent_dim() const;
};

// Extrinsic coordinate chart: a product of factors laid out consecutively.
class Chart {
 public:
  Chart& add_sphere(double scale);
  Chart& add_plane(double scale);
  Chart& add_cotangent_sphere(double scale);
  Chart& add_projective(int n, double lambda);

  int dimension() const { return dim_; }
  int tangent_dimension() const;
  const std::vector<Factor>& factors() const { return factors_; }

  double constraint_residual(const Vec& x) const;
  Vec project(const Vec& x) const;

  // Orthogonal projection of an ambient vector onto the (horizontal)
  // tangent space at x.
  Vec project_tangent(const Vec& x, const Vec& v) const;
  double tangency_residual(const Vec& x, const Vec& v) const;

  // Orthonormal (Euclidean) basis of the tangent space at x, as columns.
  Mat tangent_basis(const Vec& x) const;

  // Hamiltonian field from the ambient gradient of f, with w(X_f, .) = -df.
  Vec field_from_gradient(const Vec& x, const Vec& grad) const;

  double pairing(const Vec& x, const Vec& u, const Vec& v) const;

  // Distance that ignores the gauge phase of projective factors.
  double distance(const Vec& x, const Vec& y) const;

  // Rotates the gauge phase of projective factors of y to best match ref.
  Vec gauge_fix(const Vec& y, const Vec& ref) const;

 private:
  std::vector<Factor> factors_;
  int dim_ = 0;
};

struct PhasePoint {
  Vec coords;
  std::string model_id;
};

struct TangentVector {
  Vec components;
  PhasePoint base;
};

// Evaluates w_p(u, v) for the chart it was built from.
class SymplecticPairing {
 public:
  explicit SymplecticPairing(Chart chart) : chart_(std::move(chart)) {}

  double operator()(const PhasePoint& p, const TangentVector& u, const TangentVector& v) const {
    return chart_.pairing(p.coords, u.components, v.components);
  }
  double operator()(const Vec& x, const Vec& u, const Vec& v) const {
    return chart_.pairing(x, u, v);
  }

  // Gram matrix of the pairing on the columns of `basis`.
  Mat matrix(const Vec& x, const Mat& basis) const;

 private:
  Chart chart_;
};

}  // namespace semitoric
