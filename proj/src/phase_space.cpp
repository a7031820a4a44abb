#include "semitoric/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "semitoric/error.hpp"

namespace semitoric {

namespace {

using Cplx = std::complex<double>;

Eigen::Vector3d seg3(const Vec& x, int off) { return x.segment<3>(off); }

// Hermitian product sum conj(a_k) b_k over complex coordinates laid out as
// (re, im) pairs starting at off.
Cplx herm(const Vec& a, const Vec& b, int off, int n) {
  Cplx s = 0.0;
  for (int k = 0; k < n; ++k) {
    Cplx ak(a[off + 2 * k], a[off + 2 * k + 1]);
    Cplx bk(b[off + 2 * k], b[off + 2 * k + 1]);
    s += std::conj(ak) * bk;
  }
  return s;
}

// Multiplies the complex block by i.
void times_i(Vec& v, int off, int n) {
  for (int k = 0; k < n; ++k) {
    const double re = v[off + 2 * k];
    v[off + 2 * k] = -v[off + 2 * k + 1];
    v[off + 2 * k + 1] = re;
  }
}

// Ambient normals of the factor (columns), including the gauge direction
// for projective factors so that projection lands on horizontal vectors.
Mat factor_normals(const Factor& f, const Vec& x) {
  const int sz = f.size();
  switch (f.kind) {
    case FactorKind::Sphere: {
      Mat n(sz, 1);
      n.col(0) = x.segment(f.offset, 3);
      return n;
    }
    case FactorKind::Plane:
      return Mat(sz, 0);
    case FactorKind::CotangentSphere: {
      Mat n = Mat::Zero(sz, 2);
      n.block<3, 1>(0, 0) = x.segment<3>(f.offset);
      n.block<3, 1>(0, 1) = x.segment<3>(f.offset + 3);
      n.block<3, 1>(3, 1) = x.segment<3>(f.offset);
      return n;
    }
    case FactorKind::Projective: {
      Mat n(sz, 2);
      Vec z = x.segment(f.offset, sz);
      n.col(0) = z;
      Vec iz = Vec::Zero(x.size());
      iz.segment(f.offset, sz) = z;
      times_i(iz, f.offset, f.complex_dim);
      n.col(1) = iz.segment(f.offset, sz);
      return n;
    }
  }
  return Mat(sz, 0);
}

Vec project_onto_complement(const Mat& normals, const Vec& v) {
  if (normals.cols() == 0) return v;
  const Mat gram = normals.transpose() * normals;
  const Vec coef = gram.ldlt().solve(normals.transpose() * v);
  return v - normals * coef;
}

}  // namespace

int Factor::size() const {
  switch (kind) {
    case FactorKind::Sphere: return 3;
    case FactorKind::Plane: return 2;
    case FactorKind::CotangentSphere: return 6;
    case FactorKind::Projective: return 2 * complex_dim;
  }
  return 0;
}

int Factor::tangent_dim() const {
  switch (kind) {
    case FactorKind::Sphere: return 2;
    case FactorKind::Plane: return 2;
    case FactorKind::CotangentSphere: return 4;
    case FactorKind::Projective: return 2 * (complex_dim - 1);
  }
  return 0;
}

Chart& Chart::add_sphere(double scale) {
  factors_.push_back({FactorKind::Sphere, dim_, scale, 0});
  dim_ += 3;
  return *this;
}

Chart& Chart::add_plane(double scale) {
  factors_.push_back({FactorKind::Plane, dim_, scale, 0});
  dim_ += 2;
  return *this;
}

Chart& Chart::add_cotangent_sphere(double scale) {
  factors_.push_back({FactorKind::CotangentSphere, dim_, scale, 0});
  dim_ += 6;
  return *this;
}

Chart& Chart::add_projective(int n, double lambda) {
  if (n < 1) fail(ErrorKind::BadParameter, "projective dimension must be >= 1");
  factors_.push_back({FactorKind::Projective, dim_, lambda, n + 1});
  dim_ += 2 * (n + 1);
  return *this;
}

int Chart::tangent_dimension() const {
  int d = 0;
  for (const auto& f : factors_) d += f.tangent_dim();
  return d;
}

double Chart::constraint_residual(const Vec& x) const {
  if (x.size() != dim_) return std::numeric_limits<double>::infinity();
  double r = 0.0;
  for (const auto& f : factors_) {
    switch (f.kind) {
      case FactorKind::Sphere:
        r = std::max(r, std::abs(seg3(x, f.offset).squaredNorm() - 1.0));
        break;
      case FactorKind::Plane:
        break;
      case FactorKind::CotangentSphere: {
        const auto q = seg3(x, f.offset);
        const auto p = seg3(x, f.offset + 3);
        r = std::max({r, std::abs(q.squaredNorm() - 1.0), std::abs(q.dot(p))});
        break;
      }
      case FactorKind::Projective:
        r = std::max(r, std::abs(x.segment(f.offset, f.size()).squaredNorm() - 1.0));
        break;
    }
  }
  return r;
}

Vec Chart::project(const Vec& x) const {
  Vec y = x;
  for (const auto& f : factors_) {
    switch (f.kind) {
      case FactorKind::Sphere:
        y.segment<3>(f.offset).normalize();
        break;
      case FactorKind::Plane:
        break;
      case FactorKind::CotangentSphere: {
        Eigen::Vector3d q = y.segment<3>(f.offset).normalized();
        Eigen::Vector3d p = y.segment<3>(f.offset + 3);
        y.segment<3>(f.offset) = q;
        y.segment<3>(f.offset + 3) = p - q * q.dot(p);
        break;
      }
      case FactorKind::Projective:
        y.segment(f.offset, f.size()).normalize();
        break;
    }
  }
  return y;
}

Vec Chart::project_tangent(const Vec& x, const Vec& v) const {
  Vec out = v;
  for (const auto& f : factors_) {
    const Mat n = factor_normals(f, x);
    out.segment(f.offset, f.size()) = project_onto_complement(n, v.segment(f.offset, f.size()));
  }
  return out;
}

double Chart::tangency_residual(const Vec& x, const Vec& v) const {
  double r = 0.0;
  for (const auto& f : factors_) {
    const Mat n = factor_normals(f, x);
    // The gauge direction of projective factors is not a constraint.
    const int active = f.kind == FactorKind::Projective ? 1 : static_cast<int>(n.cols());
    for (int c = 0; c < active; ++c)
      r = std::max(r, std::abs(n.col(c).dot(v.segment(f.offset, f.size()))));
  }
  return r;
}

Mat Chart::tangent_basis(const Vec& x) const {
  Mat basis = Mat::Zero(dim_, tangent_dimension());
  int col = 0;
  for (const auto& f : factors_) {
    const int sz = f.size();
    const Mat n = factor_normals(f, x);
    Mat proj = Mat::Identity(sz, sz);
    if (n.cols() > 0) proj -= n * (n.transpose() * n).ldlt().solve(n.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (proj + proj.transpose()));
    // Eigenvalues ascend; the unit eigenvalues span the tangent space.
    const int td = f.tangent_dim();
    basis.block(f.offset, col, sz, td) = eig.eigenvectors().rightCols(td);
    col += td;
  }
  return basis;
}

Vec Chart::field_from_gradient(const Vec& x, const Vec& grad) const {
  Vec out = Vec::Zero(dim_);
  for (const auto& f : factors_) {
    switch (f.kind) {
      case FactorKind::Sphere: {
        const Eigen::Vector3d p = x.segment<3>(f.offset);
        const Eigen::Vector3d g = grad.segment<3>(f.offset);
        out.segment<3>(f.offset) = p.cross(g) / f.scale;
        break;
      }
      case FactorKind::Plane: {
        out[f.offset] = -grad[f.offset + 1] / f.scale;
        out[f.offset + 1] = grad[f.offset] / f.scale;
        break;
      }
      case FactorKind::CotangentSphere: {
        const Eigen::Vector3d q = x.segment<3>(f.offset);
        const Eigen::Vector3d p = x.segment<3>(f.offset + 3);
        const Eigen::Vector3d fq = grad.segment<3>(f.offset);
        const Eigen::Vector3d fp = grad.segment<3>(f.offset + 3);
        const double qfp = q.dot(fp);
        out.segment<3>(f.offset) = (fp - qfp * q) / f.scale;
        out.segment<3>(f.offset + 3) = (-fq - (p.dot(fp) - q.dot(fq)) * q + qfp * p) / f.scale;
        break;
      }
      case FactorKind::Projective: {
        Vec v = Vec::Zero(dim_);
        v.segment(f.offset, f.size()) = grad.segment(f.offset, f.size()) / (2.0 * f.scale);
        times_i(v, f.offset, f.complex_dim);
        const Mat n = factor_normals(f, x);
        out.segment(f.offset, f.size()) = project_onto_complement(n, v.segment(f.offset, f.size()));
        break;
      }
    }
  }
  return out;
}

double Chart::pairing(const Vec& x, const Vec& u, const Vec& v) const {
  double w = 0.0;
  for (const auto& f : factors_) {
    switch (f.kind) {
      case FactorKind::Sphere: {
        const Eigen::Vector3d p = x.segment<3>(f.offset);
        w += f.scale * p.dot(Eigen::Vector3d(u.segment<3>(f.offset)).cross(Eigen::Vector3d(v.segment<3>(f.offset))));
        break;
      }
      case FactorKind::Plane:
        w += f.scale * (u[f.offset] * v[f.offset + 1] - u[f.offset + 1] * v[f.offset]);
        break;
      case FactorKind::CotangentSphere:
        w += f.scale * (u.segment<3>(f.offset + 3).dot(v.segment<3>(f.offset)) -
                        u.segment<3>(f.offset).dot(v.segment<3>(f.offset + 3)));
        break;
      case FactorKind::Projective:
        w += 2.0 * f.scale * herm(u, v, f.offset, f.complex_dim).imag();
        break;
    }
  }
  return w;
}

double Chart::distance(const Vec& x, const Vec& y) const {
  double d2 = 0.0;
  for (const auto& f : factors_) {
    if (f.kind == FactorKind::Projective) {
      // Align the phase first; 2 - 2|<x,y>| would lose half the digits.
      const Cplx h = herm(y, x, f.offset, f.complex_dim);
      const Cplx phase = std::abs(h) > 0 ? h / std::abs(h) : Cplx(1.0);
      for (int k = 0; k < f.complex_dim; ++k) {
        const int i = f.offset + 2 * k;
        d2 += std::norm(Cplx(y[i], y[i + 1]) * phase - Cplx(x[i], x[i + 1]));
      }
    } else {
      d2 += (x.segment(f.offset, f.size()) - y.segment(f.offset, f.size())).squaredNorm();
    }
  }
  return std::sqrt(d2);
}

Vec Chart::gauge_fix(const Vec& y, const Vec& ref) const {
  Vec out = y;
  for (const auto& f : factors_) {
    if (f.kind != FactorKind::Projective) continue;
    const Cplx h = herm(y, ref, f.offset, f.complex_dim);
    if (std::abs(h) == 0.0) continue;
    const Cplx phase = h / std::abs(h);
    for (int k = 0; k < f.complex_dim; ++k) {
      const int i = f.offset + 2 * k;
      const Cplx z = Cplx(y[i], y[i + 1]) * phase;
      out[i] = z.real();
      out[i + 1] = z.imag();
    }
  }
  return out;
}

Mat SymplecticPairing::matrix(const Vec& x, const Mat& basis) const {
  const int n = static_cast<int>(basis.cols());
  Mat w(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) w(a, b) = chart_.pairing(x, basis.col(a), basis.col(b));
  return w;
}

}  // namespace semitoric
