#include "semitoric/local_frame.hpp"

#include <cmath>
#include <vector>

#include "semitoric/error.hpp"

namespace semitoric {

Mat standard_symplectic(int d) {
  Mat J = Mat::Zero(2 * d, 2 * d);
  J.topRightCorner(d, d).setIdentity();
  J.bottomLeftCorner(d, d) = -Mat::Identity(d, d);
  return J;
}

Mat symplectic_frame(const Chart& chart, const Vec& x) {
  const Mat basis = chart.tangent_basis(x);
  const int n = static_cast<int>(basis.cols());
  const int d = n / 2;
  std::vector<Vec> rest;
  for (int c = 0; c < n; ++c) rest.push_back(basis.col(c));
  auto w = [&](const Vec& u, const Vec& v) { return chart.pairing(x, u, v); };

  Mat frame(basis.rows(), n);
  for (int i = 0; i < d; ++i) {
    Vec e = rest.front();
    rest.erase(rest.begin());
    e.normalize();
    std::size_t best = 0;
    double best_w = -1.0;
    for (std::size_t k = 0; k < rest.size(); ++k) {
      const double a = std::abs(w(e, rest[k]));
      if (a > best_w) {
        best_w = a;
        best = k;
      }
    }
    if (best_w < 1e-12) fail(ErrorKind::IllConditioned, "pairing is degenerate on the tangent basis");
    Vec f = rest[best] / w(e, rest[best]);
    rest.erase(rest.begin() + static_cast<long>(best));
    for (auto& v : rest) v = v - w(v, f) * e + w(v, e) * f;
    frame.col(i) = e;
    frame.col(d + i) = f;
  }
  return frame;
}

Vec frame_point(const Chart& chart, const Vec& x, const Mat& frame, const Vec& w) {
  return chart.project(x + frame * w);
}

Mat field_jacobian(const ModelSystem& model, const Vec& x, const Mat& frame,
                   const std::function<Vec(const Vec&)>& field, double h) {
  const Chart& chart = model.chart();
  const int n = static_cast<int>(frame.cols());
  // Frame coordinates of ambient vectors: least squares onto the columns.
  const Eigen::ColPivHouseholderQR<Mat> qr(frame);
  Mat A(n, n);
  for (int k = 0; k < n; ++k) {
    Vec dw = Vec::Zero(n);
    dw[k] = h;
    const Vec xp = frame_point(chart, x, frame, dw);
    const Vec xm = frame_point(chart, x, frame, -dw);
    A.col(k) = qr.solve(Vec(field(xp) - field(xm))) / (2.0 * h);
  }
  return A;
}

Linearization linearize(const ModelSystem& model, const Vec& x, double h) {
  Linearization lin;
  lin.frame = symplectic_frame(model.chart(), x);
  lin.A1 = field_jacobian(model, x, lin.frame, [&](const Vec& y) { return model.field(1, y); }, h);
  lin.A2 = field_jacobian(model, x, lin.frame, [&](const Vec& y) { return model.field(2, y); }, h);
  return lin;
}

}  // namespace semitoric
