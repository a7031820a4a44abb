#pragma once

#include "semitoric/model.hpp"

namespace semitoric {

// Tangent frame at x with columns (e_1..e_d, f_1..f_d) satisfying
// w(e_i, f_j) = delta_ij and w(e_i, e_j) = w(f_i, f_j) = 0, built by
// symplectic Gram-Schmidt on an orthonormal tangent basis.
Mat symplectic_frame(const Chart& chart, const Vec& x);

// Standard matrix [[0, I], [-I, 0]] of size 2d.
Mat standard_symplectic(int d);

// Point of the manifold with frame coordinates w: project(x + E w).
Vec frame_point(const Chart& chart, const Vec& x, const Mat& frame, const Vec& w);

// Jacobian at w = 0 of the frame coordinates of a vector field, by central
// differences. At a zero of the field this is the linearization.
Mat field_jacobian(const ModelSystem& model, const Vec& x, const Mat& frame,
                   const std::function<Vec(const Vec&)>& field, double h = 1e-5);

// Linearizations of X_{f1} and X_{f2} in the frame.
struct Linearization {
  Mat frame;
  Mat A1, A2;
};
Linearization linearize(const ModelSystem& model, const Vec& x, double h = 1e-5);

}  // namespace semitoric
