#include "semitoric/singularity.hpp"

#include <algorithm>
#include <cmath>

#include "semitoric/error.hpp"
#include "semitoric/halton.hpp"
#include "semitoric/local_frame.hpp"

namespace semitoric {

namespace {

using Cplx = std::complex<double>;

std::vector<Cplx> eigenvalues_of(const Mat& L) {
  Eigen::EigenSolver<Mat> es(L, false);
  std::vector<Cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](Cplx a, Cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return ev;
}

// Fallback combinations when the default lands on a resonance.
const Vec2 kRedraws[] = {Vec2(0.71, 0.23), Vec2(-0.44, 0.62), Vec2(0.19, -0.83)};

Vec wedge(const Vec& a, const Vec& b) {
  const int n = static_cast<int>(a.size());
  Vec w(n * (n - 1) / 2);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) w[k++] = a[i] * b[j] - a[j] * b[i];
  return w;
}

using Residual = std::function<Vec(const Vec&)>;

// Levenberg-Marquardt in tangent coordinates with a retraction after each
// step. Returns true when the residual norm drops below tol.
bool tangent_lm(const Chart& chart, const Residual& r, Vec& x, double tol, int max_iter) {
  Vec res = r(x);
  double norm = res.norm();
  double damping = 1e-3;
  const double h = 1e-7;
  for (int it = 0; it < max_iter && norm >= tol; ++it) {
    const Mat T = chart.tangent_basis(x);
    const int k = static_cast<int>(T.cols());
    Mat J(res.size(), k);
    for (int c = 0; c < k; ++c)
      J.col(c) = (r(chart.project(x + h * T.col(c))) - r(chart.project(x - h * T.col(c)))) / (2.0 * h);
    const Mat JtJ = J.transpose() * J;
    const Vec g = J.transpose() * res;
    bool improved = false;
    for (int tries = 0; tries < 12; ++tries) {
      Mat A = JtJ;
      A.diagonal().array() += damping * (1.0 + JtJ.diagonal().array());
      const Vec delta = -A.ldlt().solve(g);
      const Vec xn = chart.project(x + T * delta);
      const Vec rn = r(xn);
      const double nn = rn.norm();
      if (nn < norm) {
        x = xn;
        res = rn;
        norm = nn;
        damping = std::max(damping * 0.3, 1e-12);
        improved = true;
        break;
      }
      damping *= 10.0;
    }
    if (!improved) break;
  }
  return norm < tol;
}

}  // namespace

std::string to_string(SingularityType type) {
  switch (type) {
    case SingularityType::EllipticElliptic: return "elliptic-elliptic";
    case SingularityType::FocusFocus: return "focus-focus";
    case SingularityType::TransversallyElliptic: return "transversally-elliptic";
    case SingularityType::EllipticHyperbolic: return "elliptic-hyperbolic";
    case SingularityType::HyperbolicHyperbolic: return "hyperbolic-hyperbolic";
    case SingularityType::TransversallyHyperbolic: return "transversally-hyperbolic";
    case SingularityType::Elliptic: return "elliptic";
    case SingularityType::Hyperbolic: return "hyperbolic";
    case SingularityType::Degenerate: return "degenerate";
  }
  return "degenerate";
}

bool is_elliptic_type(SingularityType type) {
  return type == SingularityType::EllipticElliptic || type == SingularityType::TransversallyElliptic ||
         type == SingularityType::Elliptic;
}

Vec2 gradient_singular_values(const ModelSystem& model, const Vec& x) {
  const Mat T = model.chart().tangent_basis(x);
  Mat G(2, T.cols());
  G.row(0) = (T.transpose() * model.gradient(1, x)).transpose();
  G.row(1) = (T.transpose() * model.gradient(2, x)).transpose();
  Eigen::JacobiSVD<Mat> svd(G);
  const Vec s = svd.singularValues();
  return Vec2(s[0], s.size() > 1 ? s[1] : 0.0);
}

int numerical_rank(const ModelSystem& model, const Vec& x, double tol) {
  const Vec2 s = gradient_singular_values(model, x);
  int rank = (s[0] > tol) + (s[1] > tol);
  return std::min(rank, model.dof());
}

SingularityType classify_spectrum(const std::vector<Cplx>& ev, double tol) {
  double scale = 0.0;
  for (const auto& l : ev) scale = std::max(scale, std::abs(l));
  if (scale < tol) return SingularityType::Degenerate;
  const double eps = tol * std::max(1.0, scale);
  int imag = 0, real = 0, cplx = 0;
  for (const auto& l : ev) {
    const bool re0 = std::abs(l.real()) <= eps, im0 = std::abs(l.imag()) <= eps;
    if (re0 && im0) return SingularityType::Degenerate;
    if (re0) ++imag;
    else if (im0) ++real;
    else ++cplx;
  }
  const int n = static_cast<int>(ev.size());
  if (n == 2) {
    if (imag == 2) return SingularityType::Elliptic;
    if (real == 2) return SingularityType::Hyperbolic;
    return SingularityType::Degenerate;
  }
  // Distinct magnitudes among the pairs, otherwise the pattern sits on a
  // resonance (or a collision) and is not decided here.
  auto distinct_pairs = [&](auto part) {
    std::vector<double> m;
    for (const auto& l : ev) m.push_back(std::abs(part(l)));
    std::sort(m.begin(), m.end());
    return std::abs(m[3] - m[0]) > eps && std::abs(m[2] - m[1]) > eps;
  };
  if (imag == 4) return distinct_pairs([](Cplx l) { return l.imag(); }) ? SingularityType::EllipticElliptic
                                                                        : SingularityType::Degenerate;
  if (real == 4) return distinct_pairs([](Cplx l) { return l.real(); }) ? SingularityType::HyperbolicHyperbolic
                                                                        : SingularityType::Degenerate;
  if (imag == 2 && real == 2) return SingularityType::EllipticHyperbolic;
  if (cplx == 4) return SingularityType::FocusFocus;
  return SingularityType::Degenerate;
}

double pattern_discriminant(const Mat& L) {
  const double B = -0.5 * (L * L).trace();
  const double C = L.determinant();
  return (B * B - 4.0 * C) / (B * B + std::abs(C) + 1e-300);
}

CriticalPoint classify(const ModelSystem& model, const PhasePoint& p, const ClassifyOptions& options) {
  model.check_on_manifold(p.coords);
  const Vec& x = p.coords;
  CriticalPoint cp;
  cp.point = PhasePoint{x, model.id()};
  cp.value = model.value(x);
  cp.rank = numerical_rank(model, x, options.rank_tol);
  if (cp.rank >= model.dof())
    fail(ErrorKind::BadParameter, "point is regular: dF has full rank there");

  const Linearization lin = linearize(model, x, options.fd_step);
  if (cp.rank == 0) {
    std::vector<Vec2> mus = {options.mu};
    for (const auto& m : kRedraws) mus.push_back(m);
    for (const auto& mu : mus) {
      const Mat L = mu[0] * lin.A1 + mu[1] * lin.A2;
      cp.eigenvalues = eigenvalues_of(L);
      cp.type = classify_spectrum(cp.eigenvalues, options.pattern_tol);
      if (cp.type != SingularityType::Degenerate) break;
    }
    return cp;
  }

  // Rank one: the combination nu with nu1 X1 + nu2 X2 = 0 has a critical
  // point here; its transverse pair decides the type.
  Mat X(x.size(), 2);
  X.col(0) = model.field(1, x);
  X.col(1) = model.field(2, x);
  Eigen::JacobiSVD<Mat> svd(X, Eigen::ComputeFullV);
  const Vec nu = svd.matrixV().col(1);
  const Mat L = nu[0] * lin.A1 + nu[1] * lin.A2;
  std::vector<Cplx> ev = eigenvalues_of(L);
  std::sort(ev.begin(), ev.end(), [](Cplx a, Cplx b) { return std::abs(a) < std::abs(b); });
  const Cplx a = ev[2], b = ev[3];
  const double scale = std::abs(b);
  const double eps = options.pattern_tol * std::max(1.0, scale);
  if (scale < options.pattern_tol || std::abs(ev[1]) > 1e-3 * scale) {
    cp.type = SingularityType::Degenerate;
  } else if (std::abs(a.real()) <= eps && std::abs(b.real()) <= eps) {
    cp.type = SingularityType::TransversallyElliptic;
  } else if (std::abs(a.imag()) <= eps && std::abs(b.imag()) <= eps) {
    cp.type = SingularityType::TransversallyHyperbolic;
  } else {
    cp.type = SingularityType::Degenerate;
  }
  return cp;
}

CriticalSearch find_critical_points(const ModelSystem& model, const CriticalSearchOptions& options) {
  if (options.seed_count < 1) fail(ErrorKind::BadParameter, "seed_count must be >= 1");
  const Chart& chart = model.chart();
  const Halton halton(model.sample_dimension(), options.seed);

  // Zeros of both fields (rank 0) and zeros of the wedge (rank <= 1).
  const Residual fields = [&](const Vec& x) {
    Vec r(2 * x.size());
    r << model.field(1, x), model.field(2, x);
    return r;
  };
  const Residual wedges = [&](const Vec& x) { return wedge(model.field(1, x), model.field(2, x)); };
  const bool one_dof = model.dof() == 1;

  struct SeedResult {
    std::vector<Vec> found;
    int dropped = 0;
  };
  const std::size_t n = static_cast<std::size_t>(options.seed_count);
  std::vector<SeedResult> per_seed(n);
  for_each_index(n, options.exec, [&](std::size_t i) {
    const Vec start = chart.project(model.sample(halton.point(i)));
    Vec x0 = start;
    if (tangent_lm(chart, fields, x0, 1e-10, options.max_iterations))
      per_seed[i].found.push_back(x0);
    else
      ++per_seed[i].dropped;
    if (one_dof) return;
    Vec x1 = start;
    if (tangent_lm(chart, wedges, x1, 1e-10, options.max_iterations))
      per_seed[i].found.push_back(x1);
    else
      ++per_seed[i].dropped;
  });

  CriticalSearch out;
  std::vector<Vec> kept;
  for (const auto& s : per_seed) {
    out.dropped += s.dropped;
    for (const auto& x : s.found) {
      const bool dup = std::any_of(kept.begin(), kept.end(),
                                   [&](const Vec& y) { return chart.distance(x, y) < options.dedupe_distance; });
      if (!dup) kept.push_back(x);
    }
  }
  std::vector<CriticalPoint> classified(kept.size());
  std::vector<char> valid(kept.size(), 1);
  for_each_index(kept.size(), options.exec, [&](std::size_t i) {
    try {
      classified[i] = classify(model, PhasePoint{kept[i], model.id()}, options.classify);
    } catch (const Error&) {
      valid[i] = 0;  // converged to a regular point within tolerance
    }
  });
  for (std::size_t i = 0; i < kept.size(); ++i)
    if (valid[i]) out.points.push_back(classified[i]);
    else ++out.dropped;
  return out;
}

SweepResult sweep_parameter(const ModelFamily& family, const Vec& point, const std::vector<double>& t_grid,
                            const ClassifyOptions& options, double width) {
  auto type_at = [&](double t) {
    ModelPtr m = family(t);
    return classify(*m, PhasePoint{point, m->id()}, options).type;
  };
  auto disc_at = [&](double t) {
    ModelPtr m = family(t);
    const Linearization lin = linearize(*m, point, options.fd_step);
    return pattern_discriminant(options.mu[0] * lin.A1 + options.mu[1] * lin.A2);
  };
  SweepResult out;
  for (double t : t_grid) out.samples.push_back({t, type_at(t)});
  for (std::size_t i = 0; i + 1 < out.samples.size(); ++i) {
    const auto& a = out.samples[i];
    const auto& b = out.samples[i + 1];
    if (a.type == b.type) continue;
    double lo = a.t, hi = b.t;
    const bool ee_ff = (a.type == SingularityType::EllipticElliptic && b.type == SingularityType::FocusFocus) ||
                       (a.type == SingularityType::FocusFocus && b.type == SingularityType::EllipticElliptic);
    if (ee_ff) {
      // The discriminant changes sign exactly where the pairs collide.
      const double s_lo = disc_at(lo);
      while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        if ((disc_at(mid) > 0) == (s_lo > 0)) lo = mid;
        else hi = mid;
      }
    } else {
      while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        if (type_at(mid) == a.type) lo = mid;
        else hi = mid;
      }
    }
    out.transitions.push_back({lo, hi, a.type, b.type});
  }
  return out;
}

}  // namespace semitoric
