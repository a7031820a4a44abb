#include "semitoric/catalog.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "semitoric/error.hpp"

namespace semitoric {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Rotates the (i, i+1) coordinate pair counter-clockwise by angle a.
void rotate_pair(Vec& x, int i, double a) {
  const double c = std::cos(a), s = std::sin(a);
  const double u = x[i], v = x[i + 1];
  x[i] = c * u - s * v;
  x[i + 1] = s * u + c * v;
}

Eigen::Vector3d sphere_point(double u_height, double u_angle) {
  const double z = std::clamp(2.0 * u_height - 1.0, -1.0, 1.0);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = kTwoPi * u_angle;
  return {r * std::cos(phi), r * std::sin(phi), z};
}

Vec vec_of(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double a : v) out[i++] = a;
  return out;
}

Params resolve(const ModelDescriptor& d, const Params& given) {
  Params p;
  for (const auto& spec : d.params) p[spec.name] = spec.default_value;
  for (const auto& [k, v] : given) {
    if (!p.count(k)) fail(ErrorKind::BadParameter, "model " + d.id + " has no parameter '" + k + "'");
    if (!std::isfinite(v)) fail(ErrorKind::BadParameter, "parameter '" + k + "' is not finite");
    p[k] = v;
  }
  return p;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// --- spherical pendulum on T*S^2 -------------------------------------------

ModelPtr make_spherical_pendulum(const Params& p) {
  const double pmax = p.at("p_max");
  if (!(pmax > 0)) fail(ErrorKind::BadParameter, "p_max must be > 0, got " + fmt(pmax));
  ModelSystem::Definition d;
  d.id = "spherical_pendulum";
  d.params = p;
  d.chart.add_cotangent_sphere(1.0);
  d.flags.non_proper_periodic = true;
  d.periodic_component = 2;
  d.value = [](const Vec& x) {
    const double h = 0.5 * x.segment<3>(3).squaredNorm() + x[2];
    const double l = x[0] * x[4] - x[1] * x[3];
    return Vec2(h, l);
  };
  d.gradient = [](int k, const Vec& x) {
    Vec g = Vec::Zero(6);
    if (k == 1) {
      g[2] = 1.0;
      g.segment<3>(3) = x.segment<3>(3);
    } else {
      g[0] = x[4];
      g[1] = -x[3];
      g[3] = -x[1];
      g[4] = x[0];
    }
    return g;
  };
  d.circle = [](const Vec& x, double s) {
    Vec y = x;
    rotate_pair(y, 0, s);
    rotate_pair(y, 3, s);
    return y;
  };
  d.sample_dim = 4;
  d.sample = [pmax](const std::vector<double>& u) {
    const Eigen::Vector3d q = sphere_point(u[0], u[1]);
    // Orthonormal tangent frame at q.
    Eigen::Vector3d a = std::abs(q[2]) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
    Eigen::Vector3d e1 = (a - q * q.dot(a)).normalized();
    Eigen::Vector3d e2 = q.cross(e1);
    const double r = pmax * std::sqrt(u[2]);
    const double th = kTwoPi * u[3];
    Vec x(6);
    x.head<3>() = q;
    x.tail<3>() = r * (std::cos(th) * e1 + std::sin(th) * e2);
    return x;
  };
  d.metadata.fixed_points = {vec_of({0, 0, -1, 0, 0, 0}), vec_of({0, 0, 1, 0, 0, 0})};
  d.metadata.f1_window = 0.5 * pmax * pmax + 1.0;
  d.metadata.provenance =
      "spherical pendulum on T*S^2: H = |p|^2/2 + q_z, L = q_x p_y - q_y p_x";
  return std::make_shared<ModelSystem>(std::move(d));
}

// --- Jaynes-Cummings on S^2 x R^2 -------------------------------------------

ModelPtr make_jaynes_cummings(const Params& p) {
  ModelSystem::Definition d;
  d.id = "jaynes_cummings";
  d.params = p;
  // The sphere factor carries the opposite orientation; with it the point
  // (0,0,1,0,0) is focus-focus rather than elliptic.
  d.chart.add_sphere(-1.0).add_plane(1.0);
  d.flags.semitoric = true;
  d.value = [](const Vec& x) {
    return Vec2(0.5 * (x[3] * x[3] + x[4] * x[4]) + x[2], 0.5 * (x[3] * x[0] + x[4] * x[1]));
  };
  d.gradient = [](int k, const Vec& x) {
    Vec g(5);
    if (k == 1)
      g << 0.0, 0.0, 1.0, x[3], x[4];
    else
      g << 0.5 * x[3], 0.5 * x[4], 0.0, 0.5 * x[0], 0.5 * x[1];
    return g;
  };
  d.circle = [](const Vec& x, double s) {
    Vec y = x;
    rotate_pair(y, 0, s);
    rotate_pair(y, 3, s);
    return y;
  };
  constexpr double f1max = 3.0;
  const double rho = std::sqrt(2.0 * (f1max + 1.0));
  d.sample_dim = 4;
  d.sample = [rho](const std::vector<double>& u) {
    Vec x(5);
    x.head<3>() = sphere_point(u[0], u[1]);
    const double r = rho * std::sqrt(u[2]);
    const double th = kTwoPi * u[3];
    x[3] = r * std::cos(th);
    x[4] = r * std::sin(th);
    return x;
  };
  d.metadata.fixed_points = {vec_of({0, 0, -1, 0, 0}), vec_of({0, 0, 1, 0, 0})};
  d.metadata.f1_window = f1max;
  d.metadata.invariants = {
      {"focus_focus_value_c1", 1.0, "value at m = (0,0,1,0,0) by direct evaluation"},
      {"focus_focus_value_c2", 0.0, "value at m = (0,0,1,0,0) by direct evaluation"},
      {"taylor_a10", kPi / 2.0, "closed form: pi/2"},
      {"taylor_a01", 5.0 * std::log(2.0), "closed form: 5 log 2"},
  };
  d.metadata.provenance =
      "coupled spin-oscillator: f1 = (u^2+v^2)/2 + z, f2 = (ux+vy)/2";
  return std::make_shared<ModelSystem>(std::move(d));
}

// --- coupled angular momenta on S^2 x S^2 -----------------------------------

ModelPtr make_coupled_angular_momenta(const Params& p) {
  const double R1 = p.at("R1"), R2 = p.at("R2"), t = p.at("t");
  if (!(R1 > 0.0 && R2 > R1))
    fail(ErrorKind::BadParameter, "coupled_angular_momenta requires R2 > R1 > 0, got R1=" + fmt(R1) +
                                      ", R2=" + fmt(R2));
  if (!(t >= 0.0 && t <= 1.0))
    fail(ErrorKind::BadParameter, "coupled_angular_momenta requires t in [0,1], got t=" + fmt(t));
  ModelSystem::Definition d;
  d.id = "coupled_angular_momenta";
  d.params = p;
  d.chart.add_sphere(-R1).add_sphere(-R2);
  d.flags.semitoric = true;
  d.value = [R1, R2, t](const Vec& x) {
    const double dot = x.head<3>().dot(x.tail<3>());
    return Vec2(R1 * x[2] + R2 * x[5], (1.0 - t) * x[2] + t * dot);
  };
  d.gradient = [R1, R2, t](int k, const Vec& x) {
    Vec g = Vec::Zero(6);
    if (k == 1) {
      g[2] = R1;
      g[5] = R2;
    } else {
      g.head<3>() = t * x.tail<3>();
      g[2] += 1.0 - t;
      g.tail<3>() = t * x.head<3>();
    }
    return g;
  };
  d.circle = [](const Vec& x, double s) {
    Vec y = x;
    rotate_pair(y, 0, s);
    rotate_pair(y, 3, s);
    return y;
  };
  d.sample_dim = 4;
  d.sample = [](const std::vector<double>& u) {
    Vec x(6);
    x.head<3>() = sphere_point(u[0], u[1]);
    x.tail<3>() = sphere_point(u[2], u[3]);
    return x;
  };
  d.metadata.fixed_points = {vec_of({0, 0, 1, 0, 0, 1}), vec_of({0, 0, 1, 0, 0, -1}),
                             vec_of({0, 0, -1, 0, 0, 1}), vec_of({0, 0, -1, 0, 0, -1})};
  if (R1 == 1.0 && R2 == 2.5 && t == 0.5) {
    d.metadata.invariants = {
        {"taylor_a10", std::atan(9.0 / 13.0), "closed form: arctan(9/13)"},
        {"taylor_a01", 3.5 * std::log(2.0) + 3.0 * std::log(3.0) - 1.5 * std::log(5.0),
         "(7/2) log 2 + 3 log 3 - (3/2) log 5"},
    };
  }
  d.metadata.provenance =
      "f1 = R1 z1 + R2 z2, f2 = (1-t) z1 + t (x1x2 + y1y2 + z1z2), "
      "w = -(R1 w_S2 + R2 w_S2)";
  return std::make_shared<ModelSystem>(std::move(d));
}

// --- height function on S^2 -------------------------------------------------

ModelPtr make_s2_height(const Params& p) {
  ModelSystem::Definition d;
  d.id = "s2_height";
  d.params = p;
  d.chart.add_sphere(1.0);
  d.dof = 1;
  d.flags.toric = true;
  d.value = [](const Vec& x) { return Vec2(x[2], x[2]); };
  d.gradient = [](int, const Vec&) {
    Vec g = Vec::Zero(3);
    g[2] = 1.0;
    return g;
  };
  // X_z = p x e_z turns clockwise about the z axis.
  d.circle = [](const Vec& x, double s) {
    Vec y = x;
    rotate_pair(y, 0, -s);
    return y;
  };
  d.sample_dim = 2;
  d.sample = [](const std::vector<double>& u) {
    Vec x(3);
    x = sphere_point(u[0], u[1]);
    return x;
  };
  d.metadata.fixed_points = {vec_of({0, 0, -1}), vec_of({0, 0, 1})};
  d.metadata.declared_polytope = {Vec2(-1, -1), Vec2(1, 1)};
  d.metadata.provenance = "height on S^2 with w = d(theta) ^ dh";
  return std::make_shared<ModelSystem>(std::move(d));
}

// --- rotations of CP^n, n in {1, 2} ------------------------------------------

ModelPtr make_cpn_rotation(const Params& p) {
  const double nn = p.at("n"), lambda = p.at("lambda");
  if (!(nn == 1.0 || nn == 2.0)) fail(ErrorKind::BadParameter, "cpn_rotation requires n in {1,2}, got " + fmt(nn));
  if (!(lambda > 0.0)) fail(ErrorKind::BadParameter, "cpn_rotation requires lambda > 0, got " + fmt(lambda));
  const int n = static_cast<int>(nn);
  ModelSystem::Definition d;
  d.id = "cpn_rotation";
  d.params = p;
  d.chart.add_projective(n, lambda);
  d.dof = n;
  d.flags.toric = true;
  // |z_k|^2 / |z|^2 with z_k at real offset 2k.
  auto weight = [](const Vec& x, int k) {
    return (x[2 * k] * x[2 * k] + x[2 * k + 1] * x[2 * k + 1]) / x.squaredNorm();
  };
  d.value = [n, lambda, weight](const Vec& x) {
    const double f1 = lambda * weight(x, 1);
    const double f2 = n == 1 ? f1 : lambda * weight(x, 2);
    return Vec2(f1, f2);
  };
  d.gradient = [n, lambda, weight](int k, const Vec& x) {
    const int idx = n == 1 ? 1 : k;
    const double nz = x.squaredNorm();
    const double w = weight(x, idx);
    Vec g = -2.0 * lambda * w / nz * x;
    g[2 * idx] += 2.0 * lambda * x[2 * idx] / nz;
    g[2 * idx + 1] += 2.0 * lambda * x[2 * idx + 1] / nz;
    return g;
  };
  d.circle = [](const Vec& x, double s) {
    Vec y = x;
    rotate_pair(y, 2, s);
    return y;
  };
  if (n == 1) {
    d.sample_dim = 2;
    d.sample = [](const std::vector<double>& u) {
      Vec x = Vec::Zero(4);
      x[0] = std::sqrt(std::max(0.0, 1.0 - u[0]));
      const double r = std::sqrt(u[0]);
      x[2] = r * std::cos(kTwoPi * u[1]);
      x[3] = r * std::sin(kTwoPi * u[1]);
      return x;
    };
    d.metadata.fixed_points = {vec_of({1, 0, 0, 0}), vec_of({0, 0, 1, 0})};
    d.metadata.declared_polytope = {Vec2(0, 0), Vec2(lambda, lambda)};
  } else {
    d.sample_dim = 4;
    d.sample = [](const std::vector<double>& u) {
      // Uniform weights on the simplex times uniform phases.
      const double su = std::sqrt(u[0]);
      const double a0 = 1.0 - su, a1 = su * (1.0 - u[1]), a2 = su * u[1];
      Vec x = Vec::Zero(6);
      x[0] = std::sqrt(std::max(0.0, a0));
      const double r1 = std::sqrt(std::max(0.0, a1)), r2 = std::sqrt(std::max(0.0, a2));
      x[2] = r1 * std::cos(kTwoPi * u[2]);
      x[3] = r1 * std::sin(kTwoPi * u[2]);
      x[4] = r2 * std::cos(kTwoPi * u[3]);
      x[5] = r2 * std::sin(kTwoPi * u[3]);
      return x;
    };
    d.metadata.fixed_points = {vec_of({1, 0, 0, 0, 0, 0}), vec_of({0, 0, 1, 0, 0, 0}),
                               vec_of({0, 0, 0, 0, 1, 0})};
    d.metadata.declared_polytope = {Vec2(0, 0), Vec2(lambda, 0), Vec2(0, lambda)};
  }
  d.metadata.provenance =
      "CP^n with lambda times Fubini-Study, F = lambda |z_k|^2 / sum |z_i|^2";
  return std::make_shared<ModelSystem>(std::move(d));
}

// --- local focus-focus model on R^4 -------------------------------------------

ModelPtr make_q_model(const Params& p) {
  const double box = p.at("box");
  if (!(box > 0)) fail(ErrorKind::BadParameter, "box must be > 0");
  ModelSystem::Definition d;
  d.id = "q_model";
  d.params = p;
  // Coordinates (x1, xi1, x2, xi2), w = dx1^dxi1 + dx2^dxi2.
  d.chart.add_plane(1.0).add_plane(1.0);
  d.flags.local_model = true;
  d.value = [](const Vec& x) {
    const double x1 = x[0], k1 = x[1], x2 = x[2], k2 = x[3];
    return Vec2(x1 * k2 - x2 * k1, x1 * k1 + x2 * k2);
  };
  d.gradient = [](int k, const Vec& x) {
    const double x1 = x[0], k1 = x[1], x2 = x[2], k2 = x[3];
    Vec g(4);
    if (k == 1)
      g << k2, -x2, -k1, x1;
    else
      g << k1, x1, k2, x2;
    return g;
  };
  // Flow of q1 rotates (x1, x2) and (xi1, xi2) clockwise.
  d.circle = [](const Vec& x, double s) {
    const double c = std::cos(s), sn = std::sin(s);
    Vec y(4);
    y[0] = c * x[0] + sn * x[2];
    y[2] = -sn * x[0] + c * x[2];
    y[1] = c * x[1] + sn * x[3];
    y[3] = -sn * x[1] + c * x[3];
    return y;
  };
  d.sample_dim = 4;
  d.sample = [box](const std::vector<double>& u) {
    Vec x(4);
    for (int k = 0; k < 4; ++k) x[k] = box * (2.0 * u[k] - 1.0);
    return x;
  };
  d.metadata.fixed_points = {Vec::Zero(4)};
  d.metadata.provenance = "local model q1 = x1 xi2 - x2 xi1, q2 = x1 xi1 + x2 xi2";
  return std::make_shared<ModelSystem>(std::move(d));
}

struct Entry {
  ModelDescriptor descriptor;
  ModelPtr (*make)(const Params&);
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> e;
    ModelFlags pend;
    pend.non_proper_periodic = true;
    e.push_back({{"spherical_pendulum", "spherical pendulum on T*S^2 (energy, vertical angular momentum)",
                  {{"p_max", 2.0, "p_max > 0 (sampling window on |p|)"}}, pend, 2},
                 make_spherical_pendulum});
    ModelFlags semi;
    semi.semitoric = true;
    e.push_back({{"jaynes_cummings", "coupled spin-oscillator on S^2 x R^2", {}, semi, 2}, make_jaynes_cummings});
    e.push_back({{"coupled_angular_momenta", "coupled angular momenta on S^2 x S^2",
                  {{"R1", 1.0, "R2 > R1 > 0"}, {"R2", 2.5, "R2 > R1 > 0"}, {"t", 0.5, "t in [0,1]"}},
                  semi, 2},
                 make_coupled_angular_momenta});
    ModelFlags toric;
    toric.toric = true;
    e.push_back({{"s2_height", "height function on S^2", {}, toric, 1}, make_s2_height});
    e.push_back({{"cpn_rotation", "torus rotation on CP^n",
                  {{"n", 2.0, "n in {1,2}"}, {"lambda", 1.0, "lambda > 0"}}, toric, 2},
                 make_cpn_rotation});
    ModelFlags local;
    local.local_model = true;
    e.push_back({{"q_model", "focus-focus normal form (q1, q2) on R^4",
                  {{"box", 1.0, "box > 0 (sampling half-width)"}}, local, 2},
                 make_q_model});
    return e;
  }();
  return table;
}

}  // namespace

std::vector<ModelDescriptor> catalog() {
  std::vector<ModelDescriptor> out;
  for (const auto& e : entries()) out.push_back(e.descriptor);
  return out;
}

ModelPtr instantiate(const std::string& model_id, const Params& params) {
  for (const auto& e : entries())
    if (e.descriptor.id == model_id) return e.make(resolve(e.descriptor, params));
  fail(ErrorKind::UnknownModel, "unknown model '" + model_id + "'");
}

ModelPtr scale_second_component(const ModelPtr& model, double factor) {
  if (model->periodic_component() != 1)
    fail(ErrorKind::BadParameter, "scaling requires f1 to be the periodic component");
  if (!(factor != 0.0 && std::isfinite(factor))) fail(ErrorKind::BadParameter, "scale factor must be non-zero");
  ModelSystem::Definition d = model->definition();
  auto value = d.value;
  auto gradient = d.gradient;
  d.value = [value, factor](const Vec& x) {
    Vec2 v = value(x);
    v[1] *= factor;
    return v;
  };
  d.gradient = [gradient, factor](int k, const Vec& x) {
    Vec g = gradient(k, x);
    if (k == 2) g *= factor;
    return g;
  };
  d.metadata.invariants.clear();
  return std::make_shared<ModelSystem>(std::move(d));
}

}  // namespace semitoric
