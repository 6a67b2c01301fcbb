#ifndef ARCBEM_GEOMETRY_HPP
#define ARCBEM_GEOMETRY_HPP

// Analytic arc parametrizations r : [-1,1] -> R^2 with closed-form
// derivatives, multi-arc scenes, and the elastic medium parameters.

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "arcbem/chebyshev.hpp"  // pi

namespace arcbem {

using Eigen::Vector2d;

struct ElasticMedium {
  double lambda = 2.0;
  double mu = 1.0;
  double rho = 1.0;
  double omega = 50.0;

  void validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("ElasticMedium: mu must be > 0");
    if (!(lambda + mu > 0.0)) throw std::invalid_argument("ElasticMedium: lambda + mu must be > 0");
    if (!(rho > 0.0)) throw std::invalid_argument("ElasticMedium: rho must be > 0");
    if (!(omega > 0.0)) throw std::invalid_argument("ElasticMedium: omega must be > 0");
  }
  // compressional wavenumber (lambda + 2mu modulus)
  double kappa_p() const { return omega * std::sqrt(rho / (lambda + 2.0 * mu)); }
  // shear wavenumber
  double kappa_s() const { return omega * std::sqrt(rho / mu); }
};

struct LineArc {
  Vector2d a, b;
};

struct CircularArc {
  Vector2d center;
  double radius;
  double angle_start, angle_end;  // theta(t) = start + (end-start)(t+1)/2
};

// r(t) = scale * e^t (cos(rate t), sin(rate t))
struct SpiralArc {
  double scale = 1.0;
  double rate = 5.0;
};

// x(t) = a t + b, y(t) = c sin(beta t + gamma) + d
struct SineArc {
  double a, b, c, d, beta, gamma;
};

class ArcGeometry {
 public:
  using Shape = std::variant<LineArc, CircularArc, SpiralArc, SineArc>;

  struct Frame {
    Vector2d point;
    Vector2d velocity;
    Vector2d normal;  // (r2', -r1') / |r'|
    double jacobian;
  };

  explicit ArcGeometry(Shape shape) : shape_(std::move(shape)) { validate(); }

  // k-th derivative of the parametrization, k = 0..3, closed form per kind
  Vector2d derivative(double t, int order) const {
    check_domain(t);
    return std::visit([&](const auto& s) { return deriv_impl(s, t, order); }, shape_);
  }

  Vector2d point(double t) const { return derivative(t, 0); }

  Frame eval(double t) const {
    Frame f;
    f.point = derivative(t, 0);
    f.velocity = derivative(t, 1);
    f.jacobian = f.velocity.norm();
    f.normal = Vector2d(f.velocity.y(), -f.velocity.x()) / f.jacobian;
    return f;
  }

  const Shape& shape() const { return shape_; }

 private:
  Shape shape_;

  static void check_domain(double t) {
    if (std::abs(t) > 1.0 + 1e-14) throw std::domain_error("ArcGeometry: |t| > 1");
  }

  void validate() const {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int k = 0; k < 257; ++k) {
      const double t = -1.0 + 2.0 * k / 256.0;
      const double speed = derivative(t, 1).norm();
      lo = std::min(lo, speed);
      hi = std::max(hi, speed);
    }
    if (!(lo > 1e-8 * hi))
      throw std::invalid_argument("ArcGeometry: vanishing speed on [-1,1]");
  }

  static Vector2d deriv_impl(const LineArc& s, double t, int order) {
    switch (order) {
      case 0: return 0.5 * (1.0 - t) * s.a + 0.5 * (1.0 + t) * s.b;
      case 1: return 0.5 * (s.b - s.a);
      default: return Vector2d::Zero();
    }
  }

  static Vector2d deriv_impl(const CircularArc& s, double t, int order) {
    const double dth = 0.5 * (s.angle_end - s.angle_start);
    const double th = s.angle_start + dth * (t + 1.0);
    const double c = std::cos(th), sn = std::sin(th);
    const double R = s.radius;
    switch (order) {
      case 0: return s.center + R * Vector2d(c, sn);
      case 1: return R * dth * Vector2d(-sn, c);
      case 2: return -R * dth * dth * Vector2d(c, sn);
      default: return R * dth * dth * dth * Vector2d(sn, -c);
    }
  }

  static Vector2d deriv_impl(const SpiralArc& s, double t, int order) {
    // z(t) = scale e^{(1+ i rate) t}; z^{(k)} = (1 + i rate)^k z
    const std::complex<double> lam(1.0, s.rate);
    std::complex<double> z = s.scale * std::exp(lam * t);
    for (int k = 0; k < order; ++k) z *= lam;
    return Vector2d(z.real(), z.imag());
  }

  static Vector2d deriv_impl(const SineArc& s, double t, int order) {
    const double ph = s.beta * t + s.gamma;
    switch (order) {
      case 0: return Vector2d(s.a * t + s.b, s.c * std::sin(ph) + s.d);
      case 1: return Vector2d(s.a, s.c * s.beta * std::cos(ph));
      case 2: return Vector2d(0.0, -s.c * s.beta * s.beta * std::sin(ph));
      default: return Vector2d(0.0, -s.c * s.beta * s.beta * s.beta * std::cos(ph));
    }
  }
};

struct Scene {
  std::vector<ArcGeometry> arcs;
  ElasticMedium medium;

  double diameter() const {
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const auto& arc : arcs)
      for (int k = 0; k < 65; ++k) {
        const Vector2d p = arc.point(-1.0 + 2.0 * k / 64.0);
        lo_x = std::min(lo_x, p.x());
        hi_x = std::max(hi_x, p.x());
        lo_y = std::min(lo_y, p.y());
        hi_y = std::max(hi_y, p.y());
      }
    return std::hypot(hi_x - lo_x, hi_y - lo_y);
  }
};

// Approximate pairwise minimum distance on a 257-point grid per arc.  A
// sampled check, not a certified bound.
inline double scene_min_distance(const Scene& scene) {
  const int M = static_cast<int>(scene.arcs.size());
  if (M < 2) return std::numeric_limits<double>::infinity();
  constexpr int grid = 257;
  std::vector<std::vector<Vector2d>> pts(M);
  for (int i = 0; i < M; ++i) {
    pts[i].reserve(grid);
    for (int k = 0; k < grid; ++k)
      pts[i].push_back(scene.arcs[i].point(-1.0 + 2.0 * k / (grid - 1.0)));
  }
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j)
      for (const auto& p : pts[i])
        for (const auto& q : pts[j]) best = std::min(best, (p - q).norm());
  return best;
}

struct SineSceneRanges {
  double a_min = 0.3, a_max = 0.8;
  double c_min = 0.1, c_max = 0.4;
  double beta_min = 1.0, beta_max = 6.0;
  double gamma_min = 0.0, gamma_max = 2.0 * pi;
  double spacing_x = 2.2, spacing_y = 1.2;
};

// Random sine arcs with centers on a staggered grid; deterministic per seed,
// redraws any arc that violates the sampled disjointness check.
inline Scene generate_sine_scene(int count, std::uint64_t seed,
                                 const SineSceneRanges& ranges = {},
                                 const ElasticMedium& medium = {}) {
  if (count < 1) throw std::invalid_argument("generate_sine_scene: count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(ranges.a_min, ranges.a_max);
  std::uniform_real_distribution<double> uc(ranges.c_min, ranges.c_max);
  std::uniform_real_distribution<double> ub(ranges.beta_min, ranges.beta_max);
  std::uniform_real_distribution<double> ug(ranges.gamma_min, ranges.gamma_max);

  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  Scene scene;
  scene.medium = medium;
  for (int idx = 0; idx < count; ++idx) {
    const int row = idx / cols, col = idx % cols;
    const double cx = col * ranges.spacing_x + (row % 2 ? 0.5 * ranges.spacing_x : 0.0);
    const double cy = row * ranges.spacing_y;
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      SineArc arc{ua(rng), cx, uc(rng), cy, ub(rng), ug(rng)};
      Scene trial = scene;
      trial.arcs.emplace_back(ArcGeometry::Shape{arc});
      if (trial.arcs.size() < 2 || scene_min_distance(trial) > 0.05) {
        scene = std::move(trial);
        placed = true;
      }
    }
    if (!placed)
      throw std::runtime_error("generate_sine_scene: retry budget exhausted placing arc " +
                               std::to_string(idx));
  }
  return scene;
}

}  // namespace arcbem

#endif  // ARCBEM_GEOMETRY_HPP
