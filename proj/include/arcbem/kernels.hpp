#ifndef ARCBEM_KERNELS_HPP
#define ARCBEM_KERNELS_HPP

// Elastic fundamental tensor, its traction, the Maue-regularized
// hyper-singular kernel quartet, and the splitting of every same-arc kernel
// into  G(r(s), r(t)) = log|s-t| J(s,t) + R(s,t)  with J, R analytic up to
// the diagonal.
//
// Conventions used throughout:
//   r  = |x - y|,  d = (x - y)/r
//   kappa_p (compressional) uses lambda + 2 mu; kappa_s (shear) uses mu
//   D(s,t) = (r(s) - r(t))/(s - t)   (smooth chord slope),  q = |D|
//   A = [[0,-1],[1,0]] (quarter rotation)

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "arcbem/geometry.hpp"
#include "arcbem/special_functions.hpp"

namespace arcbem {

using Eigen::Matrix2cd;
using Eigen::Matrix2d;

inline cplx helmholtz_fs(double kappa, const Vector2d& x, const Vector2d& y) {
  const double r = (x - y).norm();
  if (r == 0.0) throw std::domain_error("helmholtz_fs: x == y");
  return cplx(0.0, 0.25) * hankel1(0, kappa * r);
}

inline Matrix2cd elastic_fundamental(const ElasticMedium& med, const Vector2d& x,
                                     const Vector2d& y) {
  const double r = (x - y).norm();
  if (r == 0.0) throw std::domain_error("elastic_fundamental: x == y");
  const double ks = med.kappa_s(), kp = med.kappa_p();
  const Vector2d d = (x - y) / r;
  const cplx i4mu(0.0, 0.25 / med.mu);
  const cplx i4rw2(0.0, 0.25 / (med.rho * med.omega * med.omega));
  const cplx h0 = hankel1(0, ks * r);
  const cplx dh1 = ks * hankel1(1, ks * r) - kp * hankel1(1, kp * r);
  const cplx dh2 = ks * ks * hankel1(2, ks * r) - kp * kp * hankel1(2, kp * r);
  Matrix2cd E = (i4mu * h0 - i4rw2 * dh1 / r) * Matrix2cd::Identity();
  E += (i4rw2 * dh2) * (d * d.transpose()).cast<cplx>();
  return E;
}

// T(d_y, nu_y) applied to the columns of E(x, y): sigma_y(E_col) nu_y with
// closed-form Hankel derivatives (H0' = -H1, H1' = H0 - H1/z, H2' = H1 - 2H2/z).
inline Matrix2cd traction_of_fundamental(const ElasticMedium& med, const Vector2d& x,
                                         const Vector2d& y, const Vector2d& normal_y) {
  const double r = (x - y).norm();
  if (r == 0.0) throw std::domain_error("traction_of_fundamental: x == y");
  const double ks = med.kappa_s(), kp = med.kappa_p();
  const double zs = ks * r, zp = kp * r;
  const Vector2d d = (x - y) / r;
  const cplx i4mu(0.0, 0.25 / med.mu);
  const cplx i4rw2(0.0, 0.25 / (med.rho * med.omega * med.omega));

  const cplx h0s = hankel1(0, zs), h0p = hankel1(0, zp);
  const cplx h1s = hankel1(1, zs), h1p = hankel1(1, zp);
  const cplx h2s = hankel1(2, zs), h2p = hankel1(2, zp);
  const cplx dh1 = ks * h1s - kp * h1p;
  const cplx dh2 = ks * ks * h2s - kp * kp * h2p;

  // E = phi1(r) I + phi3(r) d d^T
  const cplx phi1 = i4mu * h0s - i4rw2 * dh1 / r;
  const cplx phi3 = i4rw2 * dh2;
  const cplx dphi1 = i4mu * ks * (-h1s) -
                     i4rw2 * ((ks * ks * h0s - kp * kp * h0p) / r - 2.0 * dh1 / (r * r));
  const cplx dphi3 = i4rw2 * ((ks * ks * ks * h1s - kp * kp * kp * h1p) - 2.0 * dh2 / r);

  // grad[m](k,p) = d/dy_m E_{kp};  d/dy_m r = -d_m, d/dy_m d_k = (-delta + d d^T)/r
  auto dE = [&](int m, int k, int p) -> cplx {
    const double dm = d[m], dk = d[k], dp = d[p];
    cplx val = -dphi1 * dm * (k == p ? 1.0 : 0.0) - dphi3 * dm * dk * dp;
    val += phi3 / r *
           (-(k == m ? 1.0 : 0.0) * dp - (p == m ? 1.0 : 0.0) * dk + 2.0 * dk * dm * dp);
    return val;
  };

  Matrix2cd T;
  for (int p = 0; p < 2; ++p) {
    const cplx divp = dE(0, 0, p) + dE(1, 1, p);
    for (int k = 0; k < 2; ++k) {
      cplx val = med.lambda * normal_y[k] * divp;
      for (int m = 0; m < 2; ++m) val += med.mu * normal_y[m] * (dE(m, k, p) + dE(k, m, p));
      T(k, p) = val;
    }
  }
  return T;
}

struct KernelSplit {
  std::function<Matrix2cd(double, double)> J;  // coefficient of log|s-t|
  std::function<Matrix2cd(double, double)> R;  // analytic remainder
  bool same_arc = false;
};

namespace detail {

// Chord slope D(s,t) = (r(s)-r(t))/(s-t) with a midpoint Taylor form below
// |s-t| = 1e-4 to avoid cancellation; q = |D|, rr = |r(s)-r(t)| = q|s-t|.
struct ChordFrame {
  Vector2d D;
  double q;
  double rr;
  double dt;
};

inline ChordFrame chord(const ArcGeometry& arc, double s, double t) {
  ChordFrame c;
  c.dt = s - t;
  if (std::abs(c.dt) < 1e-4) {
    const double mid = 0.5 * (s + t);
    c.D = arc.derivative(mid, 1) + (c.dt * c.dt / 24.0) * arc.derivative(mid, 3);
  } else {
    c.D = (arc.point(s) - arc.point(t)) / c.dt;
  }
  c.q = c.D.norm();
  c.rr = c.q * std::abs(c.dt);
  return c;
}

struct SplitPair {
  cplx J, R;
};

// gamma_kappa(r(s), r(t)) = (i/4) H0(kappa q |s-t|) split via
// H0(z) = A0(z) + (2i/pi) log(z) J0(z),  log z = log kappa + log q + log|s-t|.
inline SplitPair gamma_split_at(double kappa, double rr, double logq) {
  const double z = kappa * rr;
  const double j0 = bessel_j(0, z);
  const cplx i2pi(0.0, 2.0 / pi);
  SplitPair p;
  p.J = cplx(0.0, 0.25) * i2pi * j0;
  p.R = cplx(0.0, 0.25) * (hankel_a0(z) + i2pi * (std::log(kappa) + logq) * j0);
  return p;
}

// D1(r) = [ks H1(ks r) - kp H1(kp r)]/r = ks^2 H1(zs)/zs - kp^2 H1(zp)/zp.
// The kappa-independent (2i/pi)/r^2 poles cancel between the two terms, so
// the split is assembled from the entire combination g1(z) = A1(z)/z +
// (2i/pi)/z^2 and J1(z)/z.
inline SplitPair d1_split_at(double ks, double kp, double rr, double logq) {
  const double zs = ks * rr, zp = kp * rr;
  const cplx i2pi(0.0, 2.0 / pi);
  const double j1s = j1_over_z(zs), j1p = j1_over_z(zp);
  SplitPair p;
  p.J = i2pi * (ks * ks * j1s - kp * kp * j1p);
  p.R = (ks * ks * hankel_g1(zs) - kp * kp * hankel_g1(zp)) +
        i2pi * (ks * ks * (std::log(ks) + logq) * j1s - kp * kp * (std::log(kp) + logq) * j1p);
  return p;
}

struct MatSplit {
  Matrix2cd J, R;
};

// Split of the fundamental tensor in parameter space on one arc.  The third
// term's 1/r^2 poles cancel via g2(z) = A2(z) + (4i/pi)/z^2, and
// d d^T = D D^T / q^2 is smooth.
inline MatSplit elastic_split_at(const ElasticMedium& med, const ChordFrame& c) {
  const double ks = med.kappa_s(), kp = med.kappa_p();
  const double zs = ks * c.rr, zp = kp * c.rr;
  const double logq = std::log(c.q);
  const cplx i2pi(0.0, 2.0 / pi);
  const cplx i4mu(0.0, 0.25 / med.mu);
  const cplx i4rw2(0.0, 0.25 / (med.rho * med.omega * med.omega));
  const Matrix2d ddt = (c.D * c.D.transpose()) / (c.q * c.q);

  const double j0 = bessel_j(0, zs);
  const cplx t1J = i4mu * i2pi * j0;
  const cplx t1R = i4mu * (hankel_a0(zs) + i2pi * (std::log(ks) + logq) * j0);

  const SplitPair d1 = d1_split_at(ks, kp, c.rr, logq);

  const double j2s = bessel_j(2, zs), j2p = bessel_j(2, zp);
  const cplx f2J = i2pi * (ks * ks * j2s - kp * kp * j2p);
  const cplx f2R =
      (ks * ks * hankel_g2(zs) - kp * kp * hankel_g2(zp)) +
      i2pi * (ks * ks * (std::log(ks) + logq) * j2s - kp * kp * (std::log(kp) + logq) * j2p);

  MatSplit m;
  m.J = (t1J - i4rw2 * d1.J) * Matrix2cd::Identity() + (i4rw2 * f2J) * ddt.cast<cplx>();
  m.R = (t1R - i4rw2 * d1.R) * Matrix2cd::Identity() + (i4rw2 * f2R) * ddt.cast<cplx>();
  return m;
}

inline const Matrix2d& quarter_rotation() {
  static const Matrix2d A = (Matrix2d() << 0.0, -1.0, 1.0, 0.0).finished();
  return A;
}

// D1(r) off the diagonal, straight from Hankel functions.
inline cplx d1_direct(double ks, double kp, double r) {
  return (ks * hankel1(1, ks * r) - kp * hankel1(1, kp * r)) / r;
}

}  // namespace detail

inline KernelSplit weak_kernel_split(const ElasticMedium& med, const ArcGeometry& arc_i,
                                     const ArcGeometry& arc_j) {
  KernelSplit ks;
  ks.same_arc = (&arc_i == &arc_j);
  if (!ks.same_arc) {
    ks.J = [](double, double) { return Matrix2cd::Zero().eval(); };
    ks.R = [med, ai = arc_i, aj = arc_j](double s, double t) {
      return elastic_fundamental(med, ai.point(s), aj.point(t));
    };
    return ks;
  }
  ks.J = [med, a = arc_i](double s, double t) {
    return detail::elastic_split_at(med, detail::chord(a, s, t)).J;
  };
  ks.R = [med, a = arc_i](double s, double t) {
    return detail::elastic_split_at(med, detail::chord(a, s, t)).R;
  };
  return ks;
}

// The Maue quartet:
//   G1 = 4 mu^2 [A E A + mu^{-1} gamma_{ks} I]
//   G2 = -2 mu A grad_y[gamma_{ks} - gamma_{kp}] nu_y^T
//      = -(mu i/2) (s-t) D1(r) (A D) nu_y^T
//   G3 = -2 mu nu_x grad_x^T[gamma_{ks} - gamma_{kp}] A
//      = +(mu i/2) (s-t) D1(r) nu_x D^T A
//   G4 = -rho w^2 [gamma_{ks}(2 nu_x nu_y^T - nu_y nu_x^T - (nu_x.nu_y) I)
//                  - gamma_{kp} nu_x nu_y^T]
struct HyperKernelSet {
  KernelSplit G1, G2, G3, G4;
  // Arclength Jacobian placement when the bilinear form is pulled back to
  // parameter space: index 0..3 <-> G1..G4.  G1 pairs two arclength
  // derivatives (no Jacobians); G2 keeps the trial-side |r'(t)|; G3 the
  // test-side |r'(s)|; G4 both.
  static constexpr bool jacobian_s[4] = {false, false, true, true};
  static constexpr bool jacobian_t[4] = {false, true, false, true};
};

inline HyperKernelSet hyper_kernel_set(const ElasticMedium& med, const ArcGeometry& arc_i,
                                       const ArcGeometry& arc_j) {
  HyperKernelSet set;
  const bool same = (&arc_i == &arc_j);
  const double ks = med.kappa_s(), kp = med.kappa_p();
  const double mu = med.mu, rw2 = med.rho * med.omega * med.omega;
  const Matrix2d& A = detail::quarter_rotation();

  const auto zero = [](double, double) { return Matrix2cd::Zero().eval(); };
  set.G1.same_arc = set.G2.same_arc = set.G3.same_arc = set.G4.same_arc = same;

  if (!same) {
    set.G1.J = set.G2.J = set.G3.J = set.G4.J = zero;
    set.G1.R = [med, mu, ks, ai = arc_i, aj = arc_j, &A](double s, double t) {
      const Vector2d x = ai.point(s), y = aj.point(t);
      Matrix2cd G = A.cast<cplx>() * elastic_fundamental(med, x, y) * A.cast<cplx>();
      G += (helmholtz_fs(ks, x, y) / mu) * Matrix2cd::Identity();
      return (4.0 * mu * mu * G).eval();
    };
    set.G2.R = [mu, ks, kp, ai = arc_i, aj = arc_j, &A](double s, double t) {
      const Vector2d x = ai.point(s), y = aj.point(t);
      const Vector2d ny = aj.eval(t).normal;
      const cplx d1 = detail::d1_direct(ks, kp, (x - y).norm());
      return (cplx(0.0, -0.5 * mu) * d1 * ((A * (x - y)) * ny.transpose()).cast<cplx>()).eval();
    };
    set.G3.R = [mu, ks, kp, ai = arc_i, aj = arc_j, &A](double s, double t) {
      const Vector2d x = ai.point(s), y = aj.point(t);
      const Vector2d nx = ai.eval(s).normal;
      const cplx d1 = detail::d1_direct(ks, kp, (x - y).norm());
      return (cplx(0.0, 0.5 * mu) * d1 * (nx * ((x - y).transpose() * A)).cast<cplx>()).eval();
    };
    set.G4.R = [rw2, ks, kp, ai = arc_i, aj = arc_j](double s, double t) {
      const Vector2d x = ai.point(s), y = aj.point(t);
      const Vector2d nx = ai.eval(s).normal, ny = aj.eval(t).normal;
      const Matrix2d M1 = 2.0 * nx * ny.transpose() - ny * nx.transpose() -
                          nx.dot(ny) * Matrix2d::Identity();
      const Matrix2d M2 = nx * ny.transpose();
      return (-rw2 * (helmholtz_fs(ks, x, y) * M1.cast<cplx>() -
                      helmholtz_fs(kp, x, y) * M2.cast<cplx>()))
          .eval();
    };
    return set;
  }

  // same arc: build each part from the pole-free splits
  set.G1.J = [med, mu, ks, a = arc_i, &A](double s, double t) {
    const auto c = detail::chord(a, s, t);
    const auto E = detail::elastic_split_at(med, c);
    const auto g = detail::gamma_split_at(ks, c.rr, std::log(c.q));
    Matrix2cd G = A.cast<cplx>() * E.J * A.cast<cplx>() + (g.J / mu) * Matrix2cd::Identity();
    return (4.0 * mu * mu * G).eval();
  };
  set.G1.R = [med, mu, ks, a = arc_i, &A](double s, double t) {
    const auto c = detail::chord(a, s, t);
    const auto E = detail::elastic_split_at(med, c);
    const auto g = detail::gamma_split_at(ks, c.rr, std::log(c.q));
    Matrix2cd G = A.cast<cplx>() * E.R * A.cast<cplx>() + (g.R / mu) * Matrix2cd::Identity();
    return (4.0 * mu * mu * G).eval();
  };

  const auto g2_part = [mu, ks, kp, a = arc_i, &A](double s, double t, bool want_J) {
    const auto c = detail::chord(a, s, t);
    const auto d1 = detail::d1_split_at(ks, kp, c.rr, std::log(c.q));
    const Vector2d ny = a.eval(t).normal;
    const cplx scal = cplx(0.0, -0.5 * mu) * c.dt * (want_J ? d1.J : d1.R);
    return (scal * ((A * c.D) * ny.transpose()).cast<cplx>()).eval();
  };
  set.G2.J = [g2_part](double s, double t) { return g2_part(s, t, true); };
  set.G2.R = [g2_part](double s, double t) { return g2_part(s, t, false); };

  const auto g3_part = [mu, ks, kp, a = arc_i, &A](double s, double t, bool want_J) {
    const auto c = detail::chord(a, s, t);
    const auto d1 = detail::d1_split_at(ks, kp, c.rr, std::log(c.q));
    const Vector2d nx = a.eval(s).normal;
    const cplx scal = cplx(0.0, 0.5 * mu) * c.dt * (want_J ? d1.J : d1.R);
    return (scal * (nx * (c.D.transpose() * A)).cast<cplx>()).eval();
  };
  set.G3.J = [g3_part](double s, double t) { return g3_part(s, t, true); };
  set.G3.R = [g3_part](double s, double t) { return g3_part(s, t, false); };

  const auto g4_part = [rw2, ks, kp, a = arc_i](double s, double t, bool want_J) {
    const auto c = detail::chord(a, s, t);
    const auto gs = detail::gamma_split_at(ks, c.rr, std::log(c.q));
    const auto gp = detail::gamma_split_at(kp, c.rr, std::log(c.q));
    const Vector2d nx = a.eval(s).normal, ny = a.eval(t).normal;
    const Matrix2d M1 =
        2.0 * nx * ny.transpose() - ny * nx.transpose() - nx.dot(ny) * Matrix2d::Identity();
    const Matrix2d M2 = nx * ny.transpose();
    const cplx vs = want_J ? gs.J : gs.R;
    const cplx vp = want_J ? gp.J : gp.R;
    return (-rw2 * (vs * M1.cast<cplx>() - vp * M2.cast<cplx>())).eval();
  };
  set.G4.J = [g4_part](double s, double t) { return g4_part(s, t, true); };
  set.G4.R = [g4_part](double s, double t) { return g4_part(s, t, false); };

  return set;
}

}  // namespace arcbem

#endif  // ARCBEM_KERNELS_HPP
