#ifndef ARCBEM_SPECIAL_FUNCTIONS_HPP
#define ARCBEM_SPECIAL_FUNCTIONS_HPP

// Bessel/Hankel evaluation (orders 0..2) and the explicit separation of each
// Hankel term into "analytic + (2i/pi) log(z) * J_n(z)".  The pole-free
// combinations hankel_g1/hankel_g2 are the building blocks for the elastic
// kernel splits, where the 1/z^2 poles cancel between the s- and p-wave
// terms.

#include <cmath>
#include <complex>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include "arcbem/chebyshev.hpp"  // cplx, pi

namespace arcbem {

inline constexpr double euler_gamma = 0.57721566490153286061;

namespace detail {

inline void disable_gsl_abort() {
  static const bool once = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)once;
}

// psi(k+1) = -gamma + H_k
inline double digamma_int(int kp1) {
  double h = 0.0;
  for (int j = 1; j < kp1; ++j) h += 1.0 / j;
  return -euler_gamma + h;
}

}  // namespace detail

inline double bessel_j(int order, double x) {
  detail::disable_gsl_abort();
  if (order < 0 || order > 2) throw std::invalid_argument("bessel_j: order must be 0, 1 or 2");
  if (x < 0.0) throw std::domain_error("bessel_j: negative argument");
  if (x == 0.0) return order == 0 ? 1.0 : 0.0;
  switch (order) {
    case 0: return gsl_sf_bessel_J0(x);
    case 1: return gsl_sf_bessel_J1(x);
    default: return gsl_sf_bessel_Jn(2, x);
  }
}

inline double bessel_y(int order, double x) {
  detail::disable_gsl_abort();
  if (order < 0 || order > 2) throw std::invalid_argument("bessel_y: order must be 0, 1 or 2");
  if (x <= 0.0) throw std::domain_error("bessel_y: argument must be positive");
  switch (order) {
    case 0: return gsl_sf_bessel_Y0(x);
    case 1: return gsl_sf_bessel_Y1(x);
    default: return gsl_sf_bessel_Yn(2, x);
  }
}

inline cplx hankel1(int order, double x) {
  return cplx(bessel_j(order, x), bessel_y(order, x));
}

// J_1(z)/z, entire and even.
inline double j1_over_z(double z) {
  if (z < 0.5) {
    double term = 0.5, sum = 0.0;
    const double q = 0.25 * z * z;
    for (int k = 0;; ++k) {
      sum += term;
      term *= -q / ((k + 1.0) * (k + 2.0));
      if (std::abs(term) < 1e-18) break;
    }
    return sum;
  }
  return bessel_j(1, z) / z;
}

namespace detail {

constexpr double series_switch = 2.0;

}  // namespace detail

// A_0(z) = H_0^{(1)}(z) - (2i/pi) log(z) J_0(z); entire, A_0(0) = 1 + (2i/pi)(gamma - log 2).
inline cplx hankel_a0(double z) {
  if (z >= detail::series_switch)
    return hankel1(0, z) - cplx(0.0, 2.0 / pi) * std::log(z) * bessel_j(0, z);
  // Y_0 = (2/pi)(log(z/2)+gamma) J_0 + (2/pi) sum_{k>=1} (-1)^{k+1} H_k (z/2)^{2k} / (k!)^2
  const double q = 0.25 * z * z;
  double j0 = 1.0, term = 1.0, corr = 0.0, hk = 0.0;
  for (int k = 1; k <= 40; ++k) {
    term *= -q / (k * (double)k);
    j0 += term;
    hk += 1.0 / k;
    corr += -term * hk;  // (-1)^{k+1} (z/2)^{2k}/(k!)^2 * H_k
    if (std::abs(term) < 1e-18) break;
  }
  const double yreg = (2.0 / pi) * ((euler_gamma - std::log(2.0)) * j0 + corr);
  return cplx(j0, yreg);
}

// g_1(z) = A_1(z)/z + (2i/pi)/z^2 with A_1 = H_1 - (2i/pi) log(z) J_1; entire, even.
inline cplx hankel_g1(double z) {
  if (z >= detail::series_switch) {
    const double j1 = bessel_j(1, z);
    const cplx a1 = hankel1(1, z) - cplx(0.0, 2.0 / pi) * std::log(z) * j1;
    return a1 / z + cplx(0.0, 2.0 / pi) / (z * z);
  }
  // g_1 = (1 - (2i/pi) log 2) J_1(z)/z
  //       - (i/(2 pi)) sum_k (-1)^k [psi(k+1)+psi(k+2)] (z/2)^{2k} / (k!(k+1)!)
  const double q = 0.25 * z * z;
  double term = 1.0;  // (z/2)^{2k} / (k!(k+1)!)  at k=0
  double s_im = 0.0;
  for (int k = 0; k <= 40; ++k) {
    s_im += term * (detail::digamma_int(k + 1) + detail::digamma_int(k + 2));
    term *= -q / ((k + 1.0) * (k + 2.0));
    if (std::abs(term) < 1e-18) break;
  }
  const double joz = j1_over_z(z);
  return (cplx(1.0, 0.0) - cplx(0.0, 2.0 / pi) * std::log(2.0)) * joz -
         cplx(0.0, 1.0 / (2.0 * pi)) * s_im;
}

// g_2(z) = A_2(z) + (4i/pi)/z^2; entire, g_2(0) = -i/pi.
inline cplx hankel_g2(double z) {
  if (z >= detail::series_switch) {
    const double j2 = bessel_j(2, z);
    const cplx a2 = hankel1(2, z) - cplx(0.0, 2.0 / pi) * std::log(z) * j2;
    return a2 + cplx(0.0, 4.0 / pi) / (z * z);
  }
  // J_2(z) = sum_k (-1)^k (z/2)^{2k+2} / (k!(k+2)!)
  // S_2(z) = sum_k (-1)^k [psi(k+1)+psi(k+3)] (z/2)^{2k+2} / (k!(k+2)!)
  const double q = 0.25 * z * z;
  double term = q / 2.0;  // (z/2)^2 / (0! 2!)
  double j2 = 0.0, s2 = 0.0;
  for (int k = 0; k <= 40; ++k) {
    j2 += term;
    s2 += term * (detail::digamma_int(k + 1) + detail::digamma_int(k + 3));
    term *= -q / ((k + 1.0) * (k + 3.0));
    if (std::abs(term) < 1e-18) break;
  }
  const double yreg_no_pole = -(2.0 / pi) * std::log(2.0) * j2 - 1.0 / pi - s2 / pi;
  return cplx(j2, yreg_no_pole);
}

struct LogSplit {
  cplx analytic;     // pole-bearing for orders 1,2
  double log_coeff;  // J_order(x): H = analytic + (2i/pi) log(x) log_coeff
};

inline LogSplit hankel1_log_split(int order, double x) {
  if (order < 0 || order > 2) throw std::invalid_argument("hankel1_log_split: order must be 0..2");
  if (x < 0.0) throw std::domain_error("hankel1_log_split: negative argument");
  if (x == 0.0) {
    if (order != 0)
      throw std::domain_error("hankel1_log_split: analytic part has a pole at 0 for orders 1,2");
    return {cplx(1.0, (2.0 / pi) * (euler_gamma - std::log(2.0))), 1.0};
  }
  switch (order) {
    case 0: return {hankel_a0(x), bessel_j(0, x)};
    case 1: return {x * hankel_g1(x) - cplx(0.0, 2.0 / pi) / x, bessel_j(1, x)};
    default: return {hankel_g2(x) - cplx(0.0, 4.0 / pi) / (x * x), bessel_j(2, x)};
  }
}

}  // namespace arcbem

#endif  // ARCBEM_SPECIAL_FUNCTIONS_HPP
