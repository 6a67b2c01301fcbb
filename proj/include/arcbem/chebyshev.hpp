#ifndef ARCBEM_CHEBYSHEV_HPP
#define ARCBEM_CHEBYSHEV_HPP

// Chebyshev expansions: interpolation grids, fast forward transforms,
// adaptive truncation, and the closed-form log-kernel coefficient
// sequences used by the singular Galerkin integrals.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>
#include <Eigen/Dense>

namespace arcbem {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

enum class ChebKind { FirstKind, SecondKind };

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Gauss-Chebyshev nodes, returned in descending order.
// FirstKind: zeros of T_n, cos((2k+1)pi/(2n)); SecondKind: zeros of U_n.
inline std::vector<double> cheb_nodes(int n, ChebKind kind = ChebKind::FirstKind) {
  if (n < 1) throw std::invalid_argument("cheb_nodes: n must be >= 1");
  std::vector<double> x(n);
  if (kind == ChebKind::FirstKind) {
    for (int k = 0; k < n; ++k) x[k] = std::cos((2 * k + 1) * pi / (2.0 * n));
  } else {
    for (int k = 0; k < n; ++k) x[k] = std::cos((k + 1) * pi / (n + 1.0));
  }
  return x;
}

namespace detail {

// DCT-II of a real vector through FFTW; plan creation is serialized.
inline void dct2_inplace(std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  if (n < 8) {  // direct sum, avoids plan overhead for the tiny cases
    std::vector<double> out(n);
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += v[k] * std::cos(pi * l * (k + 0.5) / n);
      out[l] = 2.0 * s;
    }
    v = std::move(out);
    return;
  }
  static std::mutex plan_mutex;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_r2r_1d(n, v.data(), v.data(), FFTW_REDFT10, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
}

}  // namespace detail

struct ChebSeries1D {
  ChebKind kind = ChebKind::FirstKind;
  std::vector<cplx> coeffs;  // coeffs[l] multiplies T_l (or U_l)

  int length() const { return static_cast<int>(coeffs.size()); }
};

// Interpolation coefficients from samples at cheb_nodes(n, FirstKind):
// returns h such that sum_l h[l] T_l matches the samples at the nodes.
inline ChebSeries1D forward_transform(const std::vector<cplx>& samples) {
  const int n = static_cast<int>(samples.size());
  if (n < 1) throw std::invalid_argument("forward_transform: empty sample vector");
  std::vector<double> re(n), im(n);
  for (int k = 0; k < n; ++k) {
    re[k] = samples[k].real();
    im[k] = samples[k].imag();
  }
  detail::dct2_inplace(re);
  detail::dct2_inplace(im);
  ChebSeries1D out;
  out.kind = ChebKind::FirstKind;
  out.coeffs.resize(n);
  for (int l = 0; l < n; ++l) {
    const double scale = (l == 0) ? 1.0 / (2.0 * n) : 1.0 / n;
    out.coeffs[l] = cplx(re[l] * scale, im[l] * scale);
  }
  return out;
}

// Clenshaw recurrence, stable on [-1,1].
inline cplx eval_series(const ChebSeries1D& s, double t) {
  if (std::abs(t) > 1.0 + 1e-14) throw std::domain_error("eval_series: |t| > 1");
  cplx b1 = 0.0, b2 = 0.0;
  for (int l = s.length() - 1; l >= 1; --l) {
    cplx b0 = s.coeffs[l] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  if (s.coeffs.empty()) return 0.0;
  if (s.kind == ChebKind::FirstKind) return s.coeffs[0] + t * b1 - b2;
  return s.coeffs[0] + 2.0 * t * b1 - b2;  // U_0 = 1, U_1 = 2t
}

namespace detail {

inline std::vector<cplx> sample_function(const std::function<cplx(double)>& f, int n) {
  auto nodes = cheb_nodes(n, ChebKind::FirstKind);
  std::vector<cplx> samples(n);
  for (int k = 0; k < n; ++k) samples[k] = f(nodes[k]);
  return samples;
}

inline bool tail_small(const ChebSeries1D& s, double tol) {
  const int n = s.length();
  return n >= 2 && std::abs(s.coeffs[n - 1]) <= tol && std::abs(s.coeffs[n - 2]) <= tol;
}

}  // namespace detail

// Two-stage adaptive truncation: double the candidate length until the last
// two coefficients fall below tol, then bisect for the minimal admissible
// length.  Candidate N_c means N_c+1 coefficients from N_c+1 samples.  The
// tail condition is required at two adjacent grid sizes: a function can alias
// to zero on a single unlucky grid, and the shifted nodes of the neighboring
// size break the alias.
inline ChebSeries1D adaptive_expand(const std::function<cplx(double)>& f, double tol,
                                    int hard_cap = 1 << 16) {
  if (!(tol > 0.0)) throw std::invalid_argument("adaptive_expand: tol must be > 0");
  ChebSeries1D candidate;
  auto admissible = [&](int nc) {
    candidate = forward_transform(detail::sample_function(f, nc + 1));
    if (!detail::tail_small(candidate, tol)) return false;
    return detail::tail_small(forward_transform(detail::sample_function(f, nc + 2)), tol);
  };
  int nc = 1;
  while (!admissible(nc)) {
    if (nc >= hard_cap) {
      const int n = candidate.length();
      const double tail = std::max(std::abs(candidate.coeffs[n - 1]),
                                   std::abs(candidate.coeffs[n - 2]));
      throw NonConvergence("adaptive_expand: length cap " + std::to_string(hard_cap) +
                           " reached, tail magnitude " + std::to_string(tail));
    }
    nc *= 2;
  }
  // minimal admissible N_c in (nc/2, nc]
  int lo = nc / 2, hi = nc;
  ChebSeries1D best = candidate;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (admissible(mid)) {
      hi = mid;
      best = candidate;
    } else {
      lo = mid;
    }
  }
  return best;
}

// Bivariate coefficients: coeffs(p,q) multiplies T_p(s) T_q(t).  Entries with
// magnitude < tol are stored as exact zeros; the reconstruction error on the
// sample grid is bounded by C*tol with C the number of dropped entries (in
// practice a small multiple of tol because the dropped tail decays
// geometrically).
struct ChebSeries2D {
  Eigen::MatrixXcd coeffs;
  double tol = 0.0;
  std::size_t nnz = 0;

  int size() const { return static_cast<int>(coeffs.rows()); }
  cplx coeff(int p, int q) const {
    if (p < 0 || q < 0 || p >= coeffs.rows() || q >= coeffs.cols()) return 0.0;
    return coeffs(p, q);
  }
  cplx eval(double s, double t) const {
    // row-wise Clenshaw in t, then in s
    const int n = size();
    ChebSeries1D in_s;
    in_s.coeffs.resize(n);
    for (int p = 0; p < n; ++p) {
      ChebSeries1D row;
      row.coeffs.assign(coeffs.row(p).begin(), coeffs.row(p).end());
      in_s.coeffs[p] = eval_series(row, t);
    }
    return eval_series(in_s, s);
  }
};

// Truncation length from the 1-D slices g(.,0) and g(0,.), then a full tensor
// transform.  A single t=0 slice is available via symmetric_slices=false.
inline ChebSeries2D adaptive_expand_2d(const std::function<cplx(double, double)>& g,
                                       double tol, bool symmetric_slices = true,
                                       int hard_cap = 1 << 16) {
  if (!(tol > 0.0)) throw std::invalid_argument("adaptive_expand_2d: tol must be > 0");
  ChebSeries1D slice_s = adaptive_expand([&](double u) { return g(u, 0.0); }, tol, hard_cap);
  int n = slice_s.length();
  if (symmetric_slices) {
    ChebSeries1D slice_t = adaptive_expand([&](double u) { return g(0.0, u); }, tol, hard_cap);
    n = std::max(n, slice_t.length());
  }
  auto nodes = cheb_nodes(n, ChebKind::FirstKind);
  Eigen::MatrixXcd grid(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) grid(i, j) = g(nodes[i], nodes[j]);
  // transform along t (rows), then along s (columns)
  Eigen::MatrixXcd half(n, n);
  for (int i = 0; i < n; ++i) {
    std::vector<cplx> row(grid.row(i).begin(), grid.row(i).end());
    auto c = forward_transform(row);
    for (int q = 0; q < n; ++q) half(i, q) = c.coeffs[q];
  }
  ChebSeries2D out;
  out.coeffs.resize(n, n);
  out.tol = tol;
  for (int q = 0; q < n; ++q) {
    std::vector<cplx> col(n);
    for (int i = 0; i < n; ++i) col[i] = half(i, q);
    auto c = forward_transform(col);
    for (int p = 0; p < n; ++p) out.coeffs(p, q) = c.coeffs[p];
  }
  out.nnz = 0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (std::abs(out.coeffs(p, q)) < tol)
        out.coeffs(p, q) = 0.0;
      else
        ++out.nnz;
    }
  return out;
}

// log|s-t| = sum_n c_n T_n(s) T_n(t) on [-1,1]^2.
struct LogKernelCoeffs {
  // c_0 = -log 2, c_n = -2/n
  static double expansion_c(int n) {
    if (n < 0) throw std::invalid_argument("expansion_c: negative index");
    return n == 0 ? -std::log(2.0) : -2.0 / n;
  }
  // d_0 = -pi^2 log 2, d_n = -pi^2/(2n): the weighted Galerkin diagonal
  static double galerkin_d(int n) {
    if (n < 0) throw std::invalid_argument("galerkin_d: negative index");
    return n == 0 ? -pi * pi * std::log(2.0) : -pi * pi / (2.0 * n);
  }
};

// Integral of log|s-t| against w^{-1}T_l(t) w^{-1}T_l(s) over the square.
inline double log_galerkin_diagonal(int l) { return LogKernelCoeffs::galerkin_d(l); }

// Basis identities used to reduce every bilinear factor to w^{-1}T form.
struct IndexWeight {
  int index;
  double weight;
};

// w U_l = 1/2 w^{-1} (T_l - T_{l+2})
inline std::array<IndexWeight, 2> uU_to_T(int l) {
  if (l < 0) throw std::invalid_argument("uU_to_T: negative index");
  return {IndexWeight{l, 0.5}, IndexWeight{l + 2, -0.5}};
}

// d/dt (w U_l) = -(l+1) w^{-1} T_{l+1}
inline IndexWeight duU_to_T(int l) {
  if (l < 0) throw std::invalid_argument("duU_to_T: negative index");
  return IndexWeight{l + 1, -(l + 1.0)};
}

// T_a T_b = 1/2 (T_{a+b} + T_{|a-b|})
inline std::array<IndexWeight, 2> T_product(int a, int b) {
  if (a < 0 || b < 0) throw std::invalid_argument("T_product: negative index");
  return {IndexWeight{a + b, 0.5}, IndexWeight{std::abs(a - b), 0.5}};
}

// int_{-1}^{1} T_l^2 w^{-1} dt: pi for l = 0, pi/2 otherwise.  Centralized so
// the quadrature-weight constants appear exactly once.
inline double cheb_orthogonality_weight(int l) { return l == 0 ? pi : pi / 2.0; }

}  // namespace arcbem

#endif  // ARCBEM_CHEBYSHEV_HPP
