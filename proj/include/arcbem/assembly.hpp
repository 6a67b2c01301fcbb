#ifndef ARCBEM_ASSEMBLY_HPP
#define ARCBEM_ASSEMBLY_HPP

// Galerkin assembly: Chebyshev expansion of the split kernels, closed-form
// singular log integrals, block matrices, right-hand sides, and the
// tolerance-driven cross-block compression.
//
// Index layout (fixed): global row = arc_index * 2(N+1) + 2*mode + component
// (mode-major, component-minor).  Row indices carry the test function
// (s variable), columns the trial function (t variable).

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arcbem/chebyshev.hpp"
#include "arcbem/geometry.hpp"
#include "arcbem/kernels.hpp"

namespace arcbem {

enum class ProblemKind { Dirichlet, Neumann };

struct IncidentWave {
  double alpha = 0.0;  // incidence angle in [0, 2pi)
  Vector2d direction() const { return Vector2d(std::cos(alpha), std::sin(alpha)); }
};

struct GalerkinSystem {
  ProblemKind problem = ProblemKind::Dirichlet;
  int N = 0;
  int arc_count = 0;
  double tol = 0.0;
  double nnz_fraction = 1.0;
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd rhs;

  int block_dim() const { return 2 * (N + 1); }
  int index(int arc, int mode, int comp) const {
    return arc * block_dim() + 2 * mode + comp;
  }
};

using MatrixKernelFn = std::function<Matrix2cd(double, double)>;

namespace detail {

// Minimal admissible sample count for a matrix-valued slice, mirroring
// adaptive_expand's two-stage search with the tail condition required on all
// four components and on two adjacent grids.
inline int matrix_slice_length(const std::function<Matrix2cd(double)>& f, double tol,
                               int hard_cap) {
  auto tails_ok = [&](int n) {
    auto nodes = cheb_nodes(n, ChebKind::FirstKind);
    std::array<std::vector<cplx>, 4> samples;
    for (auto& s : samples) s.resize(n);
    for (int k = 0; k < n; ++k) {
      const Matrix2cd M = f(nodes[k]);
      for (int q = 0; q < 2; ++q)
        for (int p = 0; p < 2; ++p) samples[2 * q + p][k] = M(q, p);
    }
    for (const auto& s : samples)
      if (!tail_small(forward_transform(s), tol)) return false;
    return true;
  };
  auto admissible = [&](int nc) { return tails_ok(nc + 1) && tails_ok(nc + 2); };
  int nc = 1;
  while (!admissible(nc)) {
    if (nc >= hard_cap)
      throw NonConvergence("matrix_slice_length: cap " + std::to_string(hard_cap) + " reached");
    nc *= 2;
  }
  int lo = nc / 2, hi = nc;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (admissible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi + 1;
}

}  // namespace detail

// Componentwise 2-D Chebyshev expansion of a 2x2 kernel, sharing one sample
// grid across the four components.  comp[q][p] expands K(q,p).
struct MatrixKernelExpansion {
  std::array<std::array<ChebSeries2D, 2>, 2> comp;
  int size = 0;
};

inline MatrixKernelExpansion expand_matrix_kernel_2d(const MatrixKernelFn& K, double tol,
                                                     int hard_cap = 1 << 16) {
  if (!(tol > 0.0)) throw std::invalid_argument("expand_matrix_kernel_2d: tol must be > 0");
  // initial degree from several slices per axis: a single center slice can
  // badly underestimate the oscillation of non-uniformly parametrized arcs
  int n = 1;
  for (double c : {-0.95, -0.5, 0.0, 0.5, 0.95}) {
    n = std::max(n,
                 detail::matrix_slice_length([&](double u) { return K(u, c); }, tol, hard_cap));
    n = std::max(n,
                 detail::matrix_slice_length([&](double u) { return K(c, u); }, tol, hard_cap));
  }

  MatrixKernelExpansion out;
  for (;;) {
    const auto nodes = cheb_nodes(n, ChebKind::FirstKind);
    std::array<std::array<Eigen::MatrixXcd, 2>, 2> grid;
    for (int q = 0; q < 2; ++q)
      for (int p = 0; p < 2; ++p) grid[q][p].resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Matrix2cd M = K(nodes[i], nodes[j]);
        for (int q = 0; q < 2; ++q)
          for (int p = 0; p < 2; ++p) grid[q][p](i, j) = M(q, p);
      }

    out.size = n;
    double band = 0.0;  // largest coefficient in the trailing rows/columns
    for (int q = 0; q < 2; ++q)
      for (int p = 0; p < 2; ++p) {
        Eigen::MatrixXcd half(n, n);
        for (int i = 0; i < n; ++i) {
          std::vector<cplx> row(grid[q][p].row(i).begin(), grid[q][p].row(i).end());
          const auto c = forward_transform(row);
          for (int b = 0; b < n; ++b) half(i, b) = c.coeffs[b];
        }
        ChebSeries2D& series = out.comp[q][p];
        series.coeffs.resize(n, n);
        series.tol = tol;
        series.nnz = 0;
        for (int b = 0; b < n; ++b) {
          std::vector<cplx> col(n);
          for (int i = 0; i < n; ++i) col[i] = half(i, b);
          const auto c = forward_transform(col);
          for (int a = 0; a < n; ++a) series.coeffs(a, b) = c.coeffs[a];
        }
        const int edge = std::max(1, n / 16);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            const double mag = std::abs(series.coeffs(a, b));
            if (a >= n - edge || b >= n - edge) band = std::max(band, mag);
            if (mag < tol)
              series.coeffs(a, b) = 0.0;
            else
              ++series.nnz;
          }
      }
    // direct anti-aliasing check on the 2-D expansion itself: the trailing
    // band must have converged below the tolerance
    if (band <= tol || n <= 4) break;
    if (2 * n > hard_cap)
      throw NonConvergence("expand_matrix_kernel_2d: cap " + std::to_string(hard_cap) +
                           " reached");
    n *= 2;
  }
  return out;
}

namespace detail {

// Weights of T_a in the map a -> <T_n T_a, T_l>_{w^{-1}}.  The product rule
// T_n T_a = (T_{n+a} + T_{|n-a|})/2 fires for a = l-n, a = n-l and a = n+l;
// coincidences (n = l, n = 0) are handled by listing every firing condition
// separately so overlapping entries accumulate.
struct PairingWeights {
  std::array<IndexWeight, 3> entries;
  int count = 0;
};

inline PairingWeights log_pairing_weights(int l, int n) {
  PairingWeights w;
  const double half = 0.5 * cheb_orthogonality_weight(l);
  if (l - n >= 0) w.entries[w.count++] = {l - n, half};
  w.entries[w.count++] = {n + l, half};
  if (l >= 1 && n - l >= 0) w.entries[w.count++] = {n - l, half};
  return w;
}

}  // namespace detail

// I^S(J; l, m) = sum over the log expansion log|s-t| = sum_n c_n T_n(s)T_n(t)
// of the fully orthogonal pairings against w^{-1}T_l (test, s) and
// w^{-1}T_m (trial, t).  With J == 1 this reproduces log_galerkin_diagonal.
inline cplx singular_log_contribution(const ChebSeries2D& J, int l, int m) {
  const int nc = J.size();
  const int n_max = nc + std::max(l, m);
  cplx acc = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const double cn = LogKernelCoeffs::expansion_c(n);
    const auto ws = detail::log_pairing_weights(l, n);
    const auto wt = detail::log_pairing_weights(m, n);
    cplx inner = 0.0;
    bool any = false;
    for (int is = 0; is < ws.count; ++is) {
      if (ws.entries[is].index >= nc) continue;
      for (int it = 0; it < wt.count; ++it) {
        if (wt.entries[it].index >= nc) continue;
        const cplx c = J.coeff(ws.entries[is].index, wt.entries[it].index);
        if (c != 0.0) {
          inner += ws.entries[is].weight * wt.entries[it].weight * c;
          any = true;
        }
      }
    }
    if (any) acc += cn * inner;
  }
  return acc;
}

// Regular + singular Galerkin integral of one split kernel component against
// w^{-1}T_a (test) x w^{-1}T_b (trial).
inline cplx galerkin_integral(const ChebSeries2D& R, const ChebSeries2D* J, int a, int b) {
  cplx v = cheb_orthogonality_weight(a) * cheb_orthogonality_weight(b) * R.coeff(a, b);
  if (J) v += singular_log_contribution(*J, a, b);
  return v;
}

inline Eigen::MatrixXcd assemble_weak_block(const ElasticMedium& med, const ArcGeometry& arc_i,
                                            const ArcGeometry& arc_j, int N, double tol) {
  if (N < 0) throw std::invalid_argument("assemble_weak_block: N must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("assemble_weak_block: tol must be > 0");
  const KernelSplit split = weak_kernel_split(med, arc_i, arc_j);
  const auto R = expand_matrix_kernel_2d(split.R, tol);
  MatrixKernelExpansion Jexp;
  if (split.same_arc) Jexp = expand_matrix_kernel_2d(split.J, tol);

  const int dim = 2 * (N + 1);
  Eigen::MatrixXcd B(dim, dim);
  for (int l = 0; l <= N; ++l)
    for (int q = 0; q < 2; ++q)
      for (int m = 0; m <= N; ++m)
        for (int p = 0; p < 2; ++p) {
          cplx v = galerkin_integral(R.comp[q][p],
                                     split.same_arc ? &Jexp.comp[q][p] : nullptr, l, m);
          if (!split.same_arc && std::abs(v) < tol) v = 0.0;
          B(2 * l + q, 2 * m + p) = v;
        }
  return B;
}

namespace detail {

// Fold the pulled-back arclength Jacobians into a split kernel before
// expansion, per the HyperKernelSet placement flags.
inline MatrixKernelFn fold_jacobians(std::function<Matrix2cd(double, double)> f,
                                     const ArcGeometry& arc_i, const ArcGeometry& arc_j,
                                     bool jac_s, bool jac_t) {
  return [f = std::move(f), &arc_i, &arc_j, jac_s, jac_t](double s, double t) {
    Matrix2cd v = f(s, t);
    if (jac_s) v *= arc_i.eval(s).jacobian;
    if (jac_t) v *= arc_j.eval(t).jacobian;
    return v;
  };
}

}  // namespace detail

// Hyper block in the Maue form.  The operator applies d/ds_x to the G1 and
// G2 integrals; moving it onto the test function by parts (no boundary terms,
// wU vanishes at the endpoints) gives
//   <W wU_m e_p, wU_l e_q> = - II G1 chi' psi' - II G2~ chi' psi
//                            + II G3~ chi psi' + II G4~ chi psi
// which reduces, via (wU_l)' = -(l+1) w^{-1}T_{l+1} and
// wU_l = (w^{-1}T_l - w^{-1}T_{l+2})/2, to
//     - (l+1)(m+1) A1(l+1, m+1)
//     + (l+1)/2 [A2(l+1, m) - A2(l+1, m+2)]
//     - (m+1)/2 [A3(l, m+1) - A3(l+2, m+1)]
//     + 1/4 [A4(l,m) - A4(l,m+2) - A4(l+2,m) + A4(l+2,m+2)]
// with Ak the w^{-1}T x w^{-1}T Galerkin integral of Gk, Jacobians folded.
// The opposite signs on the G2/G3 terms are forced by the kernel identity
// G2_ij(s,t) = -G3_ji(t,s)^T, which makes the global matrix symmetric.
inline Eigen::MatrixXcd assemble_hyper_block(const ElasticMedium& med, const ArcGeometry& arc_i,
                                             const ArcGeometry& arc_j, int N, double tol) {
  if (N < 0) throw std::invalid_argument("assemble_hyper_block: N must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("assemble_hyper_block: tol must be > 0");
  const HyperKernelSet set = hyper_kernel_set(med, arc_i, arc_j);
  const KernelSplit* kernels[4] = {&set.G1, &set.G2, &set.G3, &set.G4};
  const bool same = set.G1.same_arc;

  // A-tables up to degree N+2 per kernel and component
  const int L = N + 2;
  std::array<std::array<std::array<Eigen::MatrixXcd, 2>, 2>, 4> A;
  for (int k = 0; k < 4; ++k) {
    const auto Rf = detail::fold_jacobians(kernels[k]->R, arc_i, arc_j,
                                           HyperKernelSet::jacobian_s[k],
                                           HyperKernelSet::jacobian_t[k]);
    const auto Rexp = expand_matrix_kernel_2d(Rf, tol);
    MatrixKernelExpansion Jexp;
    if (same) {
      const auto Jf = detail::fold_jacobians(kernels[k]->J, arc_i, arc_j,
                                             HyperKernelSet::jacobian_s[k],
                                             HyperKernelSet::jacobian_t[k]);
      Jexp = expand_matrix_kernel_2d(Jf, tol);
    }
    for (int q = 0; q < 2; ++q)
      for (int p = 0; p < 2; ++p) {
        A[k][q][p].resize(L + 1, L + 1);
        for (int a = 0; a <= L; ++a)
          for (int b = 0; b <= L; ++b)
            A[k][q][p](a, b) =
                galerkin_integral(Rexp.comp[q][p], same ? &Jexp.comp[q][p] : nullptr, a, b);
      }
  }

  const int dim = 2 * (N + 1);
  Eigen::MatrixXcd B(dim, dim);
  for (int l = 0; l <= N; ++l)
    for (int q = 0; q < 2; ++q)
      for (int m = 0; m <= N; ++m)
        for (int p = 0; p < 2; ++p) {
          const auto& A1 = A[0][q][p];
          const auto& A2 = A[1][q][p];
          const auto& A3 = A[2][q][p];
          const auto& A4 = A[3][q][p];
          cplx v = -(l + 1.0) * (m + 1.0) * A1(l + 1, m + 1);
          v += 0.5 * (l + 1.0) * (A2(l + 1, m) - A2(l + 1, m + 2));
          v -= 0.5 * (m + 1.0) * (A3(l, m + 1) - A3(l + 2, m + 1));
          v += 0.25 * (A4(l, m) - A4(l, m + 2) - A4(l + 2, m) + A4(l + 2, m + 2));
          if (!same && std::abs(v) < tol) v = 0.0;
          B(2 * l + q, 2 * m + p) = v;
        }
  return B;
}

// Plane p-wave P(x) = d e^{i kp x.d} boundary data.
//   Dirichlet: f = -P on the arc.
//   Neumann:   g = -T(d, nu)P = -i kp e^{i kp x.d} [2 mu (nu.d) d + lambda nu].
inline Vector2d plane_wave_direction(const IncidentWave& wave) { return wave.direction(); }

inline Eigen::Vector2cd dirichlet_data(const ElasticMedium& med, const IncidentWave& wave,
                                       const Vector2d& x) {
  const Vector2d d = wave.direction();
  const cplx phase = std::exp(cplx(0.0, med.kappa_p() * x.dot(d)));
  return (-phase) * d.cast<cplx>();
}

inline Eigen::Vector2cd neumann_data(const ElasticMedium& med, const IncidentWave& wave,
                                     const Vector2d& x, const Vector2d& nu) {
  const Vector2d d = wave.direction();
  const double kp = med.kappa_p();
  const cplx fac = cplx(0.0, -kp) * std::exp(cplx(0.0, kp * x.dot(d)));
  const Vector2d vec = 2.0 * med.mu * nu.dot(d) * d + med.lambda * nu;
  return fac * vec.cast<cplx>();
}

inline Eigen::VectorXcd assemble_rhs(ProblemKind problem, const Scene& scene,
                                     const IncidentWave& wave, int N, double tol = 1e-12) {
  scene.medium.validate();
  const int M = static_cast<int>(scene.arcs.size());
  const int bd = 2 * (N + 1);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(M * bd);
  for (int i = 0; i < M; ++i) {
    const ArcGeometry& arc = scene.arcs[i];
    for (int comp = 0; comp < 2; ++comp) {
      ChebSeries1D series;
      if (problem == ProblemKind::Dirichlet) {
        // the test density carries 1/|r'|, cancelling the arclength element
        series = adaptive_expand(
            [&](double t) { return dirichlet_data(scene.medium, wave, arc.point(t))[comp]; },
            tol);
        for (int l = 0; l <= N; ++l) {
          const cplx cl = l < series.length() ? series.coeffs[l] : cplx(0.0);
          rhs[i * bd + 2 * l + comp] = cheb_orthogonality_weight(l) * cl;
        }
      } else {
        // pair g.(wU_l) against the arclength element: fold |r'(t)| in
        series = adaptive_expand(
            [&](double t) {
              const auto f = arc.eval(t);
              return neumann_data(scene.medium, wave, f.point, f.normal)[comp] * f.jacobian;
            },
            tol);
        for (int l = 0; l <= N; ++l) {
          const cplx hl = l < series.length() ? series.coeffs[l] : cplx(0.0);
          const cplx hl2 = l + 2 < series.length() ? series.coeffs[l + 2] : cplx(0.0);
          rhs[i * bd + 2 * l + comp] = 0.5 * (cheb_orthogonality_weight(l) * hl -
                                              cheb_orthogonality_weight(l + 2) * hl2);
        }
      }
    }
  }
  return rhs;
}

inline GalerkinSystem assemble_system(ProblemKind problem, const Scene& scene,
                                      const IncidentWave& wave, int N, double tol,
                                      double rhs_tol = 1e-12) {
  scene.medium.validate();
  const int M = static_cast<int>(scene.arcs.size());
  if (M == 0) throw std::invalid_argument("assemble_system: empty scene");
  GalerkinSystem sys;
  sys.problem = problem;
  sys.N = N;
  sys.arc_count = M;
  sys.tol = tol;
  const int bd = sys.block_dim();
  sys.matrix.resize(M * bd, M * bd);
  std::size_t nnz = 0;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      Eigen::MatrixXcd block;
      try {
        block = (problem == ProblemKind::Dirichlet)
                    ? assemble_weak_block(scene.medium, scene.arcs[i], scene.arcs[j], N, tol)
                    : assemble_hyper_block(scene.medium, scene.arcs[i], scene.arcs[j], N, tol);
      } catch (const NonConvergence& e) {
        throw NonConvergence("block (" + std::to_string(i) + "," + std::to_string(j) +
                             "): " + e.what());
      }
      for (int r = 0; r < bd; ++r)
        for (int c = 0; c < bd; ++c)
          if (block(r, c) != 0.0) ++nnz;
      sys.matrix.block(i * bd, j * bd, bd, bd) = block;
    }
  sys.nnz_fraction =
      static_cast<double>(nnz) / (static_cast<double>(M) * bd * static_cast<double>(M) * bd);
  sys.rhs = assemble_rhs(problem, scene, wave, N, rhs_tol);
  return sys;
}

// Restriction to a smaller degree: Galerkin entries do not depend on N, so a
// system assembled once at a reference degree yields every coarser system by
// index selection.
inline GalerkinSystem restrict_system(const GalerkinSystem& sys, int N) {
  if (N > sys.N) throw std::invalid_argument("restrict_system: N exceeds source degree");
  GalerkinSystem out;
  out.problem = sys.problem;
  out.N = N;
  out.arc_count = sys.arc_count;
  out.tol = sys.tol;
  const int bd = out.block_dim();
  const int M = sys.arc_count;
  std::vector<int> sel;
  sel.reserve(M * bd);
  for (int i = 0; i < M; ++i)
    for (int l = 0; l <= N; ++l)
      for (int c = 0; c < 2; ++c) sel.push_back(sys.index(i, l, c));
  out.matrix.resize(M * bd, M * bd);
  out.rhs.resize(M * bd);
  for (int r = 0; r < M * bd; ++r) {
    out.rhs[r] = sys.rhs[sel[r]];
    for (int c = 0; c < M * bd; ++c) out.matrix(r, c) = sys.matrix(sel[r], sel[c]);
  }
  std::size_t nnz = 0;
  for (int r = 0; r < M * bd; ++r)
    for (int c = 0; c < M * bd; ++c)
      if (out.matrix(r, c) != 0.0) ++nnz;
  out.nnz_fraction = static_cast<double>(nnz) /
                     (static_cast<double>(M) * bd * static_cast<double>(M) * bd);
  return out;
}

}  // namespace arcbem

#endif  // ARCBEM_ASSEMBLY_HPP
