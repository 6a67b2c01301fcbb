#ifndef ARCBEM_SOLVER_HPP
#define ARCBEM_SOLVER_HPP

// Direct solves of the Galerkin systems, coefficient-space Sobolev norms,
// and convergence studies against overkill reference solutions.

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "arcbem/assembly.hpp"

namespace arcbem {

class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-arc coefficient vectors in the block layout (mode-major,
// component-minor).  Dirichlet coefficients expand phi = sum a w^{-1}T_l e_p,
// Neumann psi = sum b w U_l e_p.
struct DensitySolution {
  ProblemKind problem = ProblemKind::Dirichlet;
  int N = 0;
  std::vector<Eigen::VectorXcd> arc_coeffs;  // each of length 2(N+1)
  double residual = 0.0;

  cplx coeff(int arc, int mode, int comp) const {
    return arc_coeffs[arc][2 * mode + comp];
  }
};

inline DensitySolution solve(const GalerkinSystem& sys) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.matrix);
  const auto diag = lu.matrixLU().diagonal();
  double dmin = 1e300, dmax = 0.0;
  for (int i = 0; i < diag.size(); ++i) {
    const double a = std::abs(diag[i]);
    dmin = std::min(dmin, a);
    dmax = std::max(dmax, a);
  }
  if (!(dmin > 1e-14 * dmax))
    throw SingularSystem("solve: numerically singular factorization, pivot ratio " +
                         std::to_string(dmin / dmax) +
                         " (degree too low for this frequency, or invalid scene)");
  const Eigen::VectorXcd x = lu.solve(sys.rhs);

  DensitySolution sol;
  sol.problem = sys.problem;
  sol.N = sys.N;
  const int bd = sys.block_dim();
  sol.arc_coeffs.resize(sys.arc_count);
  for (int i = 0; i < sys.arc_count; ++i) sol.arc_coeffs[i] = x.segment(i * bd, bd);
  const double bnorm = sys.rhs.norm();
  sol.residual = bnorm > 0.0 ? (sys.matrix * x - sys.rhs).norm() / bnorm : 0.0;
  return sol;
}

// Coefficient-space Sobolev norm: exponent -1/2 for the Dirichlet densities
// (H^{-1/2}), +1/2 for the Neumann densities (H^{+1/2}):
//   ||.||^2 = sum_arcs sum_{l,p} (1 + l^2)^{\mp 1/2} |coef|^2.
inline double sobolev_norm(const DensitySolution& sol) {
  const double expo = sol.problem == ProblemKind::Dirichlet ? -0.5 : 0.5;
  double acc = 0.0;
  for (const auto& c : sol.arc_coeffs)
    for (int l = 0; 2 * l + 1 < c.size(); ++l) {
      const double w = std::pow(1.0 + static_cast<double>(l) * l, expo);
      acc += w * (std::norm(c[2 * l]) + std::norm(c[2 * l + 1]));
    }
  return std::sqrt(acc);
}

// Zero-padded difference of two solutions of the same problem kind.
inline DensitySolution solution_difference(const DensitySolution& a,
                                           const DensitySolution& b) {
  if (a.problem != b.problem)
    throw std::invalid_argument("solution_difference: mismatched problem kinds");
  if (a.arc_coeffs.size() != b.arc_coeffs.size())
    throw std::invalid_argument("solution_difference: mismatched arc counts");
  DensitySolution d;
  d.problem = a.problem;
  d.N = std::max(a.N, b.N);
  const int bd = 2 * (d.N + 1);
  d.arc_coeffs.resize(a.arc_coeffs.size());
  for (std::size_t i = 0; i < a.arc_coeffs.size(); ++i) {
    Eigen::VectorXcd pa = Eigen::VectorXcd::Zero(bd);
    Eigen::VectorXcd pb = Eigen::VectorXcd::Zero(bd);
    pa.head(a.arc_coeffs[i].size()) = a.arc_coeffs[i];
    pb.head(b.arc_coeffs[i].size()) = b.arc_coeffs[i];
    d.arc_coeffs[i] = pa - pb;
  }
  return d;
}

struct ConvergenceReport {
  ProblemKind problem = ProblemKind::Dirichlet;
  int N_ref = 0;
  std::vector<int> N_list;
  std::vector<double> errors;        // relative Sobolev norm vs the overkill reference
  std::vector<double> residuals;     // per-N linear solve residuals
  std::vector<double> solve_seconds; // per-N restrict+solve wall time
  std::vector<std::string> failures; // per-N failure messages ("" if ok)
  double nnz_fraction = 1.0;         // of the reference system
  double assembly_seconds = 0.0;
  double fitted_rate = 0.0;          // varrho-hat = exp(-slope) of the fit
  double fit_correlation = 0.0;      // |r| of the semilog least-squares fit
  int fit_points = 0;
};

namespace detail {

// least-squares line through (x, y); returns {slope, |correlation|}
inline std::pair<double, double> fit_line(const std::vector<double>& x,
                                          const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double corr = (sxx > 0.0 && syy > 0.0) ? std::abs(sxy) / std::sqrt(sxx * syy) : 0.0;
  return {slope, corr};
}

}  // namespace detail

// Galerkin entries do not depend on the truncation degree, so the system is
// assembled once at N_ref = max(N_list) + overkill_margin and every coarser
// system is obtained by restriction.
inline ConvergenceReport convergence_study(ProblemKind problem, const Scene& scene,
                                           const IncidentWave& wave,
                                           const std::vector<int>& N_list,
                                           int overkill_margin, double tol,
                                           double rhs_tol = 1e-12) {
  if (N_list.empty()) throw std::invalid_argument("convergence_study: empty N list");
  for (std::size_t k = 1; k < N_list.size(); ++k)
    if (N_list[k] <= N_list[k - 1])
      throw std::invalid_argument("convergence_study: N list must be ascending");
  if (overkill_margin < 40)
    throw std::invalid_argument("convergence_study: overkill margin must be >= 40");

  using clock = std::chrono::steady_clock;
  ConvergenceReport rep;
  rep.problem = problem;
  rep.N_list = N_list;
  rep.N_ref = N_list.back() + overkill_margin;

  const auto t0 = clock::now();
  const GalerkinSystem ref_sys =
      assemble_system(problem, scene, wave, rep.N_ref, tol, rhs_tol);
  rep.assembly_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  rep.nnz_fraction = ref_sys.nnz_fraction;
  const DensitySolution ref = solve(ref_sys);
  const double ref_norm = sobolev_norm(ref);
  if (!(ref_norm > 0.0))
    throw std::invalid_argument("convergence_study: reference solution has zero norm");

  for (int N : N_list) {
    const auto t1 = clock::now();
    try {
      const DensitySolution sol = solve(restrict_system(ref_sys, N));
      rep.errors.push_back(sobolev_norm(solution_difference(sol, ref)) / ref_norm);
      rep.residuals.push_back(sol.residual);
      rep.failures.emplace_back();
    } catch (const std::exception& e) {
      rep.errors.push_back(std::nan(""));
      rep.residuals.push_back(std::nan(""));
      rep.failures.emplace_back(e.what());
    }
    rep.solve_seconds.push_back(std::chrono::duration<double>(clock::now() - t1).count());
  }

  // exponential fit over the post-preasymptotic decaying range
  std::vector<double> xs, ys;
  bool in_range = false;
  for (std::size_t k = 0; k < rep.errors.size(); ++k) {
    const double e = rep.errors[k];
    if (!std::isfinite(e) || e <= 0.0) continue;
    if (!in_range && e < 1e-2) in_range = true;
    if (in_range && e > 1e-15) {
      xs.push_back(rep.N_list[k]);
      ys.push_back(std::log(e));
    }
  }
  rep.fit_points = static_cast<int>(xs.size());
  if (xs.size() >= 2) {
    const auto [slope, corr] = detail::fit_line(xs, ys);
    rep.fitted_rate = std::exp(-slope);
    rep.fit_correlation = corr;
  }
  return rep;
}

inline nlohmann::json report_to_json(const ConvergenceReport& rep) {
  nlohmann::json j;
  j["problem"] = rep.problem == ProblemKind::Dirichlet ? "dirichlet" : "neumann";
  j["N_ref"] = rep.N_ref;
  j["N"] = rep.N_list;
  j["errors"] = rep.errors;
  j["residuals"] = rep.residuals;
  j["failures"] = rep.failures;
  j["nnz_fraction"] = rep.nnz_fraction;
  j["fitted_rate"] = rep.fitted_rate;
  j["fit_correlation"] = rep.fit_correlation;
  j["fit_points"] = rep.fit_points;
  j["timings"] = {{"assembly_seconds", rep.assembly_seconds},
                  {"solve_seconds", rep.solve_seconds}};
  return j;
}

}  // namespace arcbem

#endif  // ARCBEM_SOLVER_HPP
