#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "torusgl/errors.hpp"
#include "torusgl/fields.hpp"
#include "torusgl/theta.hpp"

namespace tgl {

struct SolverConfig {
  double tol_residual = 1e-10;     // max-norm of the PDE residual
  int max_newton = 50;
  double continuation_step = 0.05; // field step for warm-started walks
  double linear_tol = 1e-12;       // relative tolerance of the inner CG solves
  int grid_n = 64;
  ThetaParams theta{};
  double h_int_min = 0.02;         // smallest internal field the solver accepts
  double degenerate_band = 1e-6;   // width of the bifurcation endpoint band
};

struct SolveDiagnostics {
  std::vector<double> residual_history;
  int newton_iterations = 0;
  long cg_iterations = 0;
  bool converged = false;
};

namespace detail {

// Preconditioned CG for (mu2 (-Laplacian) + W) delta = rhs with the constant
// coefficient inverse (mu2 (-Laplacian) + mean W)^{-1} as preconditioner.
// W >= 0 pointwise keeps the operator positive definite.
inline ScalarField pcg_helmholtz(const ScalarField& rhs, double mu2,
                                 const std::vector<double>& W, double rel_tol,
                                 int max_iter, long* iters_out) {
  const Grid& g = rhs.grid;
  const int N = g.size();
  long double wbar_acc = 0.0L;
  for (double w : W) wbar_acc += w;
  const double wbar = std::max(static_cast<double>(wbar_acc / N), 1e-12);

  auto apply = [&](const ScalarField& p) {
    ScalarField lp = laplacian(p);
    ScalarField out(g);
    for (int k = 0; k < N; ++k) out.v[k] = -mu2 * lp.v[k] + W[k] * p.v[k];
    return out;
  };
  auto precond = [&](const ScalarField& r) { return helmholtz_solve(r, mu2, wbar); };
  auto dot = [N](const ScalarField& a, const ScalarField& b) {
    long double acc = 0.0L;
    for (int k = 0; k < N; ++k) acc += static_cast<long double>(a.v[k]) * b.v[k];
    return static_cast<double>(acc);
  };

  ScalarField x(g), r = rhs;
  ScalarField z = precond(r);
  ScalarField p = z;
  double rz = dot(r, z);
  const double rhs_norm = std::sqrt(std::max(dot(rhs, rhs), 1e-300));
  long iters = 0;
  for (int it = 0; it < max_iter; ++it) {
    ScalarField Ap = apply(p);
    const double pAp = dot(p, Ap);
    if (pAp <= 0.0) break;  // lost positivity, give back the current iterate
    const double alpha = rz / pAp;
    for (int k = 0; k < N; ++k) {
      x.v[k] += alpha * p.v[k];
      r.v[k] -= alpha * Ap.v[k];
    }
    ++iters;
    if (std::sqrt(dot(r, r)) <= rel_tol * rhs_norm) break;
    z = precond(r);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int k = 0; k < N; ++k) p.v[k] = z.v[k] + beta * p.v[k];
  }
  if (iters_out) *iters_out += iters;
  return x;
}

}  // namespace detail

// Solve mu_coeff * Laplacian(f) = h e^{2 f} - A on the torus for the unique
// solution.  Substituting g = 2 f gives (mu_coeff / 2) Laplacian(g) =
// h e^{g} - A, handled by a damped Newton iteration whose linearizations are
// symmetric positive definite.
inline ScalarField solve_kazdan_warner(const ScalarField& h, double A,
                                       double mu_coeff, const SolverConfig& cfg,
                                       const ScalarField* init = nullptr,
                                       SolveDiagnostics* diag = nullptr) {
  const Grid& g = h.grid;
  if (!(A > 0.0)) throw std::domain_error("solve_kazdan_warner: require A > 0");
  if (!(mu_coeff > 0.0))
    throw std::domain_error("solve_kazdan_warner: require mu_coeff > 0");
  const int N = g.size();
  double hmax = 0.0, hmin = 0.0;
  long double hsum = 0.0L;
  for (double x : h.v) {
    hmax = std::max(hmax, x);
    hmin = std::min(hmin, x);
    hsum += x;
  }
  if (hmin < -1e-12 || hmax <= 0.0)
    throw std::domain_error("solve_kazdan_warner: weight must be >= 0 and not identically zero");
  const double hbar = static_cast<double>(hsum / N);

  const double mu2 = mu_coeff / 2.0;
  std::vector<double> gv(static_cast<size_t>(N));
  if (init) {
    if (!init->grid.same_as(g)) throw contract_error("solve_kazdan_warner: init grid mismatch");
    for (int k = 0; k < N; ++k) gv[k] = 2.0 * init->v[k];
  } else {
    const double g0 = std::log(A / hbar);
    for (auto& x : gv) x = g0;
  }

  SolveDiagnostics local;
  SolveDiagnostics& d = diag ? *diag : local;
  d.residual_history.clear();
  d.newton_iterations = 0;
  d.cg_iterations = 0;
  d.converged = false;

  ScalarField gf(g);
  std::vector<double> W(static_cast<size_t>(N));
  auto residual = [&](const std::vector<double>& gvec, double* out_max) {
    ScalarField tmp(g);
    tmp.v = gvec;
    ScalarField lap = laplacian(tmp);
    ScalarField res(g);
    double m = 0.0;
    for (int k = 0; k < N; ++k) {
      const double e = std::max(h.v[k], 0.0) * std::exp(gvec[k]);
      res.v[k] = mu2 * lap.v[k] - e + A;
      m = std::max(m, std::fabs(res.v[k]));
    }
    if (out_max) *out_max = m;
    return res;
  };

  double rmax = 0.0;
  ScalarField res = residual(gv, &rmax);
  d.residual_history.push_back(rmax);

  for (int it = 0; it < cfg.max_newton && rmax > cfg.tol_residual; ++it) {
    for (int k = 0; k < N; ++k) W[k] = std::max(h.v[k], 0.0) * std::exp(gv[k]);
    // Newton correction: (mu2 (-Laplacian) + W) delta = res
    ScalarField delta = detail::pcg_helmholtz(res, mu2, W, cfg.linear_tol, 400,
                                              &d.cg_iterations);
    double tau = 1.0;
    std::vector<double> trial(static_cast<size_t>(N));
    double trial_max = 0.0;
    ScalarField trial_res(g);
    for (int half = 0; half < 30; ++half) {
      for (int k = 0; k < N; ++k) trial[k] = gv[k] + tau * delta.v[k];
      trial_res = residual(trial, &trial_max);
      if (trial_max < rmax || tau < 1e-4) break;
      tau /= 2.0;
    }
    gv.swap(trial);
    res = trial_res;
    rmax = trial_max;
    d.residual_history.push_back(rmax);
    d.newton_iterations = it + 1;
  }

  if (rmax > cfg.tol_residual)
    throw solver_error("Kazdan-Warner solve stalled at residual " +
                           std::to_string(rmax),
                       d.residual_history);
  d.converged = true;
  ScalarField f(g);
  for (int k = 0; k < N; ++k) f.v[k] = gv[k] / 2.0;
  return f;
}

}  // namespace tgl
