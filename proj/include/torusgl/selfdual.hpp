#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "torusgl/errors.hpp"
#include "torusgl/fields.hpp"
#include "torusgl/kazdan_warner.hpp"
#include "torusgl/theta.hpp"
#include "torusgl/zero_locator.hpp"

namespace tgl {

inline double mu_selfdual(double H_int) { return H_int / (kPi * kSqrt2); }

// Exact minimizer of the periodic energy at the self-dual coupling for a given
// internal field: u = u0 e^f with f from the scalar PDE, a the rotated
// gradient of f.  Quadratures of the invariant densities are cached.
struct SolutionPair {
  Lattice lat;
  Grid grid;
  ThetaParams theta;
  double H_int = 0.0;
  double mu = 0.0;          // H_int / (pi sqrt 2)
  bool degenerate = false;  // endpoint branch u == 0 at the bifurcation field

  ScalarField f;
  SectionField u;           // order-2 derivatives
  VectorField a;
  ScalarField curl_a;       // equals -Laplacian(f)

  double int_u2 = 0.0;                // integral of |u|^2
  double int_one_minus_u2_sq = 1.0;   // integral of (1 - |u|^2)^2
  double int_curl2 = 0.0;             // integral of (curl a)^2
  double int_kinetic_plain = 0.0;     // integral of |i grad u + (A0 + a) u|^2

  double pde_residual = 0.0;
  double dplus_max = 0.0;     // max-norm of the first self-duality equation
  double second_bog_max = 0.0;  // max-norm of the second one
  ZeroLocation zero;
  SolveDiagnostics diag;
};

// Larger grids near the singular small-field end, where the vortex core
// shrinks relative to the cell.
inline int escalated_grid_n(const SolverConfig& cfg, double H_int) {
  int n = cfg.grid_n;
  if (H_int < 0.1) n = std::max(n, 128);
  if (H_int < 0.05) n = std::max(n, 256);
  return n;
}

namespace detail {

inline SolutionPair degenerate_pair(const Lattice& lat, const Grid& grid,
                                    const SolverConfig& cfg, double H_int) {
  SolutionPair p;
  p.lat = lat;
  p.grid = grid;
  p.theta = cfg.theta;
  p.H_int = H_int;
  p.mu = mu_selfdual(H_int);
  p.degenerate = true;
  p.f = ScalarField(grid, 0.0);
  p.u = SectionField(grid);
  p.u.dx.assign(p.u.v.size(), cplx(0.0));
  p.u.dy.assign(p.u.v.size(), cplx(0.0));
  p.u.dxx.assign(p.u.v.size(), cplx(0.0));
  p.u.dxy.assign(p.u.v.size(), cplx(0.0));
  p.u.dyy.assign(p.u.v.size(), cplx(0.0));
  p.a = VectorField(grid);
  p.curl_a = ScalarField(grid, 0.0);
  p.int_u2 = 0.0;
  p.int_one_minus_u2_sq = 1.0;
  p.int_curl2 = 0.0;
  p.int_kinetic_plain = 0.0;
  return p;
}

inline SolutionPair assemble_pair(const Lattice& lat, const Grid& grid,
                                  const SolverConfig& cfg, double H_int,
                                  const SectionField& u0, ScalarField f,
                                  SolveDiagnostics diag) {
  SolutionPair p;
  p.lat = lat;
  p.grid = grid;
  p.theta = cfg.theta;
  p.H_int = H_int;
  p.mu = mu_selfdual(H_int);
  p.f = std::move(f);
  p.diag = std::move(diag);

  const int N = grid.size();
  const ScalarJet jet = spectral_jet(p.f);
  p.a = VectorField(grid);
  p.curl_a = ScalarField(grid);
  for (int k = 0; k < N; ++k) {
    p.a.x[k] = jet.fy.v[k];
    p.a.y[k] = -jet.fx.v[k];
    p.curl_a.v[k] = -jet.lap.v[k];
  }

  p.u = SectionField(grid);
  p.u.dx.resize(N);
  p.u.dy.resize(N);
  p.u.dxx.resize(N);
  p.u.dxy.resize(N);
  p.u.dyy.resize(N);
  for (int k = 0; k < N; ++k) {
    const double ef = std::exp(p.f.v[k]);
    const double fx = jet.fx.v[k], fy = jet.fy.v[k];
    const double fxx = jet.fxx.v[k], fxy = jet.fxy.v[k], fyy = jet.fyy.v[k];
    p.u.v[k] = ef * u0.v[k];
    p.u.dx[k] = ef * (u0.dx[k] + u0.v[k] * fx);
    p.u.dy[k] = ef * (u0.dy[k] + u0.v[k] * fy);
    p.u.dxx[k] = ef * (u0.dxx[k] + 2.0 * u0.dx[k] * fx + u0.v[k] * (fxx + fx * fx));
    p.u.dxy[k] = ef * (u0.dxy[k] + u0.dx[k] * fy + u0.dy[k] * fx +
                       u0.v[k] * (fxy + fx * fy));
    p.u.dyy[k] = ef * (u0.dyy[k] + 2.0 * u0.dy[k] * fy + u0.v[k] * (fyy + fy * fy));
  }

  // invariant quadratures
  const double A = 1.0 - kSqrt2 * H_int;
  long double s_u2 = 0.0L, s_pot = 0.0L, s_curl = 0.0L, s_kin = 0.0L;
  double dplus = 0.0, bog2 = 0.0, u2max = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    for (int j = 0; j < grid.n; ++j) {
      const int k = grid.idx(i, j);
      const double u2 = std::norm(p.u.v[k]);
      u2max = std::max(u2max, u2);
      s_u2 += u2;
      s_pot += (1.0 - u2) * (1.0 - u2);
      s_curl += static_cast<long double>(p.curl_a.v[k]) * p.curl_a.v[k];
      const auto A0 = a0_at(grid.x(i, j), grid.y(i, j));
      const double Cx = A0[0] + p.a.x[k];
      const double Cy = A0[1] + p.a.y[k];
      const cplx px = cplx(0, 1) * p.u.dx[k] + Cx * p.u.v[k];
      const cplx py = cplx(0, 1) * p.u.dy[k] + Cy * p.u.v[k];
      s_kin += std::norm(px) + std::norm(py);
      // first self-duality equation: (d/dx + i d/dy) u + (C_y - i C_x) u = 0
      const cplx dpl = (p.u.dx[k] + cplx(0, 1) * p.u.dy[k]) + cplx(Cy, -Cx) * p.u.v[k];
      dplus = std::max(dplus, std::abs(dpl));
      // second self-duality equation: mu (2 pi + curl a) = 1 - |u|^2
      bog2 = std::max(bog2, std::fabs(p.mu * (kTwoPi + p.curl_a.v[k]) - (1.0 - u2)));
    }
  }
  const int NN = grid.size();
  p.int_u2 = static_cast<double>(s_u2 / NN);
  p.int_one_minus_u2_sq = static_cast<double>(s_pot / NN);
  p.int_curl2 = static_cast<double>(s_curl / NN);
  p.int_kinetic_plain = static_cast<double>(s_kin / NN);
  p.dplus_max = dplus;
  p.second_bog_max = bog2;
  p.pde_residual = p.diag.residual_history.empty() ? 0.0 : p.diag.residual_history.back();

  if (u2max > 1.0 + 1e-7)
    throw integrity_error("solution pair: |u| exceeds 1 beyond tolerance");
  if (std::fabs(p.int_u2 - A) > 1e-7)
    throw integrity_error("solution pair: density integral deviates from 1 - sqrt(2) H");
  if (p.dplus_max > 1e-7 || p.second_bog_max > 1e-7)
    throw integrity_error("solution pair: self-duality residual too large");

  p.zero = locate_zero(u0);
  return p;
}

}  // namespace detail

// Construct the minimizing pair at internal field H_int on the given lattice.
// An optional warm start (the log-density of a nearby field) accelerates the
// Newton solve; cold starts fall back to a short continuation walk.
inline SolutionPair build_pair(const Lattice& lat, double H_int,
                               const SolverConfig& cfg,
                               const ScalarField* warm_f = nullptr) {
  if (!(H_int > 0.0) || !std::isfinite(H_int))
    throw std::domain_error("build_pair: require H_int > 0");
  const double A = 1.0 - kSqrt2 * H_int;
  if (A < -cfg.degenerate_band)
    throw std::domain_error("build_pair: internal field exceeds the bifurcation endpoint");
  const int n = escalated_grid_n(cfg, H_int);
  const Grid grid = make_grid(lat, n);
  if (std::fabs(A) <= cfg.degenerate_band)
    return detail::degenerate_pair(lat, grid, cfg, H_int);
  if (H_int < cfg.h_int_min - 1e-12)
    throw config_error("build_pair: internal field below the solver floor");

  const SectionField u0 = eval_u0(lat, grid, cfg.theta, 2);
  ScalarField h(grid);
  for (int k = 0; k < grid.size(); ++k) h.v[k] = std::norm(u0.v[k]);

  const double mu = mu_selfdual(H_int);
  SolveDiagnostics diag;
  ScalarField f;
  bool solved = false;
  if (warm_f) {
    ScalarField w = warm_f->grid.same_as(grid) ? *warm_f : resample(*warm_f, n);
    f = solve_kazdan_warner(h, A, mu, cfg, &w, &diag);
    solved = true;
  }
  if (!solved) {
    try {
      f = solve_kazdan_warner(h, A, mu, cfg, nullptr, &diag);
      solved = true;
    } catch (const solver_error&) {
      // continuation fallback: walk down from a mid-range field
      double Hc = 0.3;
      SolverConfig step_cfg = cfg;
      ScalarField fw = solve_kazdan_warner(h, 1.0 - kSqrt2 * Hc,
                                           mu_selfdual(Hc), step_cfg, nullptr, nullptr);
      while (Hc > H_int + 1e-12) {
        Hc = std::max(H_int, Hc - cfg.continuation_step);
        fw = solve_kazdan_warner(h, 1.0 - kSqrt2 * Hc, mu_selfdual(Hc), step_cfg,
                                 &fw, &diag);
      }
      f = fw;
      solved = true;
    }
  }
  return detail::assemble_pair(lat, grid, cfg, H_int, u0, std::move(f), std::move(diag));
}

struct SweepResult {
  std::vector<SolutionPair> pairs;
  bool complete = false;
  std::string error;
};

// Solve a descending list of internal fields with warm starts carried from one
// field to the next.  A failure aborts the walk and returns the finished
// prefix together with the failure message.
inline SweepResult continuation_sweep(const Lattice& lat,
                                      const std::vector<double>& H_desc,
                                      const SolverConfig& cfg) {
  for (size_t k = 0; k + 1 < H_desc.size(); ++k)
    if (!(H_desc[k] > H_desc[k + 1]))
      throw config_error("continuation_sweep: fields must be strictly descending");
  SweepResult out;
  const ScalarField* warm = nullptr;
  ScalarField warm_store;
  for (double H : H_desc) {
    try {
      SolutionPair p = build_pair(lat, H, cfg, warm);
      if (!p.degenerate) {
        warm_store = p.f;
        warm = &warm_store;
      }
      out.pairs.push_back(std::move(p));
    } catch (const solver_error& e) {
      out.error = e.what();
      return out;
    }
  }
  out.complete = true;
  return out;
}

}  // namespace tgl
