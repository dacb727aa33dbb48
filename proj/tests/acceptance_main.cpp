// Acceptance battery: one line per criterion with the measured quantity, the
// pinned tolerance, and the criterion runtime.  Nonzero exit if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "torusgl/torusgl.hpp"

using namespace tgl;

namespace {

struct Criterion {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

struct Timer {
  double start = now_seconds();
  double lap() const { return now_seconds() - start; }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

}  // namespace

int main() {
  const Lattice lat = lattice_preset("square");
  SolverConfig cfg;  // grid 64, escalated near the small-field end
  const ThetaParams tp = cfg.theta;
  std::vector<Criterion> report;

  // ---- criterion 2: internal energy of solved pairs vs the closed form ----
  // (runs first; later criteria reuse these pairs)
  const std::vector<double> H4 = {0.2, 0.3, 0.5, 0.65};
  std::vector<SolutionPair> pairs4;
  {
    Timer t;
    Criterion c{2, "solved-pair energies match the closed form"};
    double worst = 0.0;
    for (double H : H4) {
      pairs4.push_back(build_pair(lat, H, cfg));
      const SolutionPair& p = pairs4.back();
      const EnergyReport rep = energy_internal(p.u, p.a, kInvSqrt2, H, &p.curl_a);
      worst = std::max(worst, std::fabs(rep.internal - m_E_closed_form(H)));
    }
    c.pass = worst < 1e-6 && t.lap() < 120.0;
    c.detail = "max |internal - (H/sqrt2 - (H/sqrt2)^2)| = " + fmt(worst) +
               ", tol 1e-6, budget 120 s";
    c.seconds = t.lap();
    report.push_back(c);
  }

  // ---- criterion 4: slope integrand sweep, monotone, extrapolated limit ----
  SEstimate est;
  std::vector<SolutionPair> sweep_pairs;
  {
    Timer t;
    Criterion c{4, "slope integrand sweep and zero-field limit"};
    est = estimate_S(lat, default_H_grid(), cfg, &sweep_pairs);
    bool monotone = est.complete;
    for (size_t i = 0; i + 1 < est.rows.size(); ++i)
      if (!(est.rows[i + 1].chi > est.rows[i].chi)) monotone = false;
    const bool in_band = est.extrapolated >= 0.74 && est.extrapolated <= 0.82;
    c.pass = monotone && in_band && t.lap() < 600.0;
    c.detail = std::string("monotone=") + (monotone ? "yes" : "no") +
               ", extrapolated = " + fmt(est.extrapolated) +
               ", required band [0.74, 0.82], grid sup = " + fmt(est.grid_sup) +
               ", budget 600 s";
    c.seconds = t.lap();
    report.push_back(c);
  }

  // ---- criterion 1: factorization identity battery ----
  {
    Timer t;
    Criterion c{1, "factorization identity battery"};
    const Grid g64 = make_grid(lat, 64);
    double worst = bkn_random_battery(lat, g64, tp, 100, 20240817u);
    for (const auto& p : pairs4)
      worst = std::max(worst, bkn_defect(p.u, p.a, p.H_int, &p.curl_a));
    for (const auto& p : sweep_pairs)
      if (!p.degenerate)
        worst = std::max(worst, bkn_defect(p.u, p.a, p.H_int, &p.curl_a));
    c.pass = worst < 1e-8 && t.lap() < 60.0;
    c.detail = "max defect over 100 random pairs and " +
               std::to_string(pairs4.size() + sweep_pairs.size()) +
               " solved pairs = " + fmt(worst) + ", tol 1e-8, budget 60 s";
    c.seconds = t.lap();
    report.push_back(c);
  }

  // ---- criterion 3: integral identities of the solved pairs ----
  {
    Timer t;
    Criterion c{3, "integral identities of the minimizing family"};
    double worst_density = 0.0, worst_pot = 0.0, worst_kin = 0.0;
    for (const auto& p : pairs4) {
      const double mu_pi = p.mu * kPi;
      worst_density = std::max(
          worst_density, std::fabs(p.int_u2 - (1.0 - kSqrt2 * p.H_int)));
      const double pot_pred = p.mu * p.mu * (4.0 * kPi * kPi + p.int_curl2);
      worst_pot = std::max(
          worst_pot, std::fabs(p.int_one_minus_u2_sq - pot_pred) / pot_pred);
      const double lhs =
          0.5 * p.mu * p.int_kinetic_plain + 0.5 * p.mu * p.mu * p.int_curl2;
      const double rhs = mu_pi - 2.0 * mu_pi * mu_pi;
      worst_kin = std::max(worst_kin, std::fabs(lhs - rhs) / rhs);
    }
    c.pass = worst_density < 1e-6 && worst_pot < 1e-6 && worst_kin < 1e-6;
    c.detail = "density abs " + fmt(worst_density) + ", potential rel " +
               fmt(worst_pot) + ", kinetic rel " + fmt(worst_kin) + ", tol 1e-6";
    c.seconds = t.lap();
    report.push_back(c);
  }

  // ---- criterion 5: two-sided slope of the first critical field ----
  {
    Timer t;
    Criterion c{5, "two-sided slope of the first critical field"};
    const double S = est.grid_sup;
    const double tol = 2e-3;
    bool ok = est.complete;
    std::string parts;
    const double at_sd = hc1_upper_bound(kInvSqrt2, est.family).value;
    ok = ok && std::fabs(at_sd - kInvSqrt2) < 1e-9;
    for (double h : {0.01, 0.02, 0.05}) {
      const double drop = hc1_upper_bound(kInvSqrt2 + h, est.family).value - kInvSqrt2;
      const bool lower_ok = drop >= -h - tol;
      const bool upper_ok = drop <= -S * h + tol;
      ok = ok && lower_ok && upper_ok;
      parts += " h=" + fmt(h) + ": drop=" + fmt(drop) + " in [" + fmt(-h - tol) +
               ", " + fmt(-S * h + tol) + "]" + (lower_ok && upper_ok ? "" : " VIOLATED");
    }
    c.pass = ok;
    c.detail = "endpoint gap " + fmt(std::fabs(at_sd - kInvSqrt2)) +
               " (tol 1e-9);" + parts;
    c.seconds = t.lap();
    report.push_back(c);
  }

  // ---- criterion 6: residuals and uniqueness ----
  {
    Timer t;
    Criterion c{6, "first-order residuals and uniqueness of the solve"};
    double worst_res = 0.0;
    for (const auto& p : pairs4) {
      worst_res = std::max({worst_res, p.dplus_max, p.second_bog_max,
                            p.pde_residual});
      const GlResidual gl = gl_residual(p.u, p.a, kInvSqrt2, p.H_int, &p.curl_a);
      worst_res = std::max({worst_res, gl.field_eq, gl.gauge_eq});
    }
    SolverConfig small = cfg;
    small.grid_n = 32;
    const SolutionPair base = build_pair(lat, 0.3, small);
    double worst_diff = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const ScalarField init = random_bandlimited(base.grid, 3, seed, 0.5);
      const SolutionPair probe = build_pair(lat, 0.3, small, &init);
      for (int k = 0; k < base.grid.size(); ++k)
        worst_diff = std::max(worst_diff,
                              std::fabs(probe.f.v[k] - base.f.v[k]));
    }
    c.pass = worst_res < 1e-6 && worst_diff < 1e-8;
    c.detail = "max residual " + fmt(worst_res) + " (tol 1e-6), max spread over 5 starts " +
               fmt(worst_diff) + " (tol 1e-8)";
    c.seconds = t.lap();
    report.push_back(c);
  }

  // ---- criterion 7: ground-state oracle checks ----
  {
    Timer t;
    Criterion c{7, "ground-state oracle checks"};
    const Grid g64 = make_grid(lat, 64);
    const SectionField u0 = eval_u0(lat, g64, tp, 2);
    const double lplus = max_abs(apply_L_plus(u0));
    const double dens = std::fabs(norm2_mean(u0) - kInvSqrt2);
    const double ray = std::fabs(rayleigh_H(u0) - kTwoPi);
    const ZeroLocation z = locate_zero(u0);
    const double zerr = std::hypot(z.s - 0.5, z.t - 0.5);
    const bool wind = (z.winding == 1 && z.total_winding == 1);
    c.pass = lplus < 1e-10 && dens < 1e-10 && ray < 1e-8 && zerr < 1e-6 && wind;
    c.detail = "lowering residual " + fmt(lplus) + " (tol 1e-10), density gap " +
               fmt(dens) + " (tol 1e-10), Rayleigh gap " + fmt(ray) +
               " (tol 1e-8), zero offset " + fmt(zerr) + " (tol 1e-6), winding " +
               (wind ? "1" : "wrong");
    c.seconds = t.lap();
    report.push_back(c);
  }

  // ---- criterion 8: phase rules on a coupling/field grid ----
  {
    Timer t;
    Criterion c{8, "phase classification against the rigorous rules"};
    int contradictions = 0, predicted = 0;
    for (int i = 0; i < 20; ++i) {
      const double k = 0.3 + (2.0 - 0.3) * (i + 0.5) / 20.0;
      for (int j = 0; j < 20; ++j) {
        const double H = 0.1 + (2.0 - 0.1) * (j + 0.5) / 20.0;
        const PhasePoint p = classify(k, H, est.family);
        if (k <= kInvSqrt2) {
          ++predicted;
          // below the self-dual coupling: full field expulsion up to 1/sqrt 2,
          // normal state beyond it
          const Phase want = (H < kInvSqrt2) ? Phase::Pure : Phase::Normal;
          if (p.phase != want) ++contradictions;
        } else if (H >= k) {
          ++predicted;
          if (p.phase != Phase::Normal) ++contradictions;
        } else if (H > p.hc1_upper) {
          ++predicted;
          // strictly between the upper bound and the second critical field the
          // minimizer is neither normal nor pure
          if (p.phase == Phase::Normal || p.phase == Phase::Pure) ++contradictions;
        }
      }
    }
    c.pass = contradictions == 0;
    c.detail = std::to_string(predicted) + " predicted points on a 20 x 20 grid, " +
               std::to_string(contradictions) + " contradictions (tol 0)";
    c.seconds = t.lap();
    report.push_back(c);
  }

  // ---- report, ordered by criterion id ----
  for (int id = 1; id <= 8; ++id) {
    for (const auto& c : report) {
      if (c.id != id) continue;
      std::printf("[%s] criterion %d: %s; %s (%.2f s)\n",
                  c.pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                  c.detail.c_str(), c.seconds);
    }
  }
  int failed = 0;
  for (const auto& c : report)
    if (!c.pass) ++failed;
  std::printf("%d/8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
