#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "torusgl/kazdan_warner.hpp"

using Catch::Approx;
using namespace tgl;

TEST_CASE("constant weight has the closed-form solution", "[kazdan-warner]") {
  const Grid g = make_grid(lattice_preset("square"), 16);
  const double c = 0.37, A = 0.81;
  ScalarField h(g, c);
  SolverConfig cfg;
  cfg.grid_n = g.n;
  SolveDiagnostics diag;
  const ScalarField f = solve_kazdan_warner(h, A, 0.15, cfg, nullptr, &diag);
  const double exact = 0.5 * std::log(A / c);
  double worst = 0.0;
  for (double v : f.v) worst = std::max(worst, std::fabs(v - exact));
  CHECK(worst < 1e-12);
  CHECK(diag.converged);
}

TEST_CASE("manufactured solution is recovered", "[kazdan-warner]") {
  // choose f*, build the weight h = (mu lap f* + A) e^{-2 f*}, solve, compare
  const Grid g = make_grid(lattice_preset("hex"), 32);
  const double A = 1.0, mu = 0.02;
  const ScalarField fstar = random_bandlimited(g, 3, 17, 0.01);
  const ScalarField lap = laplacian(fstar);
  ScalarField h(g);
  for (int k = 0; k < g.size(); ++k) {
    h.v[k] = (mu * lap.v[k] + A) * std::exp(-2.0 * fstar.v[k]);
    REQUIRE(h.v[k] > 0.0);
  }
  SolverConfig cfg;
  const ScalarField f = solve_kazdan_warner(h, A, mu, cfg);
  double worst = 0.0;
  for (int k = 0; k < g.size(); ++k)
    worst = std::max(worst, std::fabs(f.v[k] - fstar.v[k]));
  CHECK(worst < 1e-9);
}

TEST_CASE("Newton agrees with a damped Picard iteration", "[kazdan-warner]") {
  // independent route: g_{k+1} solves (mu2(-lap) + c) g_{k+1} = c g_k - (h e^{g_k} - A)
  const Grid g = make_grid(lattice_preset("square"), 32);
  const SectionField u0 = eval_u0(g.lat, g, ThetaParams{}, 0);
  ScalarField h(g);
  for (int k = 0; k < g.size(); ++k) h.v[k] = std::norm(u0.v[k]);
  const double H = 0.3, A = 1.0 - kSqrt2 * H, mu = H / (kPi * kSqrt2);
  const double mu2 = mu / 2.0;

  ScalarField gk(g, std::log(A));
  const double c = 3.0;  // dominates sup h e^{g} on the solution branch
  for (int it = 0; it < 400; ++it) {
    ScalarField rhs(g);
    for (int k = 0; k < g.size(); ++k)
      rhs.v[k] = c * gk.v[k] - (h.v[k] * std::exp(gk.v[k]) - A);
    gk = helmholtz_solve(rhs, mu2, c);
  }

  SolverConfig cfg;
  const ScalarField f = solve_kazdan_warner(h, A, mu, cfg);
  double worst = 0.0;
  for (int k = 0; k < g.size(); ++k)
    worst = std::max(worst, std::fabs(2.0 * f.v[k] - gk.v[k]));
  CHECK(worst < 1e-6);
}

TEST_CASE("solutions do not depend on the starting point", "[kazdan-warner]") {
  const Grid g = make_grid(lattice_preset("square"), 16);
  const SectionField u0 = eval_u0(g.lat, g, ThetaParams{}, 0);
  ScalarField h(g);
  for (int k = 0; k < g.size(); ++k) h.v[k] = std::norm(u0.v[k]);
  SolverConfig cfg;
  const ScalarField base = solve_kazdan_warner(h, 0.5, 0.12, cfg);
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const ScalarField init = random_bandlimited(g, 3, seed, 0.4);
    const ScalarField f = solve_kazdan_warner(h, 0.5, 0.12, cfg, &init);
    double worst = 0.0;
    for (int k = 0; k < g.size(); ++k)
      worst = std::max(worst, std::fabs(f.v[k] - base.v[k]));
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("invalid problems are rejected", "[kazdan-warner]") {
  const Grid g = make_grid(lattice_preset("square"), 16);
  ScalarField h(g, 1.0);
  SolverConfig cfg;
  CHECK_THROWS_AS(solve_kazdan_warner(h, 0.0, 0.1, cfg), std::domain_error);
  CHECK_THROWS_AS(solve_kazdan_warner(h, -0.2, 0.1, cfg), std::domain_error);
  CHECK_THROWS_AS(solve_kazdan_warner(h, 0.5, 0.0, cfg), std::domain_error);
  ScalarField zero(g, 0.0);
  CHECK_THROWS_AS(solve_kazdan_warner(zero, 0.5, 0.1, cfg), std::domain_error);
  ScalarField neg(g, 1.0);
  neg.v[3] = -0.5;
  CHECK_THROWS_AS(solve_kazdan_warner(neg, 0.5, 0.1, cfg), std::domain_error);

  const Grid g2 = make_grid(lattice_preset("square"), 32);
  ScalarField bad_init(g2, 0.0);
  CHECK_THROWS_AS(solve_kazdan_warner(h, 0.5, 0.1, cfg, &bad_init), contract_error);
}

TEST_CASE("non-convergence reports the residual history", "[kazdan-warner]") {
  const Grid g = make_grid(lattice_preset("square"), 16);
  const SectionField u0 = eval_u0(g.lat, g, ThetaParams{}, 0);
  ScalarField h(g);
  for (int k = 0; k < g.size(); ++k) h.v[k] = std::norm(u0.v[k]);
  SolverConfig cfg;
  cfg.max_newton = 1;
  SolveDiagnostics diag;
  try {
    solve_kazdan_warner(h, 0.5, 0.12, cfg, nullptr, &diag);
    FAIL("expected a solver_error");
  } catch (const solver_error& e) {
    CHECK(e.residual_history.size() == 2);  // initial residual plus one step
    CHECK(e.residual_history == diag.residual_history);
    CHECK_FALSE(diag.converged);
  }
}
