#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "torusgl/energetics.hpp"

using Catch::Approx;
using namespace tgl;

namespace {

// constant section with vanishing derivatives, for the two homogeneous states
SectionField constant_section(const Grid& g, cplx value, int order = 2) {
  SectionField f(g);
  for (auto& z : f.v) z = value;
  const size_t N = f.v.size();
  if (order >= 1) {
    f.dx.assign(N, cplx(0.0));
    f.dy.assign(N, cplx(0.0));
  }
  if (order >= 2) {
    f.dxx.assign(N, cplx(0.0));
    f.dxy.assign(N, cplx(0.0));
    f.dyy.assign(N, cplx(0.0));
  }
  return f;
}

}  // namespace

TEST_CASE("homogeneous states have the textbook energies", "[energetics]") {
  const Grid g = make_grid(lattice_preset("square"), 16);
  const VectorField a0(g);

  // normal state: u = 0, internal energy 1/4 at every coupling and field
  const SectionField normal = constant_section(g, 0.0);
  for (double k : {0.5, kInvSqrt2, 1.3}) {
    for (double H : {0.2, 1.0}) {
      const EnergyReport rep = energy_internal(normal, a0, k, H);
      CHECK(rep.internal == Approx(0.25).margin(1e-15));
    }
  }

  // pure state at zero internal field: total energy H_ext^2 / 2
  const SectionField pure = constant_section(g, 1.0);
  const EnergyReport rep = energy_total(pure, a0, 1.0, 0.0, 0.8);
  CHECK(rep.internal == Approx(0.0).margin(1e-15));
  CHECK(rep.total == Approx(0.8 * 0.8 / 2.0).epsilon(1e-14));
  CHECK(rep.magnetic_gap == Approx(0.32).epsilon(1e-14));
}

TEST_CASE("minimal energy closed form", "[energetics]") {
  CHECK(m_E_closed_form(0.0) == 0.0);
  CHECK(m_E_closed_form(kInvSqrt2) == Approx(0.25).margin(1e-15));
  CHECK(m_E_closed_form(0.9) == 0.25);
  CHECK(m_E_closed_form(0.3) == Approx(0.3 * kInvSqrt2 - 0.09 / 2.0).epsilon(1e-14));
  CHECK_THROWS_AS(m_E_closed_form(-0.1), std::domain_error);
}

TEST_CASE("solved pairs attain the minimal energy", "[energetics]") {
  const Lattice lat = lattice_preset("square");
  SolverConfig cfg;
  for (double H : {0.25, 0.5}) {
    const SolutionPair p = build_pair(lat, H, cfg);
    const EnergyReport rep = energy_internal(p.u, p.a, kInvSqrt2, H, &p.curl_a);
    CHECK(rep.internal == Approx(m_E_closed_form(H)).margin(1e-9));
    CHECK(bkn_defect(p.u, p.a, H, &p.curl_a) < 1e-10);
    // remainder functional vanishes exactly on the minimizer
    CHECK(a_plus(p.u, p.a, H, &p.curl_a) < 1e-12);
  }
}

TEST_CASE("remainder functional of the degenerate pair", "[energetics]") {
  const Grid g = make_grid(lattice_preset("square"), 16);
  const SectionField zero = constant_section(g, 0.0);
  const VectorField a0(g);
  for (double H : {0.2, 0.4, 0.65}) {
    const double A = 1.0 - kSqrt2 * H;
    CHECK(a_plus(zero, a0, H) == Approx(0.25 * A * A).epsilon(1e-12));
    // the factorization identity closes the normal state at every field
    CHECK(bkn_defect(zero, a0, H) < 1e-15);
  }
}

TEST_CASE("factorization identity holds for random admissible pairs",
          "[energetics]") {
  const Lattice lat = lattice_preset("square");
  const Grid g = make_grid(lat, 32);
  CHECK(bkn_random_battery(lat, g, ThetaParams{}, 10, 12345u) < 1e-9);

  // determinism of the randomized battery
  CHECK(bkn_random_battery(lat, g, ThetaParams{}, 3, 99u) ==
        bkn_random_battery(lat, g, ThetaParams{}, 3, 99u));
}

TEST_CASE("above the upper critical field nothing beats the normal state",
          "[energetics]") {
  // k >= 1/sqrt 2 and H_int >= k: every admissible pair has internal >= 1/4
  const Lattice lat = lattice_preset("square");
  const Grid g = make_grid(lat, 32);
  const SectionField u0 = eval_u0(lat, g, ThetaParams{}, 2);
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const AdmissiblePair p = random_admissible_pair(lat, g, ThetaParams{}, u0, rng);
    const EnergyReport rep = energy_internal(p.u, p.a, 1.0, 1.2, &p.curl_a);
    CHECK(rep.internal >= 0.25 - 1e-9);
  }
}

TEST_CASE("Euler-Lagrange residuals vanish on solutions and detect tampering",
          "[energetics]") {
  const Lattice lat = lattice_preset("square");
  SolverConfig cfg;
  SolutionPair p = build_pair(lat, 0.3, cfg);
  const GlResidual ok = gl_residual(p.u, p.a, kInvSqrt2, 0.3, &p.curl_a);
  CHECK(ok.field_eq < 1e-7);
  CHECK(ok.gauge_eq < 1e-7);

  for (auto& z : p.u.v) z *= 1.05;
  for (auto& z : p.u.dx) z *= 1.05;
  for (auto& z : p.u.dy) z *= 1.05;
  for (auto& z : p.u.dxx) z *= 1.05;
  for (auto& z : p.u.dxy) z *= 1.05;
  for (auto& z : p.u.dyy) z *= 1.05;
  const GlResidual bad = gl_residual(p.u, p.a, kInvSqrt2, 0.3, &p.curl_a);
  CHECK(bad.field_eq > 1e-3);
}

TEST_CASE("argument validation", "[energetics]") {
  const Grid g = make_grid(lattice_preset("square"), 16);
  const SectionField u = constant_section(g, 1.0);
  const VectorField a(g);
  CHECK_THROWS_AS(energy_internal(u, a, 0.0, 0.3), std::domain_error);
  CHECK_THROWS_AS(energy_internal(u, a, 1.0, -0.3), std::domain_error);
  CHECK_THROWS_AS(gl_residual(u, a, 1.0, 0.0), std::domain_error);

  const SectionField bare = constant_section(g, 1.0, 0);
  CHECK_THROWS_AS(energy_internal(bare, a, 1.0, 0.3), contract_error);
  const SectionField d1only = constant_section(g, 1.0, 1);
  CHECK_THROWS_AS(gl_residual(d1only, a, 1.0, 0.3), contract_error);

  const Grid g2 = make_grid(lattice_preset("square"), 32);
  const VectorField a2(g2);
  CHECK_THROWS_AS(energy_internal(u, a2, 1.0, 0.3), contract_error);
}
