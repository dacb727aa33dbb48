#pragma once

#include <cmath>
#include <random>

#include "torusgl/errors.hpp"
#include "torusgl/fields.hpp"
#include "torusgl/selfdual.hpp"
#include "torusgl/theta.hpp"

namespace tgl {

struct EnergyReport {
  double kinetic = 0.0;       // (mu/2) |i grad u + C u|^2
  double potential = 0.0;     // (1/4) (1 - |u|^2)^2
  double field = 0.0;         // (mu^2 k^2 / 2) (curl a)^2
  double internal = 0.0;      // sum of the three densities
  double magnetic_gap = 0.0;  // (1/2) (H_int - H_ext)^2
  double total = 0.0;
  double a_plus = 0.0;        // self-dual remainder functional
  double bkn_defect = 0.0;    // violation of the factorization identity
};

inline double mu_general(double k, double H_int) { return H_int / (kTwoPi * k); }

namespace detail {

struct RawIntegrals {
  double kinetic_plain = 0.0;  // |i grad u + C u|^2
  double potential_raw = 0.0;  // (1 - |u|^2)^2
  double curl2 = 0.0;          // (curl a)^2
  double u2 = 0.0;             // |u|^2
};

inline void require_pair(const SectionField& u, const VectorField& a,
                         const char* who) {
  if (!u.grid.same_as(a.grid))
    throw contract_error(std::string(who) + ": section and field live on different grids");
  require_d1(u, who);
}

inline RawIntegrals raw_integrals(const SectionField& u, const VectorField& a,
                                  const ScalarField* curl_a) {
  const Grid& g = u.grid;
  ScalarField curl_local;
  if (!curl_a) {
    curl_local = curl(a);
    curl_a = &curl_local;
  }
  long double kin = 0.0L, pot = 0.0L, cr2 = 0.0L, uu = 0.0L;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const int k = g.idx(i, j);
      const auto A0 = a0_at(g.x(i, j), g.y(i, j));
      const double Cx = A0[0] + a.x[k];
      const double Cy = A0[1] + a.y[k];
      const cplx px = cplx(0, 1) * u.dx[k] + Cx * u.v[k];
      const cplx py = cplx(0, 1) * u.dy[k] + Cy * u.v[k];
      kin += std::norm(px) + std::norm(py);
      const double d = 1.0 - std::norm(u.v[k]);
      pot += d * d;
      cr2 += static_cast<long double>(curl_a->v[k]) * curl_a->v[k];
      uu += std::norm(u.v[k]);
    }
  }
  const int N = g.size();
  return {static_cast<double>(kin / N), static_cast<double>(pot / N),
          static_cast<double>(cr2 / N), static_cast<double>(uu / N)};
}

}  // namespace detail

// Energy per unit cell at fixed internal field.  H_int = 0 is admitted and
// degenerates gracefully (mu = 0), which realizes the zero-field limit.
inline EnergyReport energy_internal(const SectionField& u, const VectorField& a,
                                    double k, double H_int,
                                    const ScalarField* curl_a = nullptr) {
  detail::require_pair(u, a, "energy_internal");
  if (!(k > 0.0)) throw std::domain_error("energy_internal: require k > 0");
  if (!(H_int >= 0.0)) throw std::domain_error("energy_internal: require H_int >= 0");
  const double mu = mu_general(k, H_int);
  const auto raw = detail::raw_integrals(u, a, curl_a);
  EnergyReport rep;
  rep.kinetic = 0.5 * mu * raw.kinetic_plain;
  rep.potential = 0.25 * raw.potential_raw;
  rep.field = 0.5 * mu * mu * k * k * raw.curl2;
  rep.internal = rep.kinetic + rep.potential + rep.field;
  rep.total = rep.internal;
  return rep;
}

inline EnergyReport energy_total(const SectionField& u, const VectorField& a,
                                 double k, double H_int, double H_ext,
                                 const ScalarField* curl_a = nullptr) {
  EnergyReport rep = energy_internal(u, a, k, H_int, curl_a);
  rep.magnetic_gap = 0.5 * (H_int - H_ext) * (H_int - H_ext);
  rep.total = rep.internal + rep.magnetic_gap;
  return rep;
}

// Nonnegative remainder in the factorized form of the self-dual energy:
// integral of (mu/2)|D+ u|^2 + (1/4)(mu curl C - (1 - |u|^2))^2 with
// curl C = 2 pi + curl a and mu = H_int / (pi sqrt 2).
inline double a_plus(const SectionField& u, const VectorField& a, double H_int,
                     const ScalarField* curl_a = nullptr) {
  detail::require_pair(u, a, "a_plus");
  if (!(H_int >= 0.0)) throw std::domain_error("a_plus: require H_int >= 0");
  const Grid& g = u.grid;
  ScalarField curl_local;
  if (!curl_a) {
    curl_local = curl(a);
    curl_a = &curl_local;
  }
  const double mu = mu_selfdual(H_int);
  long double acc = 0.0L;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const int k = g.idx(i, j);
      const auto A0 = a0_at(g.x(i, j), g.y(i, j));
      const double Cx = A0[0] + a.x[k];
      const double Cy = A0[1] + a.y[k];
      const cplx dplus = (u.dx[k] + cplx(0, 1) * u.dy[k]) + cplx(Cy, -Cx) * u.v[k];
      const double alg = mu * (kTwoPi + curl_a->v[k]) - (1.0 - std::norm(u.v[k]));
      acc += 0.5 * mu * std::norm(dplus) + 0.25 * alg * alg;
    }
  }
  return static_cast<double>(acc / g.size());
}

// Factorization identity at the self-dual coupling, valid for every admissible
// pair: E = mu pi - (mu pi)^2 + a_plus.  Returns the absolute violation.
inline double bkn_defect(const SectionField& u, const VectorField& a, double H_int,
                         const ScalarField* curl_a = nullptr) {
  const double mu_pi = mu_selfdual(H_int) * kPi;
  const EnergyReport rep = energy_internal(u, a, kInvSqrt2, H_int, curl_a);
  return std::fabs(rep.internal - (mu_pi - mu_pi * mu_pi + a_plus(u, a, H_int, curl_a)));
}

// Minimal internal energy at the self-dual coupling as a function of the
// internal field: H/sqrt2 - (H/sqrt2)^2 up to the bifurcation endpoint, then
// the normal-state value 1/4.
inline double m_E_closed_form(double H_int) {
  if (!(H_int >= 0.0)) throw std::domain_error("m_E_closed_form: require H_int >= 0");
  if (H_int > kInvSqrt2) return 0.25;
  const double m = H_int * kInvSqrt2;
  return m - m * m;
}

struct GlResidual {
  double field_eq = 0.0;  // mu (i grad + C)^2 u = (1 - |u|^2) u
  double gauge_eq = 0.0;  // Laplacian a = (1 / (mu k^2)) Re[conj(u)(i grad + C) u]
};

// Max-norm residuals of the two Euler-Lagrange equations.
inline GlResidual gl_residual(const SectionField& u, const VectorField& a,
                              double k, double H_int,
                              const ScalarField* curl_a = nullptr) {
  detail::require_pair(u, a, "gl_residual");
  detail::require_d2(u, "gl_residual");
  if (!(k > 0.0) || !(H_int > 0.0))
    throw std::domain_error("gl_residual: require k > 0 and H_int > 0");
  (void)curl_a;
  const Grid& g = u.grid;
  const double mu = mu_general(k, H_int);

  ScalarField ax(g), ay(g);
  ax.v = a.x;
  ay.v = a.y;
  const ScalarField lap_ax = laplacian(ax);
  const ScalarField lap_ay = laplacian(ay);

  GlResidual res;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const int kk = g.idx(i, j);
      const auto A0 = a0_at(g.x(i, j), g.y(i, j));
      const double Cx = A0[0] + a.x[kk];
      const double Cy = A0[1] + a.y[kk];
      const cplx lap_u = u.lap(kk);
      const cplx op = -lap_u + cplx(0, 2) * (Cx * u.dx[kk] + Cy * u.dy[kk]) +
                      (Cx * Cx + Cy * Cy) * u.v[kk];
      const cplx r1 = mu * op - (1.0 - std::norm(u.v[kk])) * u.v[kk];
      res.field_eq = std::max(res.field_eq, std::abs(r1));
      const double Jx = (cplx(0, 1) * u.dx[kk] * std::conj(u.v[kk])).real() +
                        Cx * std::norm(u.v[kk]);
      const double Jy = (cplx(0, 1) * u.dy[kk] * std::conj(u.v[kk])).real() +
                        Cy * std::norm(u.v[kk]);
      const double scale = 1.0 / (mu * k * k);
      res.gauge_eq = std::max(res.gauge_eq,
                              std::hypot(lap_ax.v[kk] - scale * Jx,
                                         lap_ay.v[kk] - scale * Jy));
    }
  }
  return res;
}

// Randomized admissible pair for identity batteries: a two-translate span of
// the ground state plus a rotated-gradient gauge field.
struct AdmissiblePair {
  SectionField u;
  VectorField a;
  ScalarField curl_a;
  double H_int = 0.0;
};

inline AdmissiblePair random_admissible_pair(const Lattice& lat, const Grid& grid,
                                             const ThetaParams& tp,
                                             const SectionField& u0_base,
                                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double alpha = 2.0 * uni(rng) - 1.0;
  const double beta = 2.0 * uni(rng) - 1.0;
  const double hs = uni(rng), ht = uni(rng);
  const double hx = lat.x_of(hs, ht), hy = lat.y_of(hs, ht);
  const SectionField uh = eval_u_h(lat, grid, tp, hx, hy, 2);
  AdmissiblePair out;
  out.u = axpby(cplx(alpha), u0_base, cplx(beta), uh);
  ScalarField fpot = random_bandlimited(grid, 4, rng(), 1.0);
  out.a = rotated_gradient(fpot);
  const double amax = max_abs(out.a);
  double scale = amax > 0.0 ? 1.0 / amax : 1.0;
  for (int k = 0; k < grid.size(); ++k) {
    out.a.x[k] *= scale;
    out.a.y[k] *= scale;
  }
  ScalarField lap_f = laplacian(fpot);
  out.curl_a = ScalarField(grid);
  for (int k = 0; k < grid.size(); ++k) out.curl_a.v[k] = -scale * lap_f.v[k];
  out.H_int = 0.1 + 0.6 * uni(rng);
  return out;
}

// Worst factorization defect over a batch of randomized pairs.
inline double bkn_random_battery(const Lattice& lat, const Grid& grid,
                                 const ThetaParams& tp, int count,
                                 std::uint64_t seed) {
  const SectionField u0 = eval_u0(lat, grid, tp, 2);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int c = 0; c < count; ++c) {
    const AdmissiblePair p = random_admissible_pair(lat, grid, tp, u0, rng);
    worst = std::max(worst, bkn_defect(p.u, p.a, p.H_int, &p.curl_a));
  }
  return worst;
}

}  // namespace tgl
