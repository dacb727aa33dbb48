#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "torusgl/errors.hpp"
#include "torusgl/fields.hpp"
#include "torusgl/lattice.hpp"

namespace tgl {

struct ThetaParams {
  int truncation = 10;  // series runs over |n| <= truncation
};

// Absolute bound on the dropped tail of the Gaussian series for |y| <= y_abs.
inline double theta_tail_bound(const Lattice& lat, int truncation, double y_abs) {
  const double r = lat.r;
  const double m = (truncation + 1) * r - y_abs;  // offset of the first dropped Gaussian
  if (m <= 0.0) return 1.0;
  const double lead = std::exp(-kPi * m * m);
  const double ratio = std::exp(-2.0 * kPi * r * m);
  return 2.0 * lead / (1.0 - ratio);
}

inline constexpr double kThetaTailTol = 1e-12;

namespace detail {

// Evaluator reach: grid points, contour refinement, and seam checks one cell out.
inline double theta_reach(const Lattice& lat) { return 2.0 * lat.r + 1.0; }

inline void check_truncation(const Lattice& lat, const ThetaParams& tp) {
  if (tp.truncation < 1)
    throw config_error("theta truncation must be at least 1");
  if (theta_tail_bound(lat, tp.truncation, theta_reach(lat)) > kThetaTailTol)
    throw config_error("theta truncation too small for this lattice; increase it");
}

}  // namespace detail

// Pointwise value and derivatives through second order of a bundle section.
struct SectionSample {
  cplx v{}, dx{}, dy{}, dxx{}, dxy{}, dyy{};
};

// Lowest Landau level section: e^{i pi x y} sum_n e^{i pi n^2 w r}
// e^{-pi (y + n r)^2} e^{2 pi i n r x}.  Each term is annihilated by the
// lowering operator, so the sum is an exact zero mode at any truncation.
inline SectionSample theta_point(const Lattice& lat, const ThetaParams& tp,
                                 double x, double y) {
  const double r = lat.r, w = lat.w;
  cplx A = 0, Ax = 0, Ay = 0, Axx = 0, Axy = 0, Ayy = 0;
  for (int n = -tp.truncation; n <= tp.truncation; ++n) {
    const double yn = y + n * r;
    const double gauss = std::exp(-kPi * yn * yn);
    if (gauss == 0.0) continue;
    const double phase = kPi * n * n * w * r + kTwoPi * n * r * x;
    const cplx term = std::polar(gauss, phase);
    const cplx gx(0.0, kTwoPi * n * r);   // d/dx of the bare term, per unit term
    const double gy = -kTwoPi * yn;       // d/dy likewise (real)
    A += term;
    Ax += gx * term;
    Ay += gy * term;
    Axx += gx * gx * term;
    Axy += gx * gy * term;
    Ayy += (gy * gy - kTwoPi) * term;
  }
  const cplx pre = std::polar(1.0, kPi * x * y);
  const cplx px(0.0, kPi * y);  // d/dx of the prefactor, per unit prefactor
  const cplx py(0.0, kPi * x);
  SectionSample out;
  out.v = pre * A;
  out.dx = pre * (px * A + Ax);
  out.dy = pre * (py * A + Ay);
  out.dxx = pre * (px * px * A + 2.0 * px * Ax + Axx);
  out.dxy = pre * (cplx(0.0, kPi) * A + px * py * A + px * Ay + py * Ax + Axy);
  out.dyy = pre * (py * py * A + 2.0 * py * Ay + Ayy);
  return out;
}

// Magnetic translate: u_h(z) = e^{i pi (h_y x - h_x y)} u0(z - h).
// It is again a section, with the zero displaced by h.
inline SectionSample theta_point_shifted(const Lattice& lat, const ThetaParams& tp,
                                         double hx, double hy, double x, double y) {
  const SectionSample S = theta_point(lat, tp, x - hx, y - hy);
  const cplx P = std::polar(1.0, kPi * (hy * x - hx * y));
  const cplx px(0.0, kPi * hy);
  const cplx py(0.0, -kPi * hx);
  SectionSample out;
  out.v = P * S.v;
  out.dx = P * (px * S.v + S.dx);
  out.dy = P * (py * S.v + S.dy);
  out.dxx = P * (px * px * S.v + 2.0 * px * S.dx + S.dxx);
  out.dxy = P * (px * py * S.v + px * S.dy + py * S.dx + S.dxy);
  out.dyy = P * (py * py * S.v + 2.0 * py * S.dy + S.dyy);
  return out;
}

// Section of the degree-one bundle sampled on a grid.  Derivative arrays are
// optional; the evaluator, when present, gives exact off-grid samples.
struct SectionField {
  Grid grid;
  std::vector<cplx> v, dx, dy;
  std::vector<cplx> dxx, dxy, dyy;
  std::function<SectionSample(double, double)> eval;

  SectionField() = default;
  explicit SectionField(const Grid& g) : grid(g), v(static_cast<size_t>(g.size())) {}

  bool has_d1() const { return !dx.empty() && !dy.empty(); }
  bool has_d2() const { return !dxx.empty() && !dxy.empty() && !dyy.empty(); }
  cplx lap(int k) const { return dxx[k] + dyy[k]; }
};

namespace detail {

inline void fill_section(SectionField& f, int order,
                         const std::function<SectionSample(double, double)>& at) {
  const Grid& g = f.grid;
  const size_t N = static_cast<size_t>(g.size());
  if (order >= 1) {
    f.dx.resize(N);
    f.dy.resize(N);
  }
  if (order >= 2) {
    f.dxx.resize(N);
    f.dxy.resize(N);
    f.dyy.resize(N);
  }
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const SectionSample s = at(g.x(i, j), g.y(i, j));
      const int k = g.idx(i, j);
      f.v[k] = s.v;
      if (order >= 1) {
        f.dx[k] = s.dx;
        f.dy[k] = s.dy;
      }
      if (order >= 2) {
        f.dxx[k] = s.dxx;
        f.dxy[k] = s.dxy;
        f.dyy[k] = s.dyy;
      }
    }
  }
  f.eval = at;
}

}  // namespace detail

inline SectionField eval_u0(const Lattice& lat, const Grid& grid,
                            const ThetaParams& tp, int order = 2) {
  detail::check_truncation(lat, tp);
  SectionField f(grid);
  detail::fill_section(f, order, [lat, tp](double x, double y) {
    return theta_point(lat, tp, x, y);
  });
  return f;
}

inline SectionField eval_u_h(const Lattice& lat, const Grid& grid,
                             const ThetaParams& tp, double hx, double hy,
                             int order = 2) {
  detail::check_truncation(lat, tp);
  SectionField f(grid);
  detail::fill_section(f, order, [lat, tp, hx, hy](double x, double y) {
    return theta_point_shifted(lat, tp, hx, hy, x, y);
  });
  return f;
}

// Background vector potential with curl 2 pi: A0 = pi (-y, x).
inline std::array<double, 2> a0_at(double x, double y) {
  return {-kPi * y, kPi * x};
}

inline VectorField eval_A0(const Grid& g) {
  VectorField a(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const auto v = a0_at(g.x(i, j), g.y(i, j));
      a.x[g.idx(i, j)] = v[0];
      a.y[g.idx(i, j)] = v[1];
    }
  return a;
}

namespace detail {

inline void require_d1(const SectionField& f, const char* who) {
  if (!f.has_d1())
    throw contract_error(std::string(who) + ": section lacks first derivatives");
}

inline void require_d2(const SectionField& f, const char* who) {
  if (!f.has_d2())
    throw contract_error(std::string(who) + ": section lacks second derivatives");
}

}  // namespace detail

// Lowering operator (d/dx + i d/dy) + pi z; annihilates the ground state.
inline SectionField apply_L_plus(const SectionField& in) {
  detail::require_d1(in, "apply_L_plus");
  const Grid& g = in.grid;
  SectionField out(g);
  const bool d2 = in.has_d2();
  if (d2) {
    out.dx.resize(in.v.size());
    out.dy.resize(in.v.size());
  }
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const int k = g.idx(i, j);
      const cplx z(g.x(i, j), g.y(i, j));
      out.v[k] = in.dx[k] + cplx(0, 1) * in.dy[k] + kPi * z * in.v[k];
      if (d2) {
        out.dx[k] = in.dxx[k] + cplx(0, 1) * in.dxy[k] + kPi * in.v[k] + kPi * z * in.dx[k];
        out.dy[k] = in.dxy[k] + cplx(0, 1) * in.dyy[k] + cplx(0, kPi) * in.v[k] + kPi * z * in.dy[k];
      }
    }
  return out;
}

// Raising operator -(d/dx - i d/dy) + pi conj(z); adjoint of the lowering
// operator, commutator 4 pi.
inline SectionField apply_L_plus_star(const SectionField& in) {
  detail::require_d1(in, "apply_L_plus_star");
  const Grid& g = in.grid;
  SectionField out(g);
  const bool d2 = in.has_d2();
  if (d2) {
    out.dx.resize(in.v.size());
    out.dy.resize(in.v.size());
  }
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const int k = g.idx(i, j);
      const cplx zb(g.x(i, j), -g.y(i, j));
      out.v[k] = -in.dx[k] + cplx(0, 1) * in.dy[k] + kPi * zb * in.v[k];
      if (d2) {
        out.dx[k] = -in.dxx[k] + cplx(0, 1) * in.dxy[k] + kPi * in.v[k] + kPi * zb * in.dx[k];
        out.dy[k] = -in.dxy[k] + cplx(0, 1) * in.dyy[k] - cplx(0, kPi) * in.v[k] + kPi * zb * in.dy[k];
      }
    }
  return out;
}

// Magnetic Schroedinger operator (i grad + A0)^2 via pointwise derivatives.
inline SectionField apply_H(const SectionField& in) {
  detail::require_d2(in, "apply_H");
  const Grid& g = in.grid;
  SectionField out(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const int k = g.idx(i, j);
      const double x = g.x(i, j), y = g.y(i, j);
      out.v[k] = -(in.dxx[k] + in.dyy[k]) +
                 cplx(0, 2) * kPi * (-y * in.dx[k] + x * in.dy[k]) +
                 kPi * kPi * (x * x + y * y) * in.v[k];
    }
  return out;
}

inline double norm2_mean(const SectionField& f) {
  long double acc = 0.0L;
  for (const auto& z : f.v) acc += std::norm(z);
  return static_cast<double>(acc / f.v.size());
}

inline cplx inner_mean(const SectionField& a, const SectionField& b) {
  if (!a.grid.same_as(b.grid)) throw contract_error("inner_mean: grid mismatch");
  std::complex<long double> acc = 0.0L;
  for (size_t k = 0; k < a.v.size(); ++k)
    acc += std::complex<long double>(a.v[k]) * std::conj(std::complex<long double>(b.v[k]));
  return cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
}

inline double max_abs(const SectionField& f) {
  double m = 0.0;
  for (const auto& z : f.v) m = std::max(m, std::abs(z));
  return m;
}

// Rayleigh quotient of the magnetic Schroedinger operator through the
// first-order factorization: <H u, u> = |L+ u|^2 + 2 pi |u|^2.
inline double rayleigh_H(const SectionField& u) {
  detail::require_d1(u, "rayleigh_H");
  const SectionField lu = apply_L_plus(u);
  const double nn = norm2_mean(u);
  if (nn == 0.0) throw contract_error("rayleigh_H: zero section");
  return (norm2_mean(lu) + kTwoPi * nn) / nn;
}

// Phase relating u(z + t) to u(z) for a lattice translation t = (tx, ty).
inline cplx bundle_phase(double tx, double ty, double x, double y) {
  return std::polar(1.0, kPi * (tx * y - ty * x));
}

// Largest violation of the quasi-periodicity rule along both basis
// translations, relative to the section's max-norm.  Needs the evaluator.
inline double quasiperiod_defect(const SectionField& f, int samples = 48) {
  if (!f.eval) throw contract_error("quasiperiod_defect: section lacks an evaluator");
  const Lattice& lat = f.grid.lat;
  const double scale = std::max(max_abs(f), 1e-300);
  double worst = 0.0;
  auto probe = [&](double tx, double ty) {
    for (int k = 0; k < samples; ++k) {
      const double s = (k + 0.31) / samples;
      const double t = (k * 0.618 + 0.27) - std::floor(k * 0.618 + 0.27);
      const double x = lat.x_of(s, t), y = lat.y_of(s, t);
      const cplx lhs = f.eval(x + tx, y + ty).v;
      const cplx rhs = bundle_phase(tx, ty, x, y) * f.eval(x, y).v;
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  };
  probe(lat.u, 0.0);
  probe(lat.w, lat.r);
  return worst / scale;
}

// alpha * A + beta * B on matching grids; keeps the common derivative order
// and composes evaluators when both exist.
inline SectionField axpby(cplx alpha, const SectionField& A, cplx beta,
                          const SectionField& B) {
  if (!A.grid.same_as(B.grid)) throw contract_error("axpby: grid mismatch");
  SectionField out(A.grid);
  const size_t N = A.v.size();
  auto comb = [&](const std::vector<cplx>& a, const std::vector<cplx>& b,
                  std::vector<cplx>& o) {
    o.resize(N);
    for (size_t k = 0; k < N; ++k) o[k] = alpha * a[k] + beta * b[k];
  };
  comb(A.v, B.v, out.v);
  if (A.has_d1() && B.has_d1()) {
    comb(A.dx, B.dx, out.dx);
    comb(A.dy, B.dy, out.dy);
  }
  if (A.has_d2() && B.has_d2()) {
    comb(A.dxx, B.dxx, out.dxx);
    comb(A.dxy, B.dxy, out.dxy);
    comb(A.dyy, B.dyy, out.dyy);
  }
  if (A.eval && B.eval) {
    auto ea = A.eval, eb = B.eval;
    out.eval = [alpha, beta, ea, eb](double x, double y) {
      const SectionSample a = ea(x, y), b = eb(x, y);
      SectionSample s;
      s.v = alpha * a.v + beta * b.v;
      s.dx = alpha * a.dx + beta * b.dx;
      s.dy = alpha * a.dy + beta * b.dy;
      s.dxx = alpha * a.dxx + beta * b.dxx;
      s.dxy = alpha * a.dxy + beta * b.dxy;
      s.dyy = alpha * a.dyy + beta * b.dyy;
      return s;
    };
  }
  return out;
}

}  // namespace tgl
