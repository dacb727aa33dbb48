#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "torusgl/errors.hpp"
#include "torusgl/fft.hpp"
#include "torusgl/lattice.hpp"

namespace tgl {

using cplx = std::complex<double>;

// Real scalar sampled on a Grid.  All integrals below use the uniform rule,
// which is exact for band-limited integrands on the unit-area cell.
struct ScalarField {
  Grid grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid(g), v(static_cast<size_t>(g.size()), fill) {}
};

// Real vector field sampled componentwise on a Grid.
struct VectorField {
  Grid grid;
  std::vector<double> x, y;

  VectorField() = default;
  explicit VectorField(const Grid& g)
      : grid(g),
        x(static_cast<size_t>(g.size()), 0.0),
        y(static_cast<size_t>(g.size()), 0.0) {}
};

namespace detail {

inline void require_grid(const Grid& g) {
  if (g.n < 8) throw contract_error("field carries an uninitialized grid");
}

}  // namespace detail

// Fourier coefficients c_{pq} with f(s,t) = sum c_{pq} e^{2 pi i (p s + q t)};
// stored at index (p mod n)*n + (q mod n).
inline std::vector<cplx> spectrum(const ScalarField& f) {
  detail::require_grid(f.grid);
  const int n = f.grid.n;
  std::vector<cplx> c(f.v.begin(), f.v.end());
  detail::fft2_forward(n, c.data());
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (auto& z : c) z *= scale;
  return c;
}

inline ScalarField field_from_spectrum(const Grid& g, std::vector<cplx> c) {
  detail::require_grid(g);
  detail::fft2_backward(g.n, c.data());
  ScalarField f(g);
  for (int i = 0; i < g.size(); ++i) f.v[i] = c[i].real();
  return f;
}

namespace detail {

// Apply a per-mode multiplier to a spectrum and transform back (real part).
template <class Mult>
ScalarField apply_multiplier(const Grid& g, const std::vector<cplx>& c, Mult&& m) {
  const int n = g.n;
  std::vector<cplx> out(c.size());
  for (int i = 0; i < n; ++i) {
    const int p = g.freq(i);
    for (int j = 0; j < n; ++j) {
      const int q = g.freq(j);
      out[g.idx(i, j)] = c[g.idx(i, j)] * m(i, j, p, q);
    }
  }
  detail::fft2_backward(n, out.data());
  ScalarField f(g);
  for (int k = 0; k < g.size(); ++k) f.v[k] = out[k].real();
  return f;
}

}  // namespace detail

// Cartesian gradient by spectral differentiation.  The unmatched frequency n/2
// has no well-defined odd multiplier and is dropped from first derivatives.
inline VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid;
  const auto c = spectrum(f);
  const cplx iunit(0.0, 1.0);
  ScalarField fx = detail::apply_multiplier(g, c, [&](int i, int j, int p, int q) {
    if (g.nyquist(i) || g.nyquist(j)) return cplx(0.0);
    return iunit * g.kx(p, q);
  });
  ScalarField fy = detail::apply_multiplier(g, c, [&](int i, int j, int p, int q) {
    if (g.nyquist(i) || g.nyquist(j)) return cplx(0.0);
    return iunit * g.ky(p, q);
  });
  VectorField out(g);
  out.x = std::move(fx.v);
  out.y = std::move(fy.v);
  return out;
}

// Laplacian keeps the full |K|^2 multiplier: it is even, so the Nyquist modes
// are unambiguous.
inline ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid;
  const auto c = spectrum(f);
  return detail::apply_multiplier(g, c, [&](int, int, int p, int q) {
    const double kx = g.kx(p, q), ky = g.ky(p, q);
    return cplx(-(kx * kx + ky * ky));
  });
}

// a = (df/dy, -df/dx): divergence-free, zero-mean by construction.
inline VectorField rotated_gradient(const ScalarField& f) {
  VectorField grad = gradient(f);
  VectorField out(f.grid);
  out.x = std::move(grad.y);
  for (int k = 0; k < f.grid.size(); ++k) out.y[k] = -grad.x[k];
  return out;
}

// First and second derivative fields of a scalar, one forward transform total.
struct ScalarJet {
  ScalarField fx, fy, fxx, fxy, fyy, lap;
};

inline ScalarJet spectral_jet(const ScalarField& f) {
  const Grid& g = f.grid;
  const auto c = spectrum(f);
  const cplx iunit(0.0, 1.0);
  auto first = [&](bool xdir) {
    return detail::apply_multiplier(g, c, [&, xdir](int i, int j, int p, int q) {
      if (g.nyquist(i) || g.nyquist(j)) return cplx(0.0);
      return iunit * (xdir ? g.kx(p, q) : g.ky(p, q));
    });
  };
  ScalarJet jet;
  jet.fx = first(true);
  jet.fy = first(false);
  jet.fxx = detail::apply_multiplier(g, c, [&](int, int, int p, int q) {
    const double kx = g.kx(p, q);
    return cplx(-kx * kx);
  });
  jet.fyy = detail::apply_multiplier(g, c, [&](int, int, int p, int q) {
    const double ky = g.ky(p, q);
    return cplx(-ky * ky);
  });
  jet.fxy = detail::apply_multiplier(g, c, [&](int i, int j, int p, int q) {
    if (g.nyquist(i) || g.nyquist(j)) return cplx(0.0);
    return cplx(-g.kx(p, q) * g.ky(p, q));
  });
  jet.lap = ScalarField(g);
  for (int k = 0; k < g.size(); ++k) jet.lap.v[k] = jet.fxx.v[k] + jet.fyy.v[k];
  return jet;
}

inline double mean(const ScalarField& f) {
  long double acc = 0.0L;
  for (double x : f.v) acc += x;
  return static_cast<double>(acc / f.v.size());
}

// The cell has unit area, so integrals coincide with grid means.
inline double integral(const ScalarField& f) { return mean(f); }

inline double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::fabs(x));
  return m;
}

inline double max_abs(const VectorField& a) {
  double m = 0.0;
  for (size_t k = 0; k < a.x.size(); ++k)
    m = std::max(m, std::hypot(a.x[k], a.y[k]));
  return m;
}

inline std::array<double, 2> mean(const VectorField& a) {
  long double sx = 0.0L, sy = 0.0L;
  for (size_t k = 0; k < a.x.size(); ++k) {
    sx += a.x[k];
    sy += a.y[k];
  }
  return {static_cast<double>(sx / a.x.size()), static_cast<double>(sy / a.y.size())};
}

// curl a = d(a_y)/dx - d(a_x)/dy, spectrally.
inline ScalarField curl(const VectorField& a) {
  const Grid& g = a.grid;
  ScalarField ax(g), ay(g);
  ax.v = a.x;
  ay.v = a.y;
  const auto cx = spectrum(ax);
  const auto cy = spectrum(ay);
  const cplx iunit(0.0, 1.0);
  std::vector<cplx> out(cx.size());
  for (int i = 0; i < g.n; ++i) {
    const int p = g.freq(i);
    for (int j = 0; j < g.n; ++j) {
      const int q = g.freq(j);
      const int k = g.idx(i, j);
      if (g.nyquist(i) || g.nyquist(j)) {
        out[k] = 0.0;
        continue;
      }
      out[k] = iunit * (g.kx(p, q) * cy[k] - g.ky(p, q) * cx[k]);
    }
  }
  detail::fft2_backward(g.n, out.data());
  ScalarField f(g);
  for (int k = 0; k < g.size(); ++k) f.v[k] = out[k].real();
  return f;
}

// max-norm of the spectral divergence; diagnostic for gauge fields.
inline double divergence_max(const VectorField& a) {
  const Grid& g = a.grid;
  ScalarField ax(g), ay(g);
  ax.v = a.x;
  ay.v = a.y;
  const auto cx = spectrum(ax);
  const auto cy = spectrum(ay);
  const cplx iunit(0.0, 1.0);
  std::vector<cplx> out(cx.size());
  for (int i = 0; i < g.n; ++i) {
    const int p = g.freq(i);
    for (int j = 0; j < g.n; ++j) {
      const int q = g.freq(j);
      const int k = g.idx(i, j);
      if (g.nyquist(i) || g.nyquist(j)) {
        out[k] = 0.0;
        continue;
      }
      out[k] = iunit * (g.kx(p, q) * cx[k] + g.ky(p, q) * cy[k]);
    }
  }
  detail::fft2_backward(g.n, out.data());
  double m = 0.0;
  for (const auto& z : out) m = std::max(m, std::abs(z));
  return m;
}

// Solve (c2 (-Laplacian) + c0) z = rhs spectrally; requires c0 > 0 or a
// zero-mean rhs with c0 == 0.
inline ScalarField helmholtz_solve(const ScalarField& rhs, double c2, double c0) {
  const Grid& g = rhs.grid;
  auto c = spectrum(rhs);
  for (int i = 0; i < g.n; ++i) {
    const int p = g.freq(i);
    for (int j = 0; j < g.n; ++j) {
      const int q = g.freq(j);
      const double kx = g.kx(p, q), ky = g.ky(p, q);
      const double denom = c2 * (kx * kx + ky * ky) + c0;
      auto& z = c[g.idx(i, j)];
      z = (denom != 0.0) ? z / denom : cplx(0.0);
    }
  }
  detail::fft2_backward(g.n, c.data());
  ScalarField out(g);
  for (int k = 0; k < g.size(); ++k) out.v[k] = c[k].real();
  return out;
}

// Fourier interpolation at lattice coordinates (s, t); O(n^2) per point.
inline double eval_at(const ScalarField& f, double s, double t) {
  const Grid& g = f.grid;
  const auto c = spectrum(f);
  long double re = 0.0L;
  for (int i = 0; i < g.n; ++i) {
    const int p = g.freq(i);
    for (int j = 0; j < g.n; ++j) {
      const int q = g.freq(j);
      const double ph = kTwoPi * (p * s + q * t);
      const cplx z = c[g.idx(i, j)] * cplx(std::cos(ph), std::sin(ph));
      re += z.real();
    }
  }
  return static_cast<double>(re);
}

// Change resolution by spectral zero-padding / truncation.  Nyquist rows of the
// source are dropped so the result is unambiguous in both directions.
inline ScalarField resample(const ScalarField& f, int n2) {
  const Grid g2 = make_grid(f.grid.lat, n2);
  const auto c = spectrum(f);
  std::vector<cplx> c2(static_cast<size_t>(n2) * n2, cplx(0.0));
  const int half = std::min(f.grid.n, n2) / 2;
  for (int i = 0; i < f.grid.n; ++i) {
    const int p = f.grid.freq(i);
    if (std::abs(p) >= half) continue;
    for (int j = 0; j < f.grid.n; ++j) {
      const int q = f.grid.freq(j);
      if (std::abs(q) >= half) continue;
      const int i2 = p >= 0 ? p : p + n2;
      const int j2 = q >= 0 ? q : q + n2;
      c2[static_cast<size_t>(i2) * n2 + j2] = c[f.grid.idx(i, j)];
    }
  }
  detail::fft2_backward(n2, c2.data());
  ScalarField out(g2);
  for (int k = 0; k < g2.size(); ++k) out.v[k] = c2[k].real();
  return out;
}

// Deterministic band-limited real field with modes |p|, |q| <= max_mode, zero
// mean, rescaled to the requested max-norm.
inline ScalarField random_bandlimited(const Grid& g, int max_mode,
                                      std::uint64_t seed, double amplitude) {
  if (max_mode < 1 || 2 * max_mode >= g.n)
    throw config_error("random_bandlimited: band must fit strictly inside the grid");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> c(static_cast<size_t>(g.size()), cplx(0.0));
  for (int p = -max_mode; p <= max_mode; ++p) {
    for (int q = -max_mode; q <= max_mode; ++q) {
      if (p == 0 && q == 0) continue;
      // fill each conjugate pair once, keyed by lexicographic order
      if (p < 0 || (p == 0 && q < 0)) continue;
      const cplx z(gauss(rng), gauss(rng));
      const int i = p >= 0 ? p : p + g.n;
      const int j = q >= 0 ? q : q + g.n;
      const int im = (-p) >= 0 ? -p : -p + g.n;
      const int jm = (-q) >= 0 ? -q : -q + g.n;
      c[g.idx(i, j)] = z;
      c[g.idx(im, jm)] = std::conj(z);
    }
  }
  detail::fft2_backward(g.n, c.data());
  ScalarField f(g);
  for (int k = 0; k < g.size(); ++k) f.v[k] = c[k].real();
  const double m = max_abs(f);
  if (m > 0.0) {
    const double scale = amplitude / m;
    for (auto& x : f.v) x *= scale;
  }
  return f;
}

}  // namespace tgl
