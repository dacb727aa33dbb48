#pragma once

#include <climits>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "torusgl/errors.hpp"
#include "torusgl/theta.hpp"

namespace tgl {

struct ZeroLocation {
  double x = 0, y = 0;  // Cartesian representative in the fundamental cell
  double s = 0, t = 0;  // lattice coordinates in [0, 1)
  int winding = 0;      // local index certified by the enclosing contour
  int total_winding = 0;  // sum over all cells; must equal the bundle degree
};

namespace detail {

inline double principal_step(cplx a, cplx b) {
  double d = std::arg(b) - std::arg(a);
  if (d > kPi) d -= kTwoPi;
  else if (d <= -kPi) d += kTwoPi;
  return d;
}

inline cplx guard_zero(cplx z) {
  return (std::abs(z) < 1e-290) ? cplx(1e-290, 0.0) : z;
}

// Grid corner value with indices in [0, n]; wrapped corners are reconstructed
// through the quasi-periodicity rule, so contours close on the torus.
inline cplx wrapped_corner(const SectionField& f, int i, int j) {
  const Grid& g = f.grid;
  const int n = g.n;
  cplx val = f.v[g.idx(i % n, j % n)];
  double x = g.x(i % n, j % n), y = g.y(i % n, j % n);
  if (j == n) {
    val *= bundle_phase(g.lat.w, g.lat.r, x, y);
    x += g.lat.w;
    y += g.lat.r;
  }
  if (i == n) val *= bundle_phase(g.lat.u, 0.0, x, y);
  return guard_zero(val);
}

// Winding of the evaluator around an (s, t) rectangle, m samples per edge.
// Returns a large sentinel when the contour passes through a near-zero.
inline int winding_rect(const SectionField& f, double s0, double t0, double ds,
                        double dt, int m, double floor_abs) {
  const Lattice& lat = f.grid.lat;
  std::vector<cplx> ring;
  ring.reserve(static_cast<size_t>(4 * m + 1));
  auto push = [&](double s, double t) {
    const SectionSample smp = f.eval(lat.x_of(s, t), lat.y_of(s, t));
    ring.push_back(smp.v);
  };
  for (int k = 0; k < m; ++k) push(s0 + ds * k / m, t0);
  for (int k = 0; k < m; ++k) push(s0 + ds, t0 + dt * k / m);
  for (int k = 0; k < m; ++k) push(s0 + ds - ds * k / m, t0 + dt);
  for (int k = 0; k < m; ++k) push(s0, t0 + dt - dt * k / m);
  ring.push_back(ring.front());
  double acc = 0.0;
  for (size_t k = 0; k + 1 < ring.size(); ++k) {
    if (std::abs(ring[k]) < floor_abs) return INT_MIN;
    acc += principal_step(guard_zero(ring[k]), guard_zero(ring[k + 1]));
  }
  return static_cast<int>(std::lround(acc / kTwoPi));
}

}  // namespace detail

// Locate the unique zero of a degree-one section.  Cell windings are computed
// from stored values with seam corrections; their sum certifies the bundle
// degree.  With an evaluator the winding-one cell is refined by two bisection
// steps (contours through near-zeros are retried shifted) and polished by a
// Newton iteration on the exact point samples.
inline ZeroLocation locate_zero(const SectionField& f) {
  const Grid& g = f.grid;
  const int n = g.n;
  const double scale = std::max(max_abs(f), 1e-300);

  int total = 0;
  std::vector<std::pair<int, int>> candidates;
  double best_corner = 1e300;
  std::pair<int, int> best_cell{0, 0};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const cplx c00 = detail::wrapped_corner(f, i, j);
      const cplx c10 = detail::wrapped_corner(f, i + 1, j);
      const cplx c11 = detail::wrapped_corner(f, i + 1, j + 1);
      const cplx c01 = detail::wrapped_corner(f, i, j + 1);
      const double acc = detail::principal_step(c00, c10) +
                         detail::principal_step(c10, c11) +
                         detail::principal_step(c11, c01) +
                         detail::principal_step(c01, c00);
      const int w = static_cast<int>(std::lround(acc / kTwoPi));
      total += w;
      if (w == 1) {
        const double mc = std::min(std::min(std::abs(c00), std::abs(c10)),
                                   std::min(std::abs(c11), std::abs(c01)));
        candidates.emplace_back(i, j);
        if (mc < best_corner) {
          best_corner = mc;
          best_cell = {i, j};
        }
      }
    }
  }
  if (total != 1)
    throw integrity_error("locate_zero: total winding " + std::to_string(total) +
                          " does not match the bundle degree 1");
  if (candidates.empty())
    throw integrity_error("locate_zero: no cell with winding one");

  double s0 = g.s(best_cell.first), t0 = g.t(best_cell.second);
  double ds = 1.0 / n, dt = 1.0 / n;

  if (f.eval) {
    // two bisection rounds over the four half-size subcells
    for (int round = 0; round < 2; ++round) {
      bool found = false;
      for (int attempt = 0; attempt < 4 && !found; ++attempt) {
        // shift the contour slightly if a sample sits on a zero
        const double nudge = attempt * 0.11 * ds;
        for (int a = 0; a < 2 && !found; ++a) {
          for (int b = 0; b < 2 && !found; ++b) {
            const int w = detail::winding_rect(f, s0 - nudge + a * ds / 2,
                                               t0 - nudge + b * dt / 2,
                                               ds / 2 + nudge, dt / 2 + nudge, 4,
                                               1e-9 * scale);
            if (w == 1) {
              s0 = s0 - nudge + a * ds / 2;
              t0 = t0 - nudge + b * dt / 2;
              ds = ds / 2 + nudge;
              dt = dt / 2 + nudge;
              found = true;
            }
          }
        }
      }
      if (!found) break;  // keep the current box; Newton still has a good seed
    }

    // Newton iteration on (Re u, Im u) from the box center
    const Lattice& lat = g.lat;
    double x = lat.x_of(s0 + ds / 2, t0 + dt / 2);
    double y = lat.y_of(s0 + ds / 2, t0 + dt / 2);
    const double clamp = (std::hypot(lat.u, 0.0) + std::hypot(lat.w, lat.r)) / n;
    for (int it = 0; it < 20; ++it) {
      const SectionSample smp = f.eval(x, y);
      if (std::abs(smp.v) < 1e-14 * scale) break;
      const double a = smp.dx.real(), b = smp.dy.real();
      const double c = smp.dx.imag(), d = smp.dy.imag();
      const double det = a * d - b * c;
      if (det == 0.0 || !std::isfinite(det)) break;
      const double F1 = smp.v.real(), F2 = smp.v.imag();
      double sx = (-F1 * d + F2 * b) / det;
      double sy = (F1 * c - F2 * a) / det;
      const double len = std::hypot(sx, sy);
      if (len > clamp) {
        sx *= clamp / len;
        sy *= clamp / len;
      }
      x += sx;
      y += sy;
      if (len < 1e-15) break;
    }
    s0 = g.lat.s_of(x, y);
    t0 = g.lat.t_of(x, y);
    ds = dt = 0.0;
  }

  ZeroLocation out;
  out.s = (s0 + ds / 2) - std::floor(s0 + ds / 2);
  out.t = (t0 + dt / 2) - std::floor(t0 + dt / 2);
  out.x = g.lat.x_of(out.s, out.t);
  out.y = g.lat.y_of(out.s, out.t);
  out.winding = 1;
  out.total_winding = total;
  return out;
}

}  // namespace tgl
