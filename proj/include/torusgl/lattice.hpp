#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "torusgl/errors.hpp"

namespace tgl {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

// Unit-area planar lattice in the canonical frame: basis v1 = (u, 0), v2 = (w, r)
// with r*u = 1.  The basis matrix B has columns v1, v2, so det B = 1.
struct Lattice {
  double u = 1.0;  // horizontal period
  double w = 0.0;  // shear of the second basis vector
  double r = 1.0;  // height of the fundamental cell, r = 1/u

  // Cartesian point of lattice coordinates (s, t): z = s*v1 + t*v2.
  double x_of(double s, double t) const { return u * s + w * t; }
  double y_of(double /*s*/, double t) const { return r * t; }

  // Lattice coordinates of a Cartesian point, B^{-1} = [[r, -w], [0, u]].
  double s_of(double x, double y) const { return r * x - w * y; }
  double t_of(double /*x*/, double y) const { return u * y; }

  double det() const { return u * r; }
};

inline Lattice make_lattice(double u, double w) {
  if (!(u > 0.0) || !std::isfinite(u) || !std::isfinite(w))
    throw std::domain_error("make_lattice: require finite u > 0");
  return Lattice{u, w, 1.0 / u};
}

// Bring an arbitrary basis to the canonical frame by scaling to unit area,
// flipping v2 if the pair is negatively oriented, and rotating v1 onto the x-axis.
inline Lattice lattice_from_basis(double a1x, double a1y, double a2x, double a2y) {
  double det = a1x * a2y - a1y * a2x;
  if (det == 0.0 || !std::isfinite(det))
    throw std::domain_error("lattice_from_basis: basis is degenerate");
  if (det < 0.0) {
    a2x = -a2x;
    a2y = -a2y;
    det = -det;
  }
  const double scale = 1.0 / std::sqrt(det);
  a1x *= scale; a1y *= scale; a2x *= scale; a2y *= scale;
  const double len = std::hypot(a1x, a1y);
  const double c = a1x / len, s = a1y / len;  // rotate by -angle(v1)
  const double w = c * a2x + s * a2y;
  return Lattice{len, w, 1.0 / len};
}

inline Lattice lattice_preset(std::string_view name) {
  if (name == "square") return make_lattice(1.0, 0.0);
  if (name == "hex") {
    // unit-area triangular lattice: |v1| = |v2|, angle 60 degrees
    const double u = std::sqrt(2.0 / std::sqrt(3.0));
    return make_lattice(u, u / 2.0);
  }
  throw config_error("unknown lattice preset: " + std::string(name));
}

// Uniform n x n sampling of the fundamental cell in lattice coordinates,
// corner-anchored: (s_i, t_j) = (i/n, j/n).  Storage index is i*n + j.
struct Grid {
  Lattice lat;
  int n = 0;

  int size() const { return n * n; }
  int idx(int i, int j) const { return i * n + j; }
  double s(int i) const { return static_cast<double>(i) / n; }
  double t(int j) const { return static_cast<double>(j) / n; }
  double x(int i, int j) const { return lat.x_of(s(i), t(j)); }
  double y(int i, int j) const { return lat.y_of(s(i), t(j)); }

  // signed frequency of storage index i in [0, n)
  int freq(int i) const { return i <= n / 2 ? i : i - n; }
  bool nyquist(int i) const { return 2 * i == n; }

  // Cartesian wavevector of the mode e^{2 pi i (p s + q t)}: K = 2 pi B^{-T} (p, q)
  double kx(int p, int /*q*/) const { return kTwoPi * lat.r * p; }
  double ky(int p, int q) const { return kTwoPi * (lat.u * q - lat.w * p); }

  bool same_as(const Grid& o) const {
    return n == o.n && lat.u == o.lat.u && lat.w == o.lat.w && lat.r == o.lat.r;
  }
};

inline Grid make_grid(const Lattice& lat, int n) {
  if (n < 8 || n % 2 != 0)
    throw config_error("make_grid: require even n >= 8, got " + std::to_string(n));
  return Grid{lat, n};
}

}  // namespace tgl
