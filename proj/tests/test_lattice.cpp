#include <catch2/catch_amalgamated.hpp>

#include "torusgl/lattice.hpp"

using Catch::Approx;
using namespace tgl;

TEST_CASE("lattice presets are unit area", "[lattice]") {
  const Lattice sq = lattice_preset("square");
  CHECK(sq.u == 1.0);
  CHECK(sq.w == 0.0);
  CHECK(sq.r == 1.0);
  CHECK(sq.det() == Approx(1.0).epsilon(1e-15));

  const Lattice hex = lattice_preset("hex");
  CHECK(hex.u == Approx(std::sqrt(2.0 / std::sqrt(3.0))).epsilon(1e-15));
  CHECK(hex.w == Approx(hex.u / 2.0).epsilon(1e-15));
  CHECK(hex.det() == Approx(1.0).epsilon(1e-15));
  // equal side lengths and 60 degree angle
  const double len1 = hex.u;
  const double len2 = std::hypot(hex.w, hex.r);
  CHECK(len2 == Approx(len1).epsilon(1e-14));
  CHECK(hex.w / len2 == Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(lattice_preset("rhombic"), config_error);
}

TEST_CASE("coordinate maps invert each other", "[lattice]") {
  const Lattice lat = make_lattice(1.3, -0.4);
  const double s = 0.37, t = 0.81;
  const double x = lat.x_of(s, t), y = lat.y_of(s, t);
  CHECK(lat.s_of(x, y) == Approx(s).epsilon(1e-14));
  CHECK(lat.t_of(x, y) == Approx(t).epsilon(1e-14));
}

TEST_CASE("make_lattice validates the basis", "[lattice]") {
  CHECK_THROWS_AS(make_lattice(0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(make_lattice(-1.0, 0.0), std::domain_error);
}

TEST_CASE("lattice_from_basis normalizes arbitrary bases", "[lattice]") {
  // scaled and rotated square: must come back as the unit square
  const double c = std::cos(0.7), s = std::sin(0.7);
  const Lattice sq = lattice_from_basis(3.0 * c, 3.0 * s, -3.0 * s, 3.0 * c);
  CHECK(sq.u == Approx(1.0).epsilon(1e-14));
  CHECK(sq.w == Approx(0.0).margin(1e-14));

  // negatively oriented input: v2 is flipped, not rejected
  const Lattice flip = lattice_from_basis(1.0, 0.0, 0.5, -2.0);
  CHECK(flip.det() == Approx(1.0).epsilon(1e-14));
  CHECK(flip.r > 0.0);

  CHECK_THROWS_AS(lattice_from_basis(1.0, 0.0, 2.0, 0.0), std::domain_error);
}

TEST_CASE("grid constraints and geometry", "[lattice]") {
  const Lattice lat = lattice_preset("square");
  CHECK_THROWS_AS(make_grid(lat, 4), config_error);
  CHECK_THROWS_AS(make_grid(lat, 7), config_error);
  CHECK_THROWS_AS(make_grid(lat, 9), config_error);

  const Grid g = make_grid(lat, 16);
  CHECK(g.size() == 256);
  CHECK(g.idx(3, 5) == 3 * 16 + 5);
  CHECK(g.s(4) == 0.25);
  CHECK(g.x(4, 0) == Approx(0.25));
  CHECK(g.freq(15) == -1);
  CHECK(g.freq(8) == 8);
  CHECK(g.nyquist(8));
  CHECK_FALSE(g.nyquist(7));
}

TEST_CASE("wavevectors are dual to the lattice", "[lattice]") {
  // K(p, q) . v1 = 2 pi p and K(p, q) . v2 = 2 pi q for every lattice
  for (const char* name : {"square", "hex"}) {
    const Lattice lat = lattice_preset(name);
    const Grid g = make_grid(lat, 8);
    for (int p : {-2, 0, 1, 3}) {
      for (int q : {-1, 0, 2}) {
        const double dot1 = g.kx(p, q) * lat.u;
        const double dot2 = g.kx(p, q) * lat.w + g.ky(p, q) * lat.r;
        CHECK(dot1 == Approx(kTwoPi * p).margin(1e-12));
        CHECK(dot2 == Approx(kTwoPi * q).margin(1e-12));
      }
    }
  }
  const Grid sq = make_grid(lattice_preset("square"), 8);
  CHECK(sq.kx(1, 0) == Approx(kTwoPi));
  CHECK(sq.ky(1, 0) == Approx(0.0).margin(1e-15));
  const Grid wide = make_grid(make_lattice(2.0, 0.0), 8);
  CHECK(wide.kx(1, 0) == Approx(kPi));
}
