#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "pkin/backbone3d.hpp"
#include "pkin/distributions.hpp"

using namespace pkin;

namespace {

struct Rigid {
  double r[3][3];
  Vec3 t;
  Vec3 operator()(const Vec3& p) const {
    Vec3 out{};
    for (int i = 0; i < 3; ++i) out[i] = r[i][0] * p[0] + r[i][1] * p[1] + r[i][2] * p[2] + t[i];
    return out;
  }
};

Rigid random_rigid(Rng& rng) {
  // Rotation from a random unit quaternion.
  std::normal_distribution<double> n(0.0, 1.0);
  double q[4];
  double s = 0;
  for (double& v : q) {
    v = n(rng);
    s += v * v;
  }
  s = std::sqrt(s);
  for (double& v : q) v /= s;
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Rigid m{{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
           {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
           {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}},
          {10 * n(rng), 10 * n(rng), 10 * n(rng)}};
  return m;
}

std::vector<double> random_angles(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::vector<double> out(n);
  for (auto& v : out) v = u(rng);
  return out;
}

}  // namespace

TEST(Geometry, DihedralSigns) {
  const Vec3 a{1, 0, 0}, b{0, 0, 0}, c{0, 1, 0};
  EXPECT_NEAR(dihedral(a, b, c, Vec3{1, 1, 0}), 0.0, 1e-15);
  EXPECT_NEAR(std::fabs(dihedral(a, b, c, Vec3{-1, 1, 0})), kPi, 1e-15);
  EXPECT_NEAR(dihedral(a, b, c, Vec3{0, 1, 1}), -kPi / 2, 1e-15);
  EXPECT_NEAR(dihedral(a, b, c, Vec3{0, 1, -1}), kPi / 2, 1e-15);
  EXPECT_NEAR(bond_angle(a, b, c), kPi / 2, 1e-15);
}

TEST(PlaceAtom, CisAndTrans) {
  const Vec3 a{1, 1, 0}, b{0, 0, 0}, c{0, 1.5, 0};
  const Vec3 cis = place_atom(a, b, c, 1.3, 110.0, 0.0);
  const Vec3 trans = place_atom(a, b, c, 1.3, 110.0, kPi);
  EXPECT_NEAR(cis[2], 0.0, 1e-12);
  EXPECT_NEAR(trans[2], 0.0, 1e-12);
  EXPECT_GT(cis[0], 0.0);  // same side as a
  EXPECT_LT(trans[0], 0.0);
  EXPECT_NEAR(distance(c, cis), 1.3, 1e-12);
  EXPECT_NEAR(rad2deg(bond_angle(b, c, trans)), 110.0, 1e-10);
}

TEST(PlaceAtom, RoundTrip) {
  Rng rng(1);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const Vec3 a{n(rng), n(rng), n(rng)}, b{n(rng), n(rng), n(rng)}, c{n(rng), n(rng), n(rng)};
    if (bond_angle(a, b, c) < 0.1 || bond_angle(a, b, c) > kPi - 0.1) continue;
    const double tor = u(rng);
    const Vec3 d = place_atom(a, b, c, 1.5, 115.0, tor);
    EXPECT_NEAR(wrap_angle(dihedral(a, b, c, d) - tor), 0.0, 1e-9);
  }
}

TEST(PlaceAtom, DegenerateFrame) {
  EXPECT_THROW(place_atom(Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{2, 0, 0}, 1.0, 110.0, 0.0), DegenerateFrameError);
  EXPECT_THROW(place_atom(Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{1, 0, 0}, 1.0, 110.0, 0.0), DegenerateFrameError);
}

TEST(Backbone, SeedFrame) {
  const GeometryParams g;
  const auto bb = build_backbone(std::vector<double>{0.3, -1.0}, std::vector<double>{2.0, 0.1}, g);
  const auto& r0 = bb.residues[0];
  EXPECT_EQ(r0.n, (Vec3{0, 0, 0}));
  EXPECT_NEAR(r0.ca[0], g.n_ca, 1e-15);
  EXPECT_EQ(r0.ca[1], 0.0);
  EXPECT_EQ(r0.ca[2], 0.0);
  EXPECT_NEAR(distance(r0.ca, r0.c), g.ca_c, 1e-12);
  EXPECT_NEAR(r0.c[2], 0.0, 1e-15);
  EXPECT_NEAR(rad2deg(bond_angle(r0.n, r0.ca, r0.c)), g.n_ca_c, 1e-10);
}

TEST(Backbone, BondGeometryHeld) {
  Rng rng(2);
  const GeometryParams g;
  const std::size_t l = 8;
  const auto bb = build_backbone(random_angles(rng, l), random_angles(rng, l), g);
  for (std::size_t i = 0; i < l; ++i) {
    const auto& r = bb.residues[i];
    EXPECT_NEAR(distance(r.n, r.ca), g.n_ca, 1e-12);
    EXPECT_NEAR(distance(r.ca, r.c), g.ca_c, 1e-12);
    EXPECT_NEAR(rad2deg(bond_angle(r.n, r.ca, r.c)), g.n_ca_c, 1e-9);
    if (i + 1 < l) {
      const auto& s = bb.residues[i + 1];
      EXPECT_NEAR(distance(r.c, s.n), g.c_n, 1e-12);
      EXPECT_NEAR(rad2deg(bond_angle(r.ca, r.c, s.n)), g.ca_c_n, 1e-9);
      EXPECT_NEAR(rad2deg(bond_angle(r.c, s.n, s.ca)), g.c_n_ca, 1e-9);
    }
  }
}

TEST(Backbone, DihedralRoundTrip) {
  Rng rng(3);
  const GeometryParams g;
  for (int t = 0; t < 200; ++t) {
    const std::size_t l = 2 + t % 10;
    const auto phi = random_angles(rng, l), psi = random_angles(rng, l);
    const auto m = measure_dihedrals(build_backbone(phi, psi, g));
    EXPECT_TRUE(std::isnan(m.phi[0]));
    EXPECT_TRUE(std::isnan(m.psi[l - 1]));
    for (std::size_t i = 1; i < l; ++i) EXPECT_NEAR(wrap_angle(m.phi[i] - phi[i]), 0.0, 1e-8);
    for (std::size_t i = 0; i + 1 < l; ++i) EXPECT_NEAR(wrap_angle(m.psi[i] - psi[i]), 0.0, 1e-8);
    for (double w : m.omega) EXPECT_NEAR(std::fabs(w), kPi, 1e-8);
  }
}

TEST(Backbone, TerminalAnglesDoNotMoveAtoms) {
  Rng rng(4);
  const GeometryParams g;
  auto phi = random_angles(rng, 6), psi = random_angles(rng, 6);
  const auto a = build_backbone(phi, psi, g);
  phi[0] += 1.0;
  psi[5] -= 1.0;
  const auto b = build_backbone(phi, psi, g);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(a.residues[i].n, b.residues[i].n);
    EXPECT_EQ(a.residues[i].ca, b.residues[i].ca);
    EXPECT_EQ(a.residues[i].c, b.residues[i].c);
  }
}

TEST(Backbone, RigidMotionInvariance) {
  Rng rng(5);
  const GeometryParams g;
  for (int t = 0; t < 50; ++t) {
    const auto bb = build_backbone(random_angles(rng, 8), random_angles(rng, 8), g);
    const Rigid m = random_rigid(rng);
    BackboneCoords moved = bb;
    for (auto& r : moved.residues) {
      r.n = m(r.n);
      r.ca = m(r.ca);
      r.c = m(r.c);
    }
    EXPECT_NEAR(end_to_end_ca_distance(moved), end_to_end_ca_distance(bb), 1e-10);
    const auto da = ca_distance_matrix(bb), db = ca_distance_matrix(moved);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(da(i, j), db(i, j), 1e-10);
    const auto ma = measure_dihedrals(bb), mb = measure_dihedrals(moved);
    for (std::size_t i = 1; i < 8; ++i) EXPECT_NEAR(wrap_angle(ma.phi[i] - mb.phi[i]), 0.0, 1e-10);
  }
}

TEST(Backbone, HelixDistanceInRange) {
  const GeometryParams g;
  const std::vector<double> phi(8, deg2rad(-60.0)), psi(8, deg2rad(-40.0));
  const double d = end_to_end_ca_distance(phi, psi, g);
  EXPECT_GE(d, 10.0);
  EXPECT_LE(d, 14.0);
}

TEST(Backbone, TwoResidueCaSpacing) {
  const GeometryParams g;
  const auto bb = build_backbone(std::vector<double>{kPi, kPi}, std::vector<double>{kPi, kPi}, g);
  EXPECT_NEAR(end_to_end_ca_distance(bb), 3.8, 0.2);
  const auto m = ca_distance_matrix(bb);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m(0, 1), end_to_end_ca_distance(bb));
  EXPECT_EQ(m(1, 0), m(0, 1));
  EXPECT_EQ(m(0, 0), 0.0);
}

TEST(Backbone, EndpointsOnly) {
  // Swapping interior residues does not change the end-to-end distance.
  Rng rng(6);
  auto bb = build_backbone(random_angles(rng, 6), random_angles(rng, 6), GeometryParams{});
  const double d = end_to_end_ca_distance(bb);
  std::swap(bb.residues[2], bb.residues[3]);
  EXPECT_EQ(end_to_end_ca_distance(bb), d);
}

TEST(Backbone, FlatLayoutAndGradient) {
  Rng rng(7);
  const GeometryParams g;
  const auto phi = random_angles(rng, 5), psi = random_angles(rng, 5);
  const DihedralPair pair{AngleVector(phi), AngleVector(psi)};
  const auto flat = pair.flatten();
  ASSERT_EQ(flat.size(), 10u);
  EXPECT_EQ(flat[0], AngleVector(phi).values()[0]);
  EXPECT_EQ(flat[5], AngleVector(psi).values()[0]);
  EXPECT_EQ(DihedralPair::unflatten(flat).flatten(), flat);
  EXPECT_NEAR(end_to_end_ca_distance(flat, g), end_to_end_ca_distance(build_backbone(pair, g)), 1e-14);

  const auto grad = end_to_end_ca_distance_grad(flat, g);
  EXPECT_EQ(grad[0], 0.0);  // phi_0
  EXPECT_EQ(grad[9], 0.0);  // psi_{L-1}
  for (std::size_t i = 0; i < flat.size(); ++i) {
    auto up = flat, down = flat;
    up[i] += 1e-4;
    down[i] -= 1e-4;
    const double fd = (end_to_end_ca_distance(up, g) - end_to_end_ca_distance(down, g)) / 2e-4;
    EXPECT_NEAR(grad[i], fd, 1e-6);
  }
}

TEST(Backbone, InvalidInputs) {
  EXPECT_THROW(build_backbone(std::vector<double>{0.0}, std::vector<double>{0.0}, GeometryParams{}),
               std::invalid_argument);
  EXPECT_THROW(build_backbone(std::vector<double>{0.0, 0.0}, std::vector<double>{0.0}, GeometryParams{}),
               std::invalid_argument);
  GeometryParams bad;
  bad.n_ca = -1.0;
  EXPECT_THROW(bad.validate(), std::exception);
}

TEST(Backbone, CbetaPlacement) {
  const auto bb = build_backbone(std::vector<double>(4, deg2rad(-60.0)), std::vector<double>(4, deg2rad(-40.0)),
                                 GeometryParams{}, BuildOptions{true});
  for (const auto& r : bb.residues) {
    ASSERT_TRUE(r.cb.has_value());
    EXPECT_NEAR(distance(*r.cb, r.ca), 1.52, 0.05);
  }
}

TEST(Pdb, FixedColumns) {
  const auto bb = build_backbone(std::vector<double>(2, -1.0), std::vector<double>(2, -0.7), GeometryParams{});
  std::ostringstream os;
  write_pdb(os, bb, 1);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 5), "MODEL");
  int atoms = 0;
  while (std::getline(in, line)) {
    if (line.rfind("ATOM", 0) != 0) continue;
    ++atoms;
    EXPECT_EQ(line.size(), 78u);
    EXPECT_EQ(line.substr(17, 3), "ALA");
    EXPECT_EQ(line[21], 'A');
    std::stod(line.substr(30, 8));
    std::stod(line.substr(38, 8));
    std::stod(line.substr(46, 8));
  }
  EXPECT_EQ(atoms, 6);
  EXPECT_NE(os.str().find("ENDMDL"), std::string::npos);
}
