#pragma once

// Protein backbone (N, CA, C and optional CB) built from phi/psi dihedrals
// with ideal bond geometry and trans peptide bonds, by sequential
// natural-extension reference frame (NeRF) placement.
//
// Seed frame: residue 0 N at the origin, CA on +x, C in the xy-plane.
// For residue i > 0:
//   N_i  from (N_{i-1}, CA_{i-1}, C_{i-1}) with torsion psi_{i-1}
//   CA_i from (CA_{i-1}, C_{i-1}, N_i)    with torsion omega
//   C_i  from (C_{i-1}, N_i, CA_i)        with torsion phi_i
// phi_0 and psi_{L-1} therefore do not move any atom.

#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pkin/angles.hpp"
#include "pkin/errors.hpp"

namespace pkin {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

/// Angle at b in the triple (a, b, c), radians.
inline double bond_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 u = a - b;
  const Vec3 v = c - b;
  return std::atan2(norm(cross(u, v)), dot(u, v));
}

/// Signed dihedral of (a, b, c, d) in (-pi, pi], IUPAC sign convention.
inline double dihedral(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 b0 = a - b;
  const Vec3 b1 = (1.0 / distance(c, b)) * (c - b);
  const Vec3 b2 = d - c;
  const Vec3 v = b0 - dot(b0, b1) * b1;
  const Vec3 w = b2 - dot(b2, b1) * b1;
  return wrap_angle(std::atan2(dot(cross(b1, v), w), dot(v, w)));
}

/// Ideal backbone geometry. Lengths in angstrom, angles in degrees.
struct GeometryParams {
  double n_ca = 1.458;
  double ca_c = 1.525;
  double c_n = 1.329;
  double n_ca_c = 111.2;
  double ca_c_n = 116.2;
  double c_n_ca = 121.7;
  double omega = 180.0;

  void validate() const {
    for (double len : {n_ca, ca_c, c_n})
      if (!(len > 0.0)) throw DomainError("GeometryParams: bond lengths must be > 0");
    for (double ang : {n_ca_c, ca_c_n, c_n_ca})
      if (!(ang > 0.0 && ang < 180.0)) throw DomainError("GeometryParams: bond angles must lie in (0, 180) degrees");
  }

  friend bool operator==(const GeometryParams&, const GeometryParams&) = default;
};

inline constexpr double kCollinearTolerance = 1e-9;

/// Places d such that |d - c| = bond_length, angle(b, c, d) = bond_angle_deg
/// and dihedral(a, b, c, d) = torsion (radians).
inline Vec3 place_atom(const Vec3& a, const Vec3& b, const Vec3& c, double bond_length,
                       double bond_angle_deg, double torsion) {
  const Vec3 bc_raw = c - b;
  const double bc_len = norm(bc_raw);
  const Vec3 n_raw = cross(b - a, bc_raw);
  const double n_len = norm(n_raw);
  if (bc_len < kCollinearTolerance || !(n_len > kCollinearTolerance * norm(b - a) * bc_len))
    throw DegenerateFrameError("place_atom: reference atoms are collinear");
  const Vec3 bc = (1.0 / bc_len) * bc_raw;
  const Vec3 n = (1.0 / n_len) * n_raw;
  const Vec3 m = cross(n, bc);
  const double theta = deg2rad(bond_angle_deg);
  const double x = -bond_length * std::cos(theta);
  const double y = bond_length * std::sin(theta) * std::cos(torsion);
  const double z = bond_length * std::sin(theta) * std::sin(torsion);
  return c + x * bc + y * m + z * n;
}

struct Residue {
  Vec3 n{};
  Vec3 ca{};
  Vec3 c{};
  std::optional<Vec3> cb;
};

struct BackboneCoords {
  std::vector<Residue> residues;

  std::size_t length() const { return residues.size(); }
};

struct DihedralPair {
  AngleVector phi;
  AngleVector psi;

  DihedralPair() = default;
  DihedralPair(AngleVector phi_in, AngleVector psi_in) : phi(std::move(phi_in)), psi(std::move(psi_in)) {
    if (phi.size() != psi.size()) throw std::invalid_argument("DihedralPair: phi and psi lengths differ");
  }

  std::size_t length() const { return phi.size(); }

  /// Layout used by the samplers: [phi_0 .. phi_{L-1}, psi_0 .. psi_{L-1}].
  std::vector<double> flatten() const {
    std::vector<double> out(phi.vector());
    out.insert(out.end(), psi.begin(), psi.end());
    return out;
  }

  static DihedralPair unflatten(std::span<const double> flat) {
    if (flat.size() % 2 != 0) throw std::invalid_argument("DihedralPair: flat vector has odd length");
    const std::size_t l = flat.size() / 2;
    return DihedralPair(AngleVector(std::vector<double>(flat.begin(), flat.begin() + l)),
                        AngleVector(std::vector<double>(flat.begin() + l, flat.end())));
  }
};

/// Ideal C-beta from N, CA, C (tetrahedral virtual placement).
inline Vec3 place_cbeta(const Vec3& n, const Vec3& ca, const Vec3& c) {
  const Vec3 b = ca - n;
  const Vec3 cc = c - ca;
  const Vec3 a = cross(b, cc);
  return ca + (-0.58273431 * a) + (0.56802827 * b) + (-0.54067466 * cc);
}

struct BuildOptions {
  bool with_cbeta = false;
};

/// Builds the backbone from raw phi/psi spans (radians, any branch).
inline BackboneCoords build_backbone(std::span<const double> phi, std::span<const double> psi,
                                     const GeometryParams& geom, BuildOptions opts = {}) {
  if (phi.size() != psi.size()) throw std::invalid_argument("build_backbone: phi and psi lengths differ");
  if (phi.size() < 2) throw std::invalid_argument("build_backbone: need at least 2 residues");
  geom.validate();
  const double omega = deg2rad(geom.omega);
  const double tau = deg2rad(geom.n_ca_c);

  BackboneCoords out;
  out.residues.resize(phi.size());
  Residue& first = out.residues[0];
  first.n = {0.0, 0.0, 0.0};
  first.ca = {geom.n_ca, 0.0, 0.0};
  first.c = first.ca + Vec3{-geom.ca_c * std::cos(tau), geom.ca_c * std::sin(tau), 0.0};

  for (std::size_t i = 1; i < phi.size(); ++i) {
    const Residue& prev = out.residues[i - 1];
    Residue& cur = out.residues[i];
    cur.n = place_atom(prev.n, prev.ca, prev.c, geom.c_n, geom.ca_c_n, psi[i - 1]);
    cur.ca = place_atom(prev.ca, prev.c, cur.n, geom.n_ca, geom.c_n_ca, omega);
    cur.c = place_atom(prev.c, cur.n, cur.ca, geom.ca_c, geom.n_ca_c, phi[i]);
  }
  if (opts.with_cbeta)
    for (Residue& r : out.residues) r.cb = place_cbeta(r.n, r.ca, r.c);
  return out;
}

inline BackboneCoords build_backbone(const DihedralPair& angles, const GeometryParams& geom,
                                     BuildOptions opts = {}) {
  return build_backbone(angles.phi.values(), angles.psi.values(), geom, opts);
}

/// Measured dihedrals of a built chain. Entries that no atom pins down
/// (phi_0, psi_{L-1}) are returned as NaN.
struct MeasuredDihedrals {
  std::vector<double> phi;
  std::vector<double> psi;
  std::vector<double> omega;  // L - 1 peptide torsions
};

inline MeasuredDihedrals measure_dihedrals(const BackboneCoords& coords) {
  const auto& r = coords.residues;
  const std::size_t l = r.size();
  MeasuredDihedrals m;
  m.phi.assign(l, std::nan(""));
  m.psi.assign(l, std::nan(""));
  for (std::size_t i = 0; i + 1 < l; ++i) {
    m.psi[i] = dihedral(r[i].n, r[i].ca, r[i].c, r[i + 1].n);
    m.omega.push_back(dihedral(r[i].ca, r[i].c, r[i + 1].n, r[i + 1].ca));
    m.phi[i + 1] = dihedral(r[i].c, r[i + 1].n, r[i + 1].ca, r[i + 1].c);
  }
  return m;
}

inline double end_to_end_ca_distance(const BackboneCoords& coords) {
  if (coords.length() < 2) throw std::invalid_argument("end_to_end_ca_distance: need at least 2 residues");
  return distance(coords.residues.front().ca, coords.residues.back().ca);
}

// Only the CA trace is needed for D, so this skips the Residue bookkeeping.
inline double end_to_end_ca_distance(std::span<const double> phi, std::span<const double> psi,
                                     const GeometryParams& geom) {
  return end_to_end_ca_distance(build_backbone(phi, psi, geom));
}

/// D as a function of the flattened [phi..., psi...] vector.
inline double end_to_end_ca_distance(std::span<const double> flat, const GeometryParams& geom) {
  const std::size_t l = flat.size() / 2;
  return end_to_end_ca_distance(flat.first(l), flat.subspan(l), geom);
}

inline constexpr double kDistanceGradStep = 1e-5;

/// Central-difference gradient of D w.r.t. the flattened dihedral vector.
inline std::vector<double> end_to_end_ca_distance_grad(std::span<const double> flat, const GeometryParams& geom,
                                                       double h = kDistanceGradStep) {
  std::vector<double> x(flat.begin(), flat.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = end_to_end_ca_distance(x, geom);
    x[i] = keep - h;
    const double down = end_to_end_ca_distance(x, geom);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// L x L matrix of CA-CA distances, row-major.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

inline DistanceMatrix ca_distance_matrix(const BackboneCoords& coords) {
  const std::size_t l = coords.length();
  if (l < 2) throw std::invalid_argument("ca_distance_matrix: need at least 2 residues");
  DistanceMatrix m(l);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = i + 1; j < l; ++j) {
      const double d = distance(coords.residues[i].ca, coords.residues[j].ca);
      m(i, j) = d;
      m(j, i) = d;
    }
  return m;
}

// PDB-style ATOM records. Columns follow the wwPDB fixed layout:
//  1-6 "ATOM  ", 7-11 serial, 13-16 atom name, 18-20 residue name ("ALA"),
//  22 chain id, 23-26 residue number, 31-38/39-46/47-54 x/y/z (%8.3f),
//  55-60 occupancy, 61-66 B-factor, 77-78 element.
inline void write_pdb(std::ostream& os, const BackboneCoords& coords, int model = 0, char chain = 'A') {
  char line[96];
  if (model > 0) {
    std::snprintf(line, sizeof line, "MODEL     %4d\n", model);
    os << line;
  }
  int serial = 1;
  auto atom = [&](const char* name, const char* element, int resseq, const Vec3& p) {
    std::snprintf(line, sizeof line, "ATOM  %5d %-4s %3s %c%4d    %8.3f%8.3f%8.3f%6.2f%6.2f          %2s\n",
                  serial++, name, "ALA", chain, resseq, p[0], p[1], p[2], 1.0, 0.0, element);
    os << line;
  };
  for (std::size_t i = 0; i < coords.residues.size(); ++i) {
    const Residue& r = coords.residues[i];
    const int resseq = static_cast<int>(i) + 1;
    atom(" N", "N", resseq, r.n);
    atom(" CA", "C", resseq, r.ca);
    atom(" C", "C", resseq, r.c);
    if (r.cb) atom(" CB", "C", resseq, *r.cb);
  }
  os << (model > 0 ? "ENDMDL\n" : "END\n");
}

}  // namespace pkin
