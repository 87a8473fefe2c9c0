#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "fracture/energy.hpp"
#include "fracture/mesh.hpp"
#include "fracture/solver.hpp"
#include "fracture/triangle_set.hpp"

namespace fracture::testing {

inline MeshParams params_for(double eps, double omega_factor = 6.0) {
  MeshParams p;
  p.eps = eps;
  p.omega_factor = omega_factor;
  return p;
}

// Structured nx x ny grid of spacing h, cells cut along the "/" diagonal.
// Triangle 2 (j nx + i) is the lower half of cell (i, j), the next one the upper half.
inline Triangulation grid_mesh(int nx, int ny, double h, const MeshParams& p, std::optional<Domain> d = std::nullopt,
                               Vec2 origin = {0.0, 0.0}, double jitter = 0.0, unsigned seed = 1) {
  std::vector<Vec2> nodes;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      Vec2 x{origin.x + i * h, origin.y + j * h};
      if (jitter > 0.0 && i > 0 && i < nx && j > 0 && j < ny) x = x + Vec2{jitter * h * uni(rng), jitter * h * uni(rng)};
      nodes.push_back(x);
    }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return Triangulation(std::move(nodes), std::move(tris), p, d);
}

inline int lower_tri(int nx, int i, int j) { return 2 * (j * nx + i); }
inline int upper_tri(int nx, int i, int j) { return 2 * (j * nx + i) + 1; }

// Background mesh of the unit square with a thin body margin.
inline Triangulation unit_background(double eps, double omega_factor = 6.0) {
  Domain d;
  d.omega_prime = {0.0, 0.0, 1.0, 1.0};
  d.omega = {0.05, 0.05, 0.95, 0.95};
  return build_background_mesh(d, params_for(eps, omega_factor));
}

inline DisplacementField smooth_field(const Triangulation& mesh, unsigned seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double a = uni(rng), b = uni(rng), c = uni(rng), d = uni(rng);
  const double k1 = 1.0 + 3.0 * std::abs(uni(rng)), k2 = 1.0 + 3.0 * std::abs(uni(rng));
  std::vector<Vec2> v;
  for (const Vec2& x : mesh.nodes())
    v.push_back(Vec2{a * x.x + b * x.y + 0.2 * std::sin(k1 * x.y), c * x.x + d * x.y + 0.2 * std::cos(k2 * x.x)} *
                scale);
  return DisplacementField::on(mesh, std::move(v));
}

// Crack-like void set with total area of order eps: a few smooth curves
// thickened to about one cell, small debris clusters and rings.
inline TriangleSet random_crack_input(const Triangulation& mesh, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double h = mesh.params().lattice();
  std::vector<std::uint8_t> in(mesh.num_triangles(), 0);
  const int curves = 1 + static_cast<int>(uni(rng) * 3.0);
  for (int c = 0; c < curves; ++c) {
    Vec2 p{0.15 + 0.7 * uni(rng), 0.15 + 0.7 * uni(rng)};
    double ang = 2.0 * std::numbers::pi * uni(rng);
    const double bend = (uni(rng) - 0.5) * 4.0;
    const double len = 0.15 + 0.45 * uni(rng);
    const double width = (0.45 + 0.5 * uni(rng)) * h;
    std::vector<Vec2> pts{p};
    const int n = 200;
    for (int k = 0; k < n; ++k) {
      ang += bend * len / n;
      p = p + Vec2{std::cos(ang), std::sin(ang)} * (len / n);
      pts.push_back(p);
    }
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const Vec2 x = mesh.centroid(t);
      for (std::size_t k = 1; k < pts.size(); ++k)
        if (point_segment_distance(x, pts[k - 1], pts[k]) <= width) {
          in[t] = 1;
          break;
        }
    }
  }
  const double debris_density = 0.3 * uni(rng);
  const int debris = static_cast<int>(debris_density / mesh.params().eps);
  for (int k = 0; k < debris; ++k) {
    const int t = static_cast<int>(uni(rng) * mesh.num_triangles()) % mesh.num_triangles();
    in[t] = 1;
    if (uni(rng) < 0.3) {
      const int e = mesh.triangle_edges(t)[static_cast<int>(uni(rng) * 3.0) % 3];
      for (int o : mesh.edge_triangles(e))
        if (o >= 0) in[o] = 1;
    }
    if (uni(rng) < 0.1) {
      const int v = mesh.triangle(t)[0];
      for (int o : mesh.node_triangles(v)) in[o] = 1;
      in[t] = 0;
      for (int o : mesh.node_triangles(v))
        if (o != t) in[o] = 1;
    }
  }
  return TriangleSet::from_mask(in);
}

inline TriangleSet random_subset(const TriangleSet& s, double keep, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(keep);
  TriangleSet r;
  for (int t : s.ids)
    if (coin(rng)) r.ids.push_back(t);
  return r;
}

inline TriangleSet random_density_set(int n_triangles, double density, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(density);
  TriangleSet r;
  for (int t = 0; t < n_triangles; ++t)
    if (coin(rng)) r.ids.push_back(t);
  return r;
}

// Strip of nx by ny cells whose first and last columns are collar. The left
// collar is held at zero and the right one is translated by (pull, shear).
struct TinyInstance {
  Triangulation mesh;
  DisplacementField bc;
};

inline TinyInstance tiny_strip(int nx, int ny, double eps, double pull, double shear) {
  const MeshParams p = params_for(eps);
  const double h = p.lattice();
  Domain d;
  d.omega_prime = {0.0, 0.0, nx * h, ny * h};
  d.omega = {h, 0.0, (nx - 1) * h, ny * h};
  Triangulation m = grid_mesh(nx, ny, h, p, d);
  std::vector<Vec2> v(m.num_nodes());
  for (int a = 0; a < m.num_nodes(); ++a)
    if (m.node(a).x > (nx - 1.5) * h) v[a] = {pull, shear};
  DisplacementField bc = DisplacementField::on(m, std::move(v));
  return {std::move(m), std::move(bc)};
}

// Minimum over all crack patterns of the history energy of the elastic solution.
inline double exhaustive_minimum(const Triangulation& mesh, const DisplacementField& bc, const MaterialModel& mat) {
  std::vector<int> cand;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    if (mesh.area_in_omega(t) > 0.0) cand.push_back(t);
  const auto pins = collar_nodes(mesh);
  SolveOptions o;
  o.cg_rel_tol = 1e-13;
  o.threads = 1;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t bits = 0; bits < (1u << cand.size()); ++bits) {
    std::vector<int> s;
    for (std::size_t i = 0; i < cand.size(); ++i)
      if (bits >> i & 1u) s.push_back(cand[i]);
    const DisplacementField u = solve_elastic(mesh, TriangleSet(s), bc, mat, o, nullptr, &pins);
    best = std::min(best, history_energy(mesh, u, TriangleSet{}, mat).total);
  }
  return best;
}

}  // namespace fracture::testing
