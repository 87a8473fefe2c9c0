#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fracture/error.hpp"
#include "fracture/load.hpp"
#include "fracture/solver.hpp"
#include "support.hpp"

using namespace fracture;
using namespace fracture::testing;

namespace {

// Ω = [h, (nx-1)h] x [h, (ny-1)h] inside a grid, so every triangle is collar or fully inside Ω.
Triangulation framed_grid(int nx, int ny, double eps) {
  const MeshParams p = params_for(eps);
  const double h = p.lattice();
  Domain d;
  d.omega_prime = {0, 0, nx * h, ny * h};
  d.omega = {h, h, (nx - 1) * h, (ny - 1) * h};
  return grid_mesh(nx, ny, h, p, d);
}

LoadProgram affine_load(double a00, double a01, double a10, double a11) {
  LoadProgram g;
  g.kind = LoadKind::Stretch;
  g.amplitude = 1.0;
  g.matrix = {a00, a01, a10, a11};
  return g;
}

SolveOptions single_thread() {
  SolveOptions o;
  o.threads = 1;
  return o;
}

}  // namespace

TEST(SolveElastic, AffineBoundaryDataGivesAffineSolution) {
  const Triangulation m = framed_grid(10, 8, 1.0 / 16);
  const DisplacementField bc = interpolate(m, affine_load(0.2, -0.1, 0.3, 0.05), 1.0);
  const ElasticSolution s = solve_elastic_detailed(m, {}, bc, MaterialModel{}, single_thread());
  double err = 0.0, scale = 0.0;
  for (int a = 0; a < m.num_nodes(); ++a) {
    err = std::max(err, norm(s.u.values[a] - bc.values[a]));
    scale = std::max(scale, norm(bc.values[a]));
  }
  EXPECT_LT(err, 1e-9 * scale);
  EXPECT_LE(s.residual, 1e-10 * s.load_norm);
}

TEST(SolveElastic, ZeroDataGivesZero) {
  const Triangulation m = framed_grid(6, 6, 1.0 / 16);
  const DisplacementField u = solve_elastic(m, {}, DisplacementField::zeros(m), MaterialModel{}, single_thread());
  for (const Vec2& v : u.values) EXPECT_EQ(v, (Vec2{0, 0}));
}

TEST(SolveElastic, UniaxialStripEnergy) {
  const double eps = 1.0 / 16;
  const MeshParams p = params_for(eps);
  const double h = p.lattice();
  const int nx = 12, ny = 3;
  Domain d;
  d.omega_prime = {-h, 0, (nx - 1) * h, ny * h};
  d.omega = {0, 0, (nx - 2) * h, ny * h};
  const Triangulation m = grid_mesh(nx, ny, h, p, d, {-h, 0});
  const double L = (nx - 2) * h, H = ny * h, delta = 0.013;
  std::vector<Vec2> v(m.num_nodes());
  for (int a = 0; a < m.num_nodes(); ++a) v[a] = {delta * m.node(a).x / L, 0.0};
  const DisplacementField bc = DisplacementField::on(m, v);
  // the interior values are perturbed and must be recovered
  std::vector<Vec2> start(m.num_nodes(), Vec2{0.01, -0.02});
  const DisplacementField warm = DisplacementField::on(m, start);
  const DisplacementField u = solve_elastic(m, {}, bc, MaterialModel{}, single_thread(), &warm);
  const EnergyReport e = static_energy(m, u, MaterialModel{});
  EXPECT_NEAR(e.total, delta * delta * H / L, 1e-8 * delta * delta * H / L);
}

TEST(SolveElastic, ResidualWithinTolerance) {
  const Triangulation m = framed_grid(12, 12, 1.0 / 16);
  const DisplacementField bc = smooth_field(m, 3, 0.2);
  MaterialModel mat;
  mat.elasticity = {2.0, 0.6, 0.0, 0.6, 1.5, 0.1, 0.0, 0.1, 0.7};
  SolveOptions o = single_thread();
  o.cg_rel_tol = 1e-9;
  const TriangleSet inactive{30, 31, 52, 75, 76, 77};
  const ElasticSolution s = solve_elastic_detailed(m, inactive, bc, mat, o);
  EXPECT_LE(s.residual, o.cg_rel_tol * s.load_norm * (1 + 1e-9));
  for (int a = 0; a < m.num_nodes(); ++a)
    if (collar_nodes(m)[a]) EXPECT_EQ(s.u.values[a], bc.values[a]);
}

TEST(SolveElastic, FloatingComponentIsZeroed) {
  // a single free triangle cut off by cracks has no pinned node
  const double eps = 1.0 / 16;
  const Triangulation m = framed_grid(8, 8, eps);
  const int nx = 8;
  TriangleSet ring;
  for (int t = 0; t < m.num_triangles(); ++t) ring.ids.push_back(t);
  ring = TriangleSet(ring.ids).minus({lower_tri(nx, 4, 4)});
  const DisplacementField bc = smooth_field(m, 4, 0.3);
  std::vector<Vec2> w(m.num_nodes(), Vec2{5, 5});
  const DisplacementField warm = DisplacementField::on(m, w);
  const DisplacementField u = solve_elastic(m, ring, bc, MaterialModel{}, single_thread(), &warm);
  for (int v : m.triangle(lower_tri(nx, 4, 4))) EXPECT_EQ(u.values[v], (Vec2{0, 0}));
}

TEST(MinimizeStep, SubCriticalLoadIsElastic) {
  const Triangulation m = framed_grid(10, 10, 1.0 / 16);
  const DisplacementField bc = interpolate(m, affine_load(0.3, 0.1, -0.2, 0.4), 1.0);
  MaterialModel mat;
  const TriangleSet hist{44, 45};
  const SolveResult r = minimize_step(m, hist, bc, mat, single_thread());
  EXPECT_EQ(r.cracked_now, hist);
  const DisplacementField el = solve_elastic(m, hist, bc, mat, single_thread());
  for (int a = 0; a < m.num_nodes(); ++a) EXPECT_LT(norm(r.u.values[a] - el.values[a]), 1e-9);
  EXPECT_TRUE(r.converged);
}

TEST(MinimizeStep, FullHistory) {
  const Triangulation m = framed_grid(6, 6, 1.0 / 16);
  std::vector<int> all;
  for (int t = 0; t < m.num_triangles(); ++t) all.push_back(t);
  MaterialModel mat;
  const SolveResult r = minimize_step(m, TriangleSet(all), smooth_field(m, 2), mat, single_thread());
  double area = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) area += m.area(t);
  EXPECT_EQ(r.energy.elastic, 0.0);
  EXPECT_NEAR(r.energy.total, mat.kappa * area / m.params().eps, 1e-12 * r.energy.total);
}

TEST(MinimizeStep, EightTriangleStripMatchesExhaustiveSearch) {
  // 6 x 1 cells with collar columns at both ends: 8 free triangles, 256 patterns
  const TinyInstance inst = tiny_strip(6, 1, 1.0 / 16, 1.2, 0.3);
  MaterialModel mat;
  SolveOptions o = single_thread();
  o.multistarts = 8;
  const SolveResult r = minimize_step(inst.mesh, TriangleSet{}, inst.bc, mat, o);
  const double oracle = exhaustive_minimum(inst.mesh, inst.bc, mat);
  EXPECT_NEAR(r.energy.total, oracle, 1e-9);
  EXPECT_FALSE(r.cracked_now.empty());
}

TEST(MinimizeStep, OuterEnergiesDecrease) {
  const Triangulation m = framed_grid(14, 10, 1.0 / 32);
  const DisplacementField bc = smooth_field(m, 12, 1.2);
  MaterialModel mat;
  SolveOptions o = single_thread();
  o.multistarts = 1;
  o.local_search = 0;
  const SolveResult r = minimize_step(m, TriangleSet{}, bc, mat, o);
  ASSERT_FALSE(r.outer_energies.empty());
  for (std::size_t i = 1; i < r.outer_energies.size(); ++i)
    EXPECT_LE(r.outer_energies[i], r.outer_energies[i - 1] + 1e-12 * std::abs(r.outer_energies[i - 1]));
}

TEST(MinimizeStep, FixedPointSelfConsistency) {
  const Triangulation m = framed_grid(14, 10, 1.0 / 32);
  MaterialModel mat;
  for (unsigned seed = 0; seed < 5; ++seed) {
    const DisplacementField bc = smooth_field(m, 40 + seed, 1.0 + seed * 0.3);
    const TriangleSet hist = random_density_set(m.num_triangles(), 0.03, seed);
    const SolveResult r = minimize_step(m, hist, bc, mat, single_thread());
    EXPECT_TRUE(classify_cracked(m, r.u, mat).subset_of(hist.unite(r.cracked_now)));
    EXPECT_TRUE(hist.subset_of(r.cracked_now));
  }
}

TEST(MinimizeStep, ThreadCountDoesNotChangeResult) {
  const Triangulation m = framed_grid(14, 10, 1.0 / 32);
  const DisplacementField bc = smooth_field(m, 77, 1.6);
  MaterialModel mat;
  SolveOptions a = single_thread(), b = single_thread();
  b.threads = 3;
  const SolveResult ra = minimize_step(m, TriangleSet{}, bc, mat, a);
  const SolveResult rb = minimize_step(m, TriangleSet{}, bc, mat, b);
  EXPECT_EQ(ra.energy.total, rb.energy.total);
  EXPECT_EQ(ra.cracked_now, rb.cracked_now);
  EXPECT_EQ(ra.u.values, rb.u.values);
}

TEST(SolveOptions, Validation) {
  SolveOptions o;
  o.multistarts = 0;
  EXPECT_THROW(o.validate(), ValidationError);
  o = SolveOptions{};
  o.cg_rel_tol = 0;
  EXPECT_THROW(o.validate(), ValidationError);
}

TEST(MatrixMarket, WritesSymmetricSystem) {
  const Triangulation m = framed_grid(5, 5, 1.0 / 16);
  const auto path = std::filesystem::temp_directory_path() / "fracture_test_k.mtx";
  write_matrix_market(m, {}, MaterialModel{}, path.string());
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "%%MatrixMarket matrix coordinate real general");
  int rows = 0, cols = 0, nnz = 0;
  is >> rows >> cols >> nnz;
  EXPECT_EQ(rows, cols);
  EXPECT_GT(nnz, 0);
  std::filesystem::remove(path);
}
