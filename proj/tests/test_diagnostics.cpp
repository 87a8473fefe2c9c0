#include <gtest/gtest.h>

#include <cmath>

#include "fracture/config.hpp"
#include "fracture/diagnostics.hpp"
#include "fracture/error.hpp"
#include "fracture/solver.hpp"
#include "support.hpp"

using namespace fracture;
using namespace fracture::testing;

namespace {

RunConfig benchmark(const std::string& name) { return load_config(std::string(FRACTURE_SOURCE_DIR) + "/configs/" + name); }

constexpr int kN = 20;

const Triangulation& grid() {
  static const Triangulation m = [] {
    const MeshParams p = params_for(1.0 / 16);
    return grid_mesh(kN, kN, p.lattice(), p);
  }();
  return m;
}

TriangleSet cells(int i0, int j0, int i1, int j1) {
  std::vector<int> v;
  for (int j = j0; j < j1; ++j)
    for (int i = i0; i < i1; ++i) v.push_back(lower_tri(kN, i, j)), v.push_back(upper_tri(kN, i, j));
  return TriangleSet(v);
}

}  // namespace

TEST(CrackLength, EmptySet) {
  const CrackLength c = crack_length(grid(), {});
  EXPECT_EQ(c.raw, 0.0);
  EXPECT_EQ(c.halved, 0.0);
}

TEST(CrackLength, SingleTriangleIsItsPerimeter) {
  const Triangulation& m = grid();
  const int t = lower_tri(kN, 5, 5);
  const Tri x = m.coords(t);
  const double perim = norm(x[1] - x[0]) + norm(x[2] - x[1]) + norm(x[0] - x[2]);
  const CrackLength c = crack_length(m, {t});
  EXPECT_NEAR(c.raw, perim, 1e-15);
  EXPECT_NEAR(c.halved, 0.5 * perim, 1e-15);
}

TEST(CrackLength, BandOfHalfSquares) {
  const Triangulation& m = grid();
  const double h = m.params().lattice();
  for (int n : {1, 3, 10}) {
    // n cells in a row: two long sides of n legs and two end legs
    const CrackLength c = crack_length(m, cells(4, 8, 4 + n, 9));
    EXPECT_NEAR(c.raw, 2.0 * n * h + 2.0 * h, 1e-13);
    EXPECT_NEAR(c.halved, n * h + h, 1e-13);
  }
}

TEST(CrackLength, MeshBoundaryEdgesExcluded) {
  const Triangulation& m = grid();
  const double h = m.params().lattice();
  // a full-width band touches the mesh boundary at both ends
  const CrackLength c = crack_length(m, cells(0, 8, kN, 9));
  EXPECT_NEAR(c.raw, 2.0 * kN * h, 1e-12);
}

TEST(CrackLength, AdditiveOverDisjointComponents) {
  const Triangulation& m = grid();
  for (unsigned s = 0; s < 20; ++s) {
    const TriangleSet a = random_density_set(m.num_triangles(), 0.2, s);
    const auto comps = vertex_components(m, a);
    double sum = 0.0;
    for (const TriangleSet& c : comps) sum += crack_length(m, c).raw;
    EXPECT_NEAR(crack_length(m, a).raw, sum, 1e-12 * sum);
  }
}

TEST(Balance, ZeroLoad) {
  RunConfig c = benchmark("affine_ramp.cfg");
  c.load.kind = LoadKind::Zero;
  const EvolutionTrace tr = run_config(c);
  const BalanceReport b = check_energy_balance(tr, tr.load);
  for (const BalanceRow& r : b.rows) {
    EXPECT_EQ(r.lhs, 0.0);
    EXPECT_EQ(r.rhs, 0.0);
  }
  EXPECT_TRUE(b.pass);
}

TEST(Balance, AffineRampIsQuadraticInTime) {
  const RunConfig c = benchmark("affine_ramp.cfg");
  const EvolutionTrace tr = run_config(c);
  ASSERT_FALSE(tr.aborted);
  const RunConfig r = c.resolved();
  const Triangulation& m = *tr.meshes[0];
  const DisplacementField u1 = solve_elastic(m, {}, interpolate(m, r.load, 1.0), r.material, r.solve);
  const double e1 = static_energy(m, u1, r.material).elastic;
  // the affine extension is a competitor: e1 <= |Ω| |sym(amplitude A)|²
  const auto& A = r.load.matrix;
  const double a = r.load.amplitude;
  const double e11 = a * A[0], e22 = a * A[3], e12 = 0.5 * a * (A[1] + A[2]);
  const double q = r.domain.omega.area() * (e11 * e11 + e22 * e22 + 2 * e12 * e12);
  EXPECT_GT(e1, 0.0);
  EXPECT_LE(e1, q * (1 + 1e-12));
  const BalanceReport b = check_energy_balance(tr, tr.load);
  ASSERT_EQ(b.rows.size(), tr.steps.size());
  for (const BalanceRow& row : b.rows) {
    EXPECT_NEAR(row.lhs, row.t * row.t * e1, 1e-8 * e1);
    EXPECT_NEAR(row.rhs, row.t * row.t * e1, 1e-8 * e1);
    EXPECT_NEAR(row.slack, 0.0, 1e-8 * e1);
  }
  EXPECT_TRUE(b.pass);
}

TEST(Balance, CrackingRunHasNonnegativeSlack) {
  const RunConfig c = benchmark("notched_plate.cfg");
  const EvolutionTrace tr = run_config(c);
  ASSERT_FALSE(tr.aborted);
  ASSERT_FALSE(tr.steps.back().accumulated.empty());
  const BalanceReport b = check_energy_balance(tr, tr.load);
  for (const BalanceRow& row : b.rows) EXPECT_GE(row.slack, -b.tol_abs) << row.k;
  EXPECT_TRUE(b.pass);
}

TEST(LoadPower, AffineFieldGivesQuadraticForm) {
  const Triangulation& m = grid();
  LoadProgram g;
  g.kind = LoadKind::Stretch;
  g.amplitude = 2.0;
  g.matrix = {0.5, 0.1, 0.3, -0.2};
  const DisplacementField u = interpolate(m, g, 0.75);
  double area = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) area += m.area(t);
  const double e11 = 1.0, e22 = -0.4, e12 = 0.4;
  const double expected = 0.75 * area * (e11 * e11 + e22 * e22 + 2 * e12 * e12);
  EXPECT_NEAR(load_power(m, u, {}, MaterialModel{}, g), expected, 1e-12 * expected);
  const TriangleSet cut = cells(2, 2, 5, 5);
  const double reduced = expected * (1.0 - set_area(m, cut) / area);
  EXPECT_NEAR(load_power(m, u, cut, MaterialModel{}, g), reduced, 1e-12 * expected);
}

TEST(ConvergenceStudy, NoRefinementGivesOneRow) {
  const ConvergenceStudy s = run_convergence_study(benchmark("affine_ramp.cfg"), 0);
  EXPECT_EQ(s.rows.size(), 1u);
  EXPECT_TRUE(s.cauchy_pass);
  EXPECT_THROW(run_convergence_study(benchmark("affine_ramp.cfg"), -1), ValidationError);
}

TEST(ConvergenceStudy, UncrackedRampHasZeroCrackColumns) {
  const ConvergenceStudy s = run_convergence_study(benchmark("affine_ramp.cfg"), 2);
  ASSERT_EQ(s.rows.size(), 3u);
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    EXPECT_EQ(s.rows[i].crack_length, 0.0);
    EXPECT_EQ(s.rows[i].crack_energy, 0.0);
    EXPECT_EQ(s.rows[i].crack_part, 0.0);
    EXPECT_DOUBLE_EQ(s.rows[i].eps, 0.0625 / (1 << i));
    EXPECT_DOUBLE_EQ(s.rows[i].delta, 0.125 / (1 << i));
    EXPECT_TRUE(s.rows[i].balance_pass);
  }
  // nested conforming spaces: the discrete elastic energy decreases under refinement
  for (std::size_t i = 1; i < s.rows.size(); ++i) {
    EXPECT_LT(s.rows[i].elastic_energy, s.rows[i - 1].elastic_energy);
    EXPECT_GT(s.rows[i].elastic_energy, 0.85 * s.rows[i - 1].elastic_energy);
  }
  EXPECT_TRUE(s.cauchy_pass);
  EXPECT_TRUE(s.energy_bound_pass);
}
