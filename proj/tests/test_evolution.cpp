#include <gtest/gtest.h>

#include <cmath>

#include "fracture/config.hpp"
#include "fracture/diagnostics.hpp"
#include "fracture/error.hpp"
#include "fracture/evolution.hpp"
#include "support.hpp"

using namespace fracture;
using namespace fracture::testing;

namespace {

RunConfig benchmark(const std::string& name) { return load_config(std::string(FRACTURE_SOURCE_DIR) + "/configs/" + name); }

void expect_nested(const EvolutionTrace& tr) {
  for (std::size_t k = 1; k < tr.steps.size(); ++k) {
    EXPECT_TRUE(tr.steps[k - 1].accumulated.subset_of(tr.steps[k].accumulated)) << k;
    EXPECT_TRUE(tr.steps[k - 1].t_mod.subset_of(tr.steps[k].t_mod)) << k;
    EXPECT_TRUE(tr.steps[k].crack_nested);
    EXPECT_TRUE(tr.steps[k].tmod_nested);
  }
}

}  // namespace

TEST(EtaSchedule, Values) {
  EXPECT_DOUBLE_EQ(eta_schedule(1.0 / 16), 0.2);
  EXPECT_NEAR(eta_schedule(std::exp(-10.0)), 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(eta_schedule(2.0), 0.2);
  EXPECT_THROW(eta_schedule(0.0), Error);
  for (double e = 0.5; e > 1e-12; e /= 2) EXPECT_LE(eta_schedule(e / 2), eta_schedule(e));
}

TEST(Evolution, ZeroLoad) {
  RunConfig c = benchmark("affine_ramp.cfg");
  c.load.kind = LoadKind::Zero;
  const EvolutionTrace tr = run_config(c);
  ASSERT_FALSE(tr.aborted) << tr.error;
  ASSERT_EQ(tr.steps.size(), static_cast<std::size_t>(c.load.n_steps + 1));
  for (const EvolutionStep& s : tr.steps) {
    EXPECT_TRUE(s.accumulated.empty());
    EXPECT_EQ(s.energy.total, 0.0);
    for (const Vec2& v : s.u.values) EXPECT_EQ(v, (Vec2{0, 0}));
  }
}

TEST(Evolution, SubCriticalRampIsElastic) {
  const RunConfig c = benchmark("affine_ramp.cfg");
  const EvolutionTrace tr = run_config(c);
  ASSERT_FALSE(tr.aborted) << tr.error;
  const RunConfig r = c.resolved();
  for (const EvolutionStep& s : tr.steps) {
    EXPECT_TRUE(s.accumulated.empty());
    const Triangulation& m = tr.mesh_of(s);
    const DisplacementField bc = interpolate(m, r.load, s.t);
    const DisplacementField el = solve_elastic(m, {}, bc, r.material, r.solve);
    const double expected = static_energy(m, el, r.material).elastic;
    EXPECT_NEAR(s.energy.elastic, expected, 1e-9 * std::max(1.0, expected));
    EXPECT_TRUE(s.a_mod.empty());
  }
}

TEST(Evolution, NotchedPlateCrackGrowsFromNotch) {
  RunConfig c = benchmark("notched_plate.cfg");
  c.mesh.eps = 1.0 / 32;
  c.load.n_steps = 20;
  const EvolutionTrace tr = run_config(c);
  ASSERT_FALSE(tr.aborted) << tr.error;
  expect_nested(tr);
  const EvolutionStep& last = tr.steps.back();
  ASSERT_FALSE(last.accumulated.empty());
  // the crack starts at the notch tip and stays in the notch band
  const RunConfig r = c.resolved();
  const Polygon& notch = r.domain.notches[0];
  double tip_x = 0.0, y_lo = 1e9, y_hi = -1e9;
  for (const Vec2& p : notch) tip_x = std::max(tip_x, p.x), y_lo = std::min(y_lo, p.y), y_hi = std::max(y_hi, p.y);
  const double h = tr.meshes[0]->params().lattice();
  const Triangulation& m = tr.mesh_of(last);
  std::size_t first = 0;
  while (tr.steps[first].accumulated.empty()) ++first;
  double dmin = 1e9;
  for (int t : tr.steps[first].accumulated.ids) dmin = std::min(dmin, norm(m.centroid(t) - Vec2{tip_x, 0.5 * (y_lo + y_hi)}));
  EXPECT_LT(dmin, 3 * h);
  for (int t : last.accumulated.ids) {
    const Vec2 x = m.centroid(t);
    EXPECT_GT(x.y, y_lo - 4 * h);
    EXPECT_LT(x.y, y_hi + 4 * h);
  }
  EXPECT_GT(last.k_length_half, 0.0);
  const BalanceReport bal = check_energy_balance(tr, tr.load);
  EXPECT_TRUE(bal.pass);
}

TEST(Evolution, UnilateralMinimalitySpotCheck) {
  const RunConfig c = benchmark("notched_plate.cfg");
  const EvolutionTrace tr = run_config(c);
  ASSERT_FALSE(tr.aborted) << tr.error;
  const MinimalityReport rep = check_unilateral_minimality(tr, 50, 99);
  EXPECT_EQ(rep.trials, 50 * static_cast<int>(tr.steps.size()));
  EXPECT_EQ(rep.failures, 0) << rep.worst_gap;
}

TEST(Evolution, IdenticalAcrossThreadCounts) {
  RunConfig c = benchmark("notched_plate.cfg");
  c.solve.threads = 1;
  const EvolutionTrace a = run_config(c);
  c.solve.threads = 3;
  const EvolutionTrace b = run_config(c);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t k = 0; k < a.steps.size(); ++k) {
    EXPECT_EQ(a.steps[k].energy.total, b.steps[k].energy.total);
    EXPECT_EQ(a.steps[k].accumulated, b.steps[k].accumulated);
    EXPECT_EQ(a.steps[k].u.values, b.steps[k].u.values);
  }
}

TEST(Evolution, SnapCandidatesKeepInvariants) {
  RunConfig c = benchmark("notched_plate.cfg");
  c.snap_candidates = true;
  const EvolutionTrace tr = run_config(c);
  ASSERT_FALSE(tr.aborted) << tr.error;
  expect_nested(tr);
  for (const auto& m : tr.meshes) EXPECT_TRUE(check_admissible(*m).admissible());
  // a snapped candidate is only taken when it lowers the energy
  RunConfig plain = benchmark("notched_plate.cfg");
  const EvolutionTrace base = run_config(plain);
  EXPECT_LE(tr.steps.back().energy.total, base.steps.back().energy.total * (1 + 1e-9) + 1e-12);
}
