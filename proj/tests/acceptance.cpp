#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fracture/config.hpp"
#include "fracture/diagnostics.hpp"
#include "fracture/io.hpp"
#include "fracture/voidmod.hpp"
#include "support.hpp"

using namespace fracture;
using namespace fracture::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

RunConfig benchmark(const std::string& name) { return load_config(std::string(FRACTURE_SOURCE_DIR) + "/configs/" + name); }


// 1: |T| >= eps sin(theta0) max edge / 2
Outcome area_bound() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> pos(0.1, 0.9), ang(0.0, std::numbers::pi), width(0.02, 0.08);
  long checked = 0, violations = 0, meshes = 0;
  for (double eps : {1.0 / 16, 1.0 / 64}) {
    const MeshParams mp = params_for(eps);
    const double side = std::floor(1.0 / mp.lattice()) * mp.lattice();
    Domain d;
    d.omega_prime = {0.0, 0.0, side, side};
    d.omega = {0.05 * side, 0.05 * side, 0.95 * side, 0.95 * side};
    const Triangulation bg = build_background_mesh(d, mp);
    long here = 0;
    while (here < 5000 && meshes < 1000) {
      StrainHint hint;
      const int nb = 1 + static_cast<int>(rng() % 3);
      for (int b = 0; b < nb; ++b) {
        const Vec2 a = Vec2{pos(rng), pos(rng)} * side;
        const double th = ang(rng);
        hint.bands.push_back({a, a + Vec2{std::cos(th), std::sin(th)} * (0.4 * side), width(rng) * side});
      }
      const Triangulation m = adapt_mesh(bg, {}, hint);
      ++meshes;
      if (!check_admissible(m).admissible()) continue;
      const double s = 0.5 * eps * std::sin(m.params().theta0);
      for (int t = 0; t < m.num_triangles() && here < 5000; ++t, ++here, ++checked) {
        const Tri x = m.coords(t);
        const double area = 0.5 * std::abs(cross(x[1] - x[0], x[2] - x[0]));
        const double lmax = std::max({norm(x[1] - x[0]), norm(x[2] - x[1]), norm(x[0] - x[2])});
        if (area < s * lmax * (1.0 - 1e-12)) ++violations;
      }
    }
  }
  return {checked >= 10000 && violations == 0,
          fmt::format("{} triangles from {} adapted meshes, {} violations", checked, meshes, violations)};
}

// 2: total == elastic + crack, checked against an independent per-triangle evaluation
Outcome energy_split() {
  const double eps = 1.0 / 32;
  const Triangulation m = unit_background(eps);
  const MaterialModel mat;
  std::mt19937 rng(202);
  std::uniform_real_distribution<double> scale(0.05, 3.0);
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const DisplacementField u = smooth_field(m, 1000 + i, scale(rng));
    const EnergyReport e = static_energy(m, u, mat);
    double elastic = 0.0, crack = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t) {
      const Tri x = m.coords(t);
      const auto& tri = m.triangle(t);
      const Vec2 d1 = x[1] - x[0], d2 = x[2] - x[0];
      const Vec2 u1 = u.values[tri[1]] - u.values[tri[0]], u2 = u.values[tri[2]] - u.values[tri[0]];
      const double det = cross(d1, d2);
      // gradient of the affine interpolant: G [d1 d2] = [u1 u2]
      const double gxx = (u1.x * d2.y - u2.x * d1.y) / det, gxy = (u2.x * d1.x - u1.x * d2.x) / det;
      const double gyx = (u1.y * d2.y - u2.y * d1.y) / det, gyy = (u2.y * d1.x - u1.y * d2.x) / det;
      const double exy = 0.5 * (gxy + gyx);
      const double q = gxx * gxx + gyy * gyy + 2.0 * exy * exy;
      if (eps * q >= mat.kappa)
        crack += mat.kappa / eps * m.area_in_omega(t);
      else
        elastic += q * m.area_in_omega(t);
    }
    const double tot = std::max(1e-300, std::abs(e.total));
    const double err = std::max({std::abs(e.total - (e.elastic + e.crack)) / tot,
                                 std::abs(e.total - (elastic + crack)) / tot});
    worst = std::max(worst, err);
    if (err > 1e-12) ++bad;
  }
  return {bad == 0, fmt::format("1000 fields, worst relative error {:.2e}", worst)};
}

// 3: Euler formula, degree sum and edge count identities
Outcome graph_identities() {
  const Triangulation m = unit_background(1.0 / 32);
  std::mt19937 rng(303);
  std::uniform_real_distribution<double> dens(0.05, 0.5);
  int bad = 0;
  for (int i = 0; i < 500; ++i) {
    const BoundaryGraph g = build_boundary_graph(m, random_density_set(m.num_triangles(), dens(rng), 3000 + i));
    if (!g.euler_holds() || !g.degree_sum_holds() || !g.edge_count_holds()) ++bad;
  }
  return {bad == 0, fmt::format("500 subsets, {} failures", bad)};
}

struct ModCollector {
  long outputs = 0;
  long filled_nonzero = 0;
  void add(const ModResult& r) {
    ++outputs;
    if (r.stats.filled_boundary_length != 0.0) ++filled_nonzero;
  }
};

// 4: sharp bound constants fitted at eps = 1/16
Outcome sharp_bound(ModCollector& col) {
  VoidModParams p;
  p.eta = 0.2;
  const std::vector<double> levels{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
  std::vector<std::array<double, 3>> worst(levels.size(), {-1e300, -1e300, -1e300});
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const Triangulation m = unit_background(levels[l]);
    for (int i = 0; i < 50; ++i) {
      const unsigned seed = 4000 + 100 * static_cast<unsigned>(l) + i;
      const ModResult r = modify_voids(m, random_crack_input(m, seed), smooth_field(m, seed, 0.5), p);
      col.add(r);
      worst[l][0] = std::max(worst[l][0], r.stats.c_perimeter);
      worst[l][1] = std::max(worst[l][1], r.stats.c_eta);
      worst[l][2] = std::max(worst[l][2], r.stats.c_components);
    }
  }
  bool pass = true;
  std::string detail;
  const char* names[] = {"C", "C_eta", "C_comp"};
  for (int k = 0; k < 3; ++k) {
    const double c = worst[0][k];
    const double allowed = c + 0.1 * std::abs(c);
    detail += fmt::format("{} fit {:.4g}, finer", names[k], c);
    for (std::size_t l = 1; l < levels.size(); ++l) {
      detail += fmt::format(" {:.4g}", worst[l][k]);
      if (worst[l][k] > allowed) pass = false;
    }
    detail += k < 2 ? "; " : "";
  }
  return {pass, detail};
}

// 5: nested inputs give nested outputs
Outcome monotonicity(ModCollector& col) {
  VoidModParams p;
  p.eta = 0.2;
  std::mt19937 rng(505);
  std::uniform_real_distribution<double> keep(0.3, 0.95);
  const std::vector<Triangulation> meshes{unit_background(1.0 / 16), unit_background(1.0 / 32),
                                          unit_background(1.0 / 64)};
  int bad = 0;
  for (int i = 0; i < 200; ++i) {
    const Triangulation& m = meshes[i % meshes.size()];
    const unsigned seed = 5000 + i;
    const TriangleSet a2 = random_crack_input(m, seed);
    const TriangleSet a1 = random_subset(a2, keep(rng), seed + 1);
    const DisplacementField u = smooth_field(m, seed, 0.5);
    const ModResult r1 = modify_voids(m, a1, u, p);
    const ModResult r2 = modify_voids(m, a2, u, p);
    col.add(r1);
    col.add(r2);
    if (!r1.a_mod.subset_of(r2.a_mod) || !r1.t_mod.subset_of(r2.t_mod)) ++bad;
  }
  return {bad == 0, fmt::format("200 pairs, {} failures", bad)};
}

// 7: multistart solver against exhaustive enumeration
Outcome tiny_oracle() {
  struct Case {
    int nx, ny;
    double pull, shear;
  };
  const std::vector<Case> cases{{6, 1, 1.2, 0.3}, {6, 1, 0.4, 0.0},  {6, 1, 2.0, -0.5}, {6, 1, 0.8, 0.8},
                                {5, 1, 1.0, 0.2}, {5, 1, 0.2, 1.5},  {4, 1, 1.5, 0.0},  {3, 2, 0.9, 0.4},
                                {3, 2, 0.3, -1.1}, {4, 1, 0.05, 0.05}};
  const MaterialModel mat;
  SolveOptions o;
  o.threads = 1;
  o.multistarts = 8;
  double worst = 0.0;
  int bad = 0;
  for (const Case& c : cases) {
    const TinyInstance inst = tiny_strip(c.nx, c.ny, 1.0 / 16, c.pull, c.shear);
    if (inst.mesh.num_triangles() > 12) return {false, "instance too large"};
    const SolveResult r = minimize_step(inst.mesh, TriangleSet{}, inst.bc, mat, o);
    const double gap = std::abs(r.energy.total - exhaustive_minimum(inst.mesh, inst.bc, mat));
    worst = std::max(worst, gap);
    if (gap > 1e-9) ++bad;
  }
  return {bad == 0, fmt::format("10 instances, worst gap {:.2e}", worst)};
}

struct LevelRun {
  double eps, beta_fit, beta_left, max_energy, floor;
  bool slack_ok, nested;
};

std::vector<LevelRun> benchmark_levels(const std::string& name) {
  const RunConfig base = benchmark(name).resolved();
  std::vector<LevelRun> out;
  for (int r = 0; r <= 2; ++r) {
    RunConfig c = base;
    c.mesh.eps = base.mesh.eps / std::pow(2.0, r);
    c.load.n_steps = base.load.n_steps << r;
    const EvolutionTrace tr = run_config(c);
    const BalanceReport b = check_energy_balance(tr, tr.load);
    bool slack_ok = !tr.aborted;
    for (const BalanceRow& row : b.rows) slack_ok = slack_ok && row.slack >= -1e-6 * b.max_energy;
    bool nested = !tr.aborted;
    for (std::size_t k = 1; k < tr.steps.size(); ++k)
      nested = nested && tr.steps[k - 1].accumulated.subset_of(tr.steps[k].accumulated) &&
               tr.steps[k - 1].t_mod.subset_of(tr.steps[k].t_mod);
    out.push_back({c.mesh.eps, b.beta_fit, b.beta_left, b.max_energy, c.solve.cg_rel_tol * b.max_energy, slack_ok, nested});
  }
  return out;
}

std::vector<std::pair<std::string, std::vector<LevelRun>>> level_cache;

const std::vector<std::pair<std::string, std::vector<LevelRun>>>& levels() {
  if (level_cache.empty())
    for (const char* n : {"affine_ramp.cfg", "notched_plate.cfg"}) level_cache.emplace_back(n, benchmark_levels(n));
  return level_cache;
}

// 8: balance slack and decrease of the deficit under refinement
Outcome balance() {
  bool pass = true;
  std::string detail;
  for (const auto& [name, runs] : levels()) {
    detail += name + ": beta_fit";
    for (const LevelRun& r : runs) detail += fmt::format(" {:.2e}", r.beta_fit);
    detail += ", beta_left";
    for (const LevelRun& r : runs) detail += fmt::format(" {:.2e}", r.beta_left);
    detail += fmt::format(", slack ok {}; ", std::all_of(runs.begin(), runs.end(), [](const LevelRun& r) { return r.slack_ok; }));
    // linear solver accuracy
    double floor = 0.0;
    for (const LevelRun& r : runs) floor = std::max(floor, r.floor);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      pass = pass && runs[i].slack_ok;
      if (i == 0) continue;
      const double prev = std::max(runs[i - 1].beta_fit, floor);
      const double cur = std::max(runs[i].beta_fit, floor);
      pass = pass && cur <= prev && runs[i].beta_left < runs[i - 1].beta_left;
    }
  }
  return {pass, detail};
}

// 9: irreversibility and nesting on the same traces
Outcome nesting() {
  int runs = 0, bad = 0;
  for (const auto& [name, rs] : levels())
    for (const LevelRun& r : rs) ++runs, bad += r.nested ? 0 : 1;
  return {bad == 0, fmt::format("{} traces, {} failures", runs, bad)};
}

// 10: Cauchy proxy on the straight crack
Outcome convergence() {
  const ConvergenceStudy s = run_convergence_study(benchmark("notched_plate.cfg"), 3);
  std::string detail = "crack energy";
  bool aborted = false;
  for (const StudyRow& r : s.rows) detail += fmt::format(" {:.6g}", r.crack_energy), aborted = aborted || r.aborted;
  detail += fmt::format(", last pair change {:.3g}", s.last_pair_change);
  return {!aborted && s.rows.size() == 4 && s.rows.back().crack_energy > 0.0 && s.cauchy_pass, detail};
}

// 11: thread count does not change the CLI outputs
Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "fracture_acceptance_det";
  fs::remove_all(root);
  const std::string cfg = std::string(FRACTURE_SOURCE_DIR) + "/configs/notched_plate.cfg";
  for (int threads : {1, 3}) {
    const std::string cmd = fmt::format("FRACTURE_THREADS={} \"{}\" simulate --config \"{}\" --out \"{}\" > /dev/null",
                                        threads, FRACTURE_CLI, cfg, (root / std::to_string(threads)).string());
    if (std::system(cmd.c_str()) != 0) return {false, "simulate exited with an error"};
  }
  bool same = true;
  for (const char* f : {"energies.csv", "balance.csv"})
    same = same && read_text((root / "1" / f).string()) == read_text((root / "3" / f).string());
  fs::remove_all(root);
  return {same, "energies.csv and balance.csv with FRACTURE_THREADS 1 and 3"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  ModCollector col;
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, area_bound},
      {2, energy_split},
      {3, graph_identities},
      {4, [&] { return sharp_bound(col); }},
      {5, [&] { return monotonicity(col); }},
      {6,
       [&] {
         return Outcome{col.outputs > 0 && col.filled_nonzero == 0,
                        fmt::format("{} outputs, {} with filled boundary length", col.outputs, col.filled_nonzero)};
       }},
      {7, tiny_oracle},
      {8, balance},
      {9, nesting},
      {10, convergence},
      {11, determinism},
  };
  const std::map<int, double> budget{{1, 5}, {2, 10}, {3, 30}, {4, 120}, {5, 60}, {6, 1e9},
                                     {7, 60}, {8, 300}, {9, 1e9}, {10, 600}, {11, 1e9}};
  bool all = true;
  for (const auto& [id, run] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= budget.at(id);
    const bool ok = o.pass && in_time;
    all = all && ok;
    fmt::print("{} criterion {}: {} ({:.1f} s{})\n", ok ? "PASS" : "FAIL", id, o.detail, secs,
               in_time ? "" : ", over time budget");
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
