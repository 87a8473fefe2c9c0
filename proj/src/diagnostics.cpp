#include "fracture/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fracture/config.hpp"
#include "fracture/error.hpp"
#include "fracture/parallel.hpp"

namespace fracture {

CrackLength crack_length(const Triangulation& mesh, const TriangleSet& a_mod) {
  CrackLength c;
  c.raw = interior_boundary_length(mesh, a_mod);
  c.halved = 0.5 * c.raw;
  return c;
}

double load_power(const Triangulation& mesh, const DisplacementField& u, const TriangleSet& cracked,
                  const MaterialModel& m, const LoadProgram& load) {
  u.check(mesh);
  const auto in = cracked.mask(mesh.num_triangles());
  double p = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double w = mesh.area_in_omega(t);
    if (in[t] || w <= 0.0) continue;
    const auto& v = mesh.triangle(t);
    const Tri x = mesh.coords(t);
    const Strain a = strain_of(x, {u.values[v[0]], u.values[v[1]], u.values[v[2]]});
    const Strain b = strain_of(x, {load.shape(x[0]), load.shape(x[1]), load.shape(x[2])});
    const double va[3] = {a.xx, a.yy, 2.0 * a.xy};
    const double vb[3] = {b.xx, b.yy, 2.0 * b.xy};
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += va[i] * m.elasticity[3 * i + j] * vb[j];
    p += w * s;
  }
  return p;
}

BalanceReport check_energy_balance(const EvolutionTrace& trace, const LoadProgram& load) {
  BalanceReport rep;
  if (trace.steps.empty()) return rep;
  std::vector<double> power;
  for (const EvolutionStep& s : trace.steps) {
    power.push_back(load_power(trace.mesh_of(s), s.u, s.accumulated, trace.material, load));
    rep.max_energy = std::max(rep.max_energy, std::abs(s.energy.total));
  }
  rep.tol_abs = 1e-6 * rep.max_energy;
  const double e0 = trace.steps.front().energy.total;
  double rhs = 0.0, rhs_left = 0.0;
  double worst = 0.0, worst_left = 0.0;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const EvolutionStep& s = trace.steps[i];
    if (i > 0) {
      const double ds = load.s(s.t) - load.s(trace.steps[i - 1].t);
      rhs += ds * (power[i - 1] + power[i]);
      rhs_left += 2.0 * ds * power[i - 1];
    }
    BalanceRow row;
    row.k = s.k;
    row.t = s.t;
    row.lhs = s.energy.total - e0;
    row.rhs = rhs;
    row.rhs_left = rhs_left;
    row.slack = row.rhs - row.lhs;
    row.slack_left = row.rhs_left - row.lhs;
    worst = std::min(worst, row.slack);
    worst_left = std::min(worst_left, row.slack_left);
    if (row.slack < -rep.tol_abs) rep.pass = false;
    rep.rows.push_back(row);
  }
  rep.beta_fit = std::max(0.0, -worst);
  rep.beta_left = std::max(0.0, -worst_left);
  return rep;
}

MinimalityReport check_unilateral_minimality(const EvolutionTrace& trace, int competitors, std::uint64_t seed,
                                             double tol_rel) {
  MinimalityReport rep;
  static constexpr double kScale[] = {1e-3, 1e-2, 1e-1};
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const EvolutionStep& s = trace.steps[i];
    const Triangulation& mesh = trace.mesh_of(s);
    const auto pins = collar_nodes(mesh);
    auto energy = [&](const DisplacementField& v) {
      if (i == 0) return static_energy(mesh, v, trace.material).total;
      return history_energy(mesh, v, trace.steps[i - 1].accumulated, trace.material).total;
    };
    const double e = energy(s.u);
    double umax = 0.0;
    for (const Vec2& v : s.u.values) umax = std::max(umax, norm(v));
    std::mt19937_64 rng(seed + 7919 * i);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int c = 0; c < competitors; ++c) {
      const double a = kScale[c % 3] * (umax + trace.params.eps);
      DisplacementField v = s.u;
      for (int n = 0; n < mesh.num_nodes(); ++n)
        if (!pins[n]) v.values[n] = v.values[n] + Vec2{a * uni(rng), a * uni(rng)};
      const double gap = e - energy(v);
      ++rep.trials;
      rep.worst_gap = std::max(rep.worst_gap, gap);
      if (gap > tol_rel * std::max(1.0, std::abs(e))) ++rep.failures;
    }
  }
  return rep;
}

ConvergenceStudy run_convergence_study(const RunConfig& base, int refinements) {
  if (refinements < 0) throw ValidationError("refinements must be nonnegative");
  std::vector<RunConfig> cells;
  RunConfig c0 = base.resolved();
  for (int r = 0; r <= refinements; ++r) {
    RunConfig c = c0;
    c.mesh.eps = c0.mesh.eps / std::pow(2.0, r);
    c.load.n_steps = c0.load.n_steps << r;
    cells.push_back(c);
  }
  const int threads = thread_count();
  ConvergenceStudy study;
  study.rows.resize(cells.size());
  parallel_for(
      static_cast<int>(cells.size()),
      [&](int i) {
        RunConfig c = cells[i];
        if (threads > 1) c.solve.threads = 1;
        const EvolutionTrace tr = run_config(c);
        StudyRow& row = study.rows[i];
        row.eps = c.mesh.eps;
        row.delta = c.load.delta();
        row.aborted = tr.aborted;
        for (const EvolutionStep& s : tr.steps) row.max_total = std::max(row.max_total, s.energy.total);
        if (!tr.steps.empty()) {
          const EvolutionStep& last = tr.steps.back();
          row.crack_length = last.k_length_half;
          row.crack_energy = c.material.kappa * std::sin(c.mesh.theta0) * last.k_length_half;
          row.crack_part = last.energy.crack;
          row.elastic_energy = last.energy.elastic;
        }
        const BalanceReport b = check_energy_balance(tr, tr.load);
        row.beta_fit = b.beta_fit;
        row.balance_pass = b.pass;
      },
      threads);
  const std::size_t n = study.rows.size();
  if (n >= 2) {
    const double a = study.rows[n - 2].crack_energy, b = study.rows[n - 1].crack_energy;
    const double scale = std::max(std::abs(a), std::abs(b));
    study.last_pair_change = scale > 0.0 ? std::abs(b - a) / std::abs(a > 0.0 ? a : scale) : 0.0;
    study.cauchy_pass = study.last_pair_change < 0.2;
  }
  double top = 0.0;
  for (const StudyRow& r : study.rows) top = std::max(top, r.max_total);
  study.energy_bound_pass = top <= 2.0 * study.rows.front().max_total + 1e-12;
  return study;
}

}  // namespace fracture
