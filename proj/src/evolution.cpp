#include "fracture/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "fracture/diagnostics.hpp"
#include "fracture/error.hpp"
#include "fracture/parallel.hpp"

namespace fracture {

double eta_schedule(double eps) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (eps >= 1.0) return 0.2;
  return std::min(0.2, 1.0 / std::log(1.0 / eps));
}

namespace {

void finish_step(EvolutionTrace& trace, EvolutionStep& s, const MaterialModel& m) {
  const Triangulation& mesh = trace.mesh_of(s);
  s.increment = classify_cracked(mesh, s.u, m);
  const ModResult mod = modify_voids(mesh, s.accumulated, s.u, trace.vm);
  s.a_mod = mod.a_mod;
  s.t_mod = mod.t_mod;
  s.mod = mod.stats;
  const CrackLength len = crack_length(mesh, s.a_mod);
  s.k_length = len.raw;
  s.k_length_half = len.halved;
  s.k_components = mod.stats.n_components;
  if (!trace.steps.empty()) {
    const EvolutionStep& prev = trace.steps.back();
    s.crack_nested = prev.accumulated.subset_of(s.accumulated);
    s.tmod_nested = prev.t_mod.subset_of(s.t_mod);
  }
}

}  // namespace

EvolutionTrace run_evolution(const Domain& domain, const MeshParams& params, const MaterialModel& material,
                             const LoadProgram& load, const VoidModParams& vm, const EvolutionOptions& opts) {
  domain.validate();
  params.validate();
  material.validate();
  load.validate();
  vm.validate();
  opts.solve.validate();

  EvolutionTrace trace;
  trace.domain = domain;
  trace.params = params;
  trace.material = material;
  trace.load = load;
  trace.vm = vm;
  trace.options = opts;
  trace.meshes.push_back(std::make_shared<const Triangulation>(build_background_mesh(domain, params)));

  CrackHistory history;
  try {
    {
      const Triangulation& mesh = *trace.meshes[0];
      const double t = load.time(0);
      const DisplacementField bc = interpolate(mesh, load, t);
      const SolveResult r = minimize_step(mesh, TriangleSet{}, bc, material, opts.solve);
      EvolutionStep s;
      s.k = 0;
      s.t = t;
      s.u = r.u;
      s.accumulated = r.cracked_now;
      s.energy = static_energy(mesh, r.u, material);
      s.outer_iters = r.outer_iters;
      s.converged = r.converged;
      s.cycled = r.cycled;
      history.push(mesh, r.cracked_now);
      finish_step(trace, s, material);
      trace.steps.push_back(std::move(s));
    }
    for (int k = 1; k <= load.n_steps; ++k) {
      const double t = load.time(k);
      const EvolutionStep& prev = trace.steps.back();
      std::vector<std::shared_ptr<const Triangulation>> cands{trace.meshes[prev.mesh_index]};
      if (opts.snap_candidates) {
        const Triangulation& pm = *cands[0];
        try {
          auto snapped = std::make_shared<const Triangulation>(
              adapt_mesh(pm, history.accumulated(), hint_from_set(pm, history.accumulated())));
          if (snapped->nodes() != pm.nodes()) cands.push_back(std::move(snapped));
        } catch (const AdaptationFailed&) {
        }
      }
      std::vector<SolveResult> results(cands.size());
      const DisplacementField warm = prev.u;
      parallel_for(
          static_cast<int>(cands.size()),
          [&](int i) {
            const Triangulation& mesh = *cands[i];
            const DisplacementField bc = interpolate(mesh, load, t);
            const DisplacementField w = warm.rebind(mesh);
            results[i] = minimize_step(mesh, history, bc, material, opts.solve, &w);
          },
          opts.solve.threads);
      std::size_t bi = 0;
      for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].energy.total < results[bi].energy.total) bi = i;
      int mesh_index = prev.mesh_index;
      if (bi != 0) {
        trace.meshes.push_back(cands[bi]);
        mesh_index = static_cast<int>(trace.meshes.size()) - 1;
      }
      const SolveResult& r = results[bi];
      history.push(*cands[bi], r.cracked_now);
      EvolutionStep s;
      s.k = k;
      s.t = t;
      s.mesh_index = mesh_index;
      s.u = r.u;
      s.accumulated = history.accumulated();
      s.energy = r.energy;
      s.outer_iters = r.outer_iters;
      s.converged = r.converged;
      s.cycled = r.cycled;
      finish_step(trace, s, material);
      trace.steps.push_back(std::move(s));
    }
  } catch (const Error& e) {
    trace.aborted = true;
    trace.error = e.what();
  }
  return trace;
}

}  // namespace fracture
