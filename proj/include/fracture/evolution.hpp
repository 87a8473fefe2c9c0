#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fracture/energy.hpp"
#include "fracture/load.hpp"
#include "fracture/mesh.hpp"
#include "fracture/solver.hpp"
#include "fracture/voidmod.hpp"

namespace fracture {

struct EvolutionOptions {
  SolveOptions solve;
  // Also try a mesh whose nodes are snapped to the current crack bands.
  bool snap_candidates = false;
};

struct EvolutionStep {
  int k = 0;
  double t = 0.0;
  int mesh_index = 0;
  DisplacementField u;
  TriangleSet increment;    // classified cracked at u
  TriangleSet accumulated;  // all cracked triangles up to this step
  EnergyReport energy;      // static energy at k = 0, history energy afterwards
  TriangleSet a_mod;
  TriangleSet t_mod;
  ModStats mod;
  double k_length = 0.0;       // boundary length of A_mod inside the mesh
  double k_length_half = 0.0;  // one lip
  int k_components = 0;
  int outer_iters = 0;
  bool converged = false;
  bool cycled = false;
  bool crack_nested = true;  // accumulated set contains the previous one
  bool tmod_nested = true;   // kept input triangles contain the previous ones
};

struct EvolutionTrace {
  Domain domain;
  MeshParams params;
  MaterialModel material;
  LoadProgram load;
  VoidModParams vm;
  EvolutionOptions options;
  std::vector<std::shared_ptr<const Triangulation>> meshes;
  std::vector<EvolutionStep> steps;
  bool aborted = false;
  std::string error;

  const Triangulation& mesh_of(const EvolutionStep& s) const { return *meshes[s.mesh_index]; }
};

// min(0.2, 1 / log(1 / eps)); the cap applies for eps >= 1 as well.
double eta_schedule(double eps);

EvolutionTrace run_evolution(const Domain& domain, const MeshParams& params, const MaterialModel& material,
                             const LoadProgram& load, const VoidModParams& vm, const EvolutionOptions& opts);

}  // namespace fracture
