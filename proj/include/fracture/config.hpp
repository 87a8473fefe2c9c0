#pragma once

#include <string>

#include "fracture/energy.hpp"
#include "fracture/evolution.hpp"
#include "fracture/load.hpp"
#include "fracture/mesh.hpp"
#include "fracture/solver.hpp"
#include "fracture/voidmod.hpp"

namespace fracture {

enum class DomainUnits { Physical, Lattice };

struct RunConfig {
  Domain domain;
  // Lattice: domain coordinates and the opening band count background cells
  // of the mesh with eps = lattice_eps (0 means eps).
  DomainUnits domain_units = DomainUnits::Physical;
  double lattice_eps = 0.0;
  MeshParams mesh;
  MaterialModel material;
  LoadProgram load;
  bool eta_auto = true;
  VoidModParams vm;
  SolveOptions solve;
  std::string output_dir = "out";
  bool export_vtu = false;
  bool export_fields = false;
  bool snap_candidates = false;

  // Physical units with lattice_eps pinned, so refining eps keeps the geometry.
  RunConfig resolved() const;
  VoidModParams void_params() const;
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Every key in a fixed order.
std::string serialize_config(const RunConfig& c);

EvolutionTrace run_config(const RunConfig& c);

}  // namespace fracture
