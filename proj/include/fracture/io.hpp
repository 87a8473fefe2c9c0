#pragma once

#include <string>
#include <vector>

#include "fracture/diagnostics.hpp"
#include "fracture/evolution.hpp"
#include "fracture/mesh.hpp"
#include "fracture/voidmod.hpp"

namespace fracture {

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

// {nodes, triangles, params, optional domain, optional background}
Triangulation mesh_from_json(const std::string& text);
std::string mesh_to_json(const Triangulation& mesh);
Triangulation read_mesh(const std::string& path);

// {"values": [[ux, uy], ...]} or a bare array of pairs.
DisplacementField field_from_json(const Triangulation& mesh, const std::string& text);
std::string field_to_json(const DisplacementField& u);

// Integers separated by whitespace or commas; '#' starts a comment.
TriangleSet ids_from_text(const std::string& text);

std::string mod_result_to_json(const ModResult& r, const VoidModParams& p);
std::string report_to_json(const ValidationReport& r);
std::string energy_to_json(const EnergyReport& e);

struct VtuData {
  const DisplacementField* u = nullptr;
  const TriangleSet* cracked = nullptr;
  const TriangleSet* history = nullptr;
};

// VTK XML unstructured grid: point displacement, cell strain norm and indicators.
std::string vtu_text(const Triangulation& mesh, const VtuData& data);
// VTK XML polydata with one line per boundary edge of a_mod.
std::string vtp_text(const Triangulation& mesh, const TriangleSet& a_mod);
void export_vtu(const Triangulation& mesh, const VtuData& data, const TriangleSet& a_mod, const std::string& path);

std::string energies_csv(const EvolutionTrace& trace);
std::string balance_csv(const BalanceReport& b);
std::string convergence_csv(const ConvergenceStudy& s);
std::string trace_json(const EvolutionTrace& trace, bool with_fields);

}  // namespace fracture
