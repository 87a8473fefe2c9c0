#include "fracture/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "fracture/energy.hpp"
#include "fracture/error.hpp"
#include "json.hpp"

namespace fracture {
namespace {

using nlohmann::json;

std::string num(double v) { return fmt::format("{:.17g}", v); }

json ids_json(const TriangleSet& s) { return json(s.ids); }

json rect_json(const Rect& r) { return json::array({r.x0, r.y0, r.x1, r.y1}); }

Rect rect_of(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ValidationError("rectangle needs 4 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

json stats_json(const ModStats& s) {
  return json{{"area_A", s.area_A},
              {"area_Amod", s.area_Amod},
              {"perim_Amod", s.perim_Amod},
              {"n_components", s.n_components},
              {"healed_triangle_count", s.healed_triangle_count},
              {"removed_component_count", s.removed_component_count},
              {"filled_triangle_count", s.filled_triangle_count},
              {"peeled_triangle_count", s.peeled_triangle_count},
              {"energy_in", s.energy_in},
              {"energy_out", s.energy_out},
              {"changed_area", s.changed_area},
              {"max_heal_ratio", std::isfinite(s.max_heal_ratio) ? json(s.max_heal_ratio) : json("inf")},
              {"perimeter_excess", s.perimeter_excess},
              {"c_perimeter", s.c_perimeter},
              {"c_eta", s.c_eta},
              {"c_components", s.c_components},
              {"filled_boundary_length", s.filled_boundary_length}};
}

json energy_json(const EnergyReport& e) {
  return json{{"total", e.total},
              {"elastic", e.elastic},
              {"crack", e.crack},
              {"cracked_area", e.cracked_area},
              {"n_cracked", e.n_cracked}};
}

json field_values(const DisplacementField& u) {
  json v = json::array();
  for (const Vec2& p : u.values) v.push_back({p.x, p.y});
  return v;
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("write failed for " + path);
}

Triangulation mesh_from_json(const std::string& text) {
  const json j = parse_json(text);
  try {
    std::vector<Vec2> nodes;
    for (const auto& n : j.at("nodes")) nodes.push_back({n.at(0).get<double>(), n.at(1).get<double>()});
    std::vector<std::array<int, 3>> tris;
    for (const auto& t : j.at("triangles")) tris.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
    MeshParams p;
    if (j.contains("params")) {
      const json& q = j["params"];
      p.theta0 = q.value("theta0", p.theta0);
      p.eps = q.value("eps", p.eps);
      p.omega_factor = q.value("omega_factor", p.omega_factor);
      p.bg_dist_factor = q.value("bg_dist_factor", p.bg_dist_factor);
    }
    p.validate();
    std::optional<Domain> dom;
    if (j.contains("domain")) {
      const json& d = j["domain"];
      Domain D;
      D.omega = rect_of(d.at("omega"));
      D.omega_prime = rect_of(d.at("omega_prime"));
      if (d.contains("notches"))
        for (const auto& poly : d["notches"]) {
          Polygon pg;
          for (const auto& pt : poly) pg.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
          D.notches.push_back(pg);
        }
      D.validate();
      dom = D;
    }
    std::vector<std::uint8_t> bg;
    if (j.contains("background"))
      for (const auto& b : j["background"]) bg.push_back(b.get<int>() ? 1 : 0);
    return Triangulation(std::move(nodes), std::move(tris), p, dom, std::move(bg));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid mesh JSON: ") + e.what());
  }
}

std::string mesh_to_json(const Triangulation& mesh) {
  json j;
  json nodes = json::array();
  for (const Vec2& n : mesh.nodes()) nodes.push_back({n.x, n.y});
  j["nodes"] = nodes;
  j["triangles"] = mesh.triangles();
  const MeshParams& p = mesh.params();
  j["params"] = {{"theta0", p.theta0}, {"eps", p.eps}, {"omega_factor", p.omega_factor}, {"bg_dist_factor", p.bg_dist_factor}};
  if (mesh.has_domain()) {
    const Domain& d = mesh.domain();
    json notches = json::array();
    for (const Polygon& poly : d.notches) {
      json pg = json::array();
      for (const Vec2& v : poly) pg.push_back({v.x, v.y});
      notches.push_back(pg);
    }
    j["domain"] = {{"omega", rect_json(d.omega)}, {"omega_prime", rect_json(d.omega_prime)}, {"notches", notches}};
  }
  json bg = json::array();
  for (auto b : mesh.background_mask()) bg.push_back(static_cast<int>(b));
  j["background"] = bg;
  return j.dump() + "\n";
}

Triangulation read_mesh(const std::string& path) { return mesh_from_json(read_text(path)); }

DisplacementField field_from_json(const Triangulation& mesh, const std::string& text) {
  const json j = parse_json(text);
  const json& v = j.is_object() ? j.at("values") : j;
  std::vector<Vec2> vals;
  try {
    for (const auto& p : v) vals.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid field JSON: ") + e.what());
  }
  if (static_cast<int>(vals.size()) != mesh.num_nodes())
    throw MeshFieldMismatch("field has " + std::to_string(vals.size()) + " values for " +
                            std::to_string(mesh.num_nodes()) + " nodes");
  return DisplacementField::on(mesh, std::move(vals));
}

std::string field_to_json(const DisplacementField& u) { return json{{"values", field_values(u)}}.dump() + "\n"; }

TriangleSet ids_from_text(const std::string& text) {
  std::vector<int> ids;
  std::istringstream is(text);
  std::string line;
  int ln = 0;
  while (std::getline(is, line)) {
    ++ln;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(tok, &used);
      } catch (...) {
        used = 0;
      }
      if (used != tok.size() || v < 0) throw ParseError(ln, "", "invalid triangle id '" + tok + "'");
      ids.push_back(v);
    }
  }
  return TriangleSet(std::move(ids));
}

std::string mod_result_to_json(const ModResult& r, const VoidModParams& p) {
  json j{{"eta", p.eta},
         {"heal_mode", p.heal_mode == HealMode::McShane ? "mcshane" : "elastic"},
         {"a_mod", ids_json(r.a_mod)},
         {"t_mod", ids_json(r.t_mod)},
         {"u_mod", field_values(r.u_mod)},
         {"stats", stats_json(r.stats)}};
  return j.dump(1) + "\n";
}

std::string report_to_json(const ValidationReport& r) {
  json v = json::array();
  for (const Violation& x : r.violations)
    v.push_back({{"kind", x.kind},
                 {"triangle", x.triangle},
                 {"other", x.other},
                 {"edge", x.edge},
                 {"value", x.value},
                 {"message", x.message}});
  return json{{"admissible", r.admissible()}, {"violations", v}}.dump(1) + "\n";
}

std::string energy_to_json(const EnergyReport& e) { return energy_json(e).dump(1) + "\n"; }

std::string vtu_text(const Triangulation& mesh, const VtuData& data) {
  const int nn = mesh.num_nodes(), nt = mesh.num_triangles();
  std::string s;
  s += "<?xml version=\"1.0\"?>\n";
  s += "<VTKFile type=\"UnstructuredGrid\" version=\"0.1\" byte_order=\"LittleEndian\">\n";
  s += "  <UnstructuredGrid>\n";
  s += fmt::format("    <Piece NumberOfPoints=\"{}\" NumberOfCells=\"{}\">\n", nn, nt);
  s += "      <Points>\n        <DataArray type=\"Float64\" NumberOfComponents=\"3\" format=\"ascii\">\n";
  for (const Vec2& p : mesh.nodes()) s += "          " + num(p.x) + " " + num(p.y) + " 0\n";
  s += "        </DataArray>\n      </Points>\n";
  s += "      <Cells>\n        <DataArray type=\"Int64\" Name=\"connectivity\" format=\"ascii\">\n";
  for (const auto& t : mesh.triangles()) s += fmt::format("          {} {} {}\n", t[0], t[1], t[2]);
  s += "        </DataArray>\n        <DataArray type=\"Int64\" Name=\"offsets\" format=\"ascii\">\n";
  for (int t = 0; t < nt; ++t) s += fmt::format("          {}\n", 3 * (t + 1));
  s += "        </DataArray>\n        <DataArray type=\"UInt8\" Name=\"types\" format=\"ascii\">\n";
  for (int t = 0; t < nt; ++t) s += "          5\n";
  s += "        </DataArray>\n      </Cells>\n";
  if (data.u) {
    s += "      <PointData Vectors=\"displacement\">\n";
    s += "        <DataArray type=\"Float64\" Name=\"displacement\" NumberOfComponents=\"3\" format=\"ascii\">\n";
    for (const Vec2& v : data.u->values) s += "          " + num(v.x) + " " + num(v.y) + " 0\n";
    s += "        </DataArray>\n      </PointData>\n";
  }
  s += "      <CellData>\n";
  if (data.u) {
    s += "        <DataArray type=\"Float64\" Name=\"strain_norm\" format=\"ascii\">\n";
    for (int t = 0; t < nt; ++t) {
      const Strain e = triangle_strain(mesh, *data.u, t);
      s += "          " + num(std::sqrt(e.xx * e.xx + e.yy * e.yy + 2.0 * e.xy * e.xy)) + "\n";
    }
    s += "        </DataArray>\n";
  }
  auto indicator = [&](const char* name, const TriangleSet* set) {
    s += fmt::format("        <DataArray type=\"UInt8\" Name=\"{}\" format=\"ascii\">\n", name);
    const auto m = set ? set->mask(nt) : std::vector<std::uint8_t>(nt, 0);
    for (int t = 0; t < nt; ++t) s += fmt::format("          {}\n", static_cast<int>(m[t]));
    s += "        </DataArray>\n";
  };
  indicator("crack", data.cracked);
  indicator("history", data.history);
  s += "      </CellData>\n    </Piece>\n  </UnstructuredGrid>\n</VTKFile>\n";
  return s;
}

std::string vtp_text(const Triangulation& mesh, const TriangleSet& a_mod) {
  const std::vector<int> edges = boundary_edges(mesh, a_mod);
  std::vector<int> nodes;
  for (int e : edges) {
    nodes.push_back(mesh.edge(e)[0]);
    nodes.push_back(mesh.edge(e)[1]);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  auto local = [&](int n) { return std::lower_bound(nodes.begin(), nodes.end(), n) - nodes.begin(); };
  std::string s;
  s += "<?xml version=\"1.0\"?>\n";
  s += "<VTKFile type=\"PolyData\" version=\"0.1\" byte_order=\"LittleEndian\">\n";
  s += "  <PolyData>\n";
  s += fmt::format(
      "    <Piece NumberOfPoints=\"{}\" NumberOfVerts=\"0\" NumberOfLines=\"{}\" NumberOfStrips=\"0\" "
      "NumberOfPolys=\"0\">\n",
      nodes.size(), edges.size());
  s += "      <Points>\n        <DataArray type=\"Float64\" NumberOfComponents=\"3\" format=\"ascii\">\n";
  for (int n : nodes) s += "          " + num(mesh.node(n).x) + " " + num(mesh.node(n).y) + " 0\n";
  s += "        </DataArray>\n      </Points>\n";
  s += "      <Lines>\n        <DataArray type=\"Int64\" Name=\"connectivity\" format=\"ascii\">\n";
  for (int e : edges) s += fmt::format("          {} {}\n", local(mesh.edge(e)[0]), local(mesh.edge(e)[1]));
  s += "        </DataArray>\n        <DataArray type=\"Int64\" Name=\"offsets\" format=\"ascii\">\n";
  for (std::size_t i = 0; i < edges.size(); ++i) s += fmt::format("          {}\n", 2 * (i + 1));
  s += "        </DataArray>\n      </Lines>\n    </Piece>\n  </PolyData>\n</VTKFile>\n";
  return s;
}

void export_vtu(const Triangulation& mesh, const VtuData& data, const TriangleSet& a_mod, const std::string& path) {
  write_text(path, vtu_text(mesh, data));
  std::filesystem::path p(path);
  p.replace_extension(".vtp");
  write_text(p.string(), vtp_text(mesh, a_mod));
}

std::string energies_csv(const EvolutionTrace& trace) {
  std::string s = "step,t,total,elastic,crack,cracked_area,n_cracked\n";
  for (const EvolutionStep& st : trace.steps)
    s += fmt::format("{},{},{},{},{},{},{}\n", st.k, num(st.t), num(st.energy.total), num(st.energy.elastic),
                     num(st.energy.crack), num(st.energy.cracked_area), st.energy.n_cracked);
  return s;
}

std::string balance_csv(const BalanceReport& b) {
  std::string s = "step,t,lhs,rhs,slack,rhs_left,slack_left\n";
  for (const BalanceRow& r : b.rows)
    s += fmt::format("{},{},{},{},{},{},{}\n", r.k, num(r.t), num(r.lhs), num(r.rhs), num(r.slack), num(r.rhs_left),
                     num(r.slack_left));
  return s;
}

std::string convergence_csv(const ConvergenceStudy& st) {
  std::string s = "eps,delta,crack_length,crack_length_raw,crack_energy,crack_part,elastic,max_total,beta_fit,balance_pass\n";
  for (const StudyRow& r : st.rows)
    s += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", num(r.eps), num(r.delta), num(r.crack_length),
                     num(2.0 * r.crack_length), num(r.crack_energy), num(r.crack_part), num(r.elastic_energy),
                     num(r.max_total), num(r.beta_fit), r.balance_pass ? 1 : 0);
  return s;
}

std::string trace_json(const EvolutionTrace& trace, bool with_fields) {
  const MeshParams& p = trace.params;
  json header{{"eps", p.eps},
              {"theta0", p.theta0},
              {"omega_factor", p.omega_factor},
              {"bg_dist_factor", p.bg_dist_factor},
              {"delta", trace.load.delta()},
              {"t_end", trace.load.t_end},
              {"n_steps", trace.load.n_steps},
              {"load", to_string(trace.load.kind)},
              {"load_amplitude", trace.load.amplitude},
              {"eta", trace.vm.eta},
              {"kappa", trace.material.kappa},
              {"elasticity", trace.material.elasticity},
              {"seed", trace.options.solve.seed},
              {"omega", rect_json(trace.domain.omega)},
              {"omega_prime", rect_json(trace.domain.omega_prime)}};
  json steps = json::array();
  for (const EvolutionStep& s : trace.steps) {
    json j{{"k", s.k},
           {"t", s.t},
           {"mesh", s.mesh_index},
           {"energy", energy_json(s.energy)},
           {"increment", ids_json(s.increment)},
           {"accumulated", ids_json(s.accumulated)},
           {"a_mod", ids_json(s.a_mod)},
           {"t_mod", ids_json(s.t_mod)},
           {"k_length", s.k_length},
           {"k_length_half", s.k_length_half},
           {"k_components", s.k_components},
           {"outer_iters", s.outer_iters},
           {"converged", s.converged},
           {"cycled", s.cycled},
           {"crack_nested", s.crack_nested},
           {"tmod_nested", s.tmod_nested},
           {"mod_stats", stats_json(s.mod)}};
    if (with_fields) j["u"] = field_values(s.u);
    steps.push_back(j);
  }
  json j{{"header", header}, {"steps", steps}, {"aborted", trace.aborted}, {"error", trace.error}};
  return j.dump(1) + "\n";
}

}  // namespace fracture
