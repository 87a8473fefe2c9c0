#include <filesystem>
#include <iostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "fracture/config.hpp"
#include "fracture/diagnostics.hpp"
#include "fracture/error.hpp"
#include "fracture/io.hpp"

using namespace fracture;

namespace {

int simulate(const std::string& config_path, const std::string& out_override) {
  RunConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  const EvolutionTrace trace = run_config(cfg);
  const std::filesystem::path dir(cfg.output_dir);
  write_text((dir / "energies.csv").string(), energies_csv(trace));
  write_text((dir / "trace.json").string(), trace_json(trace, cfg.export_fields));
  const BalanceReport bal = check_energy_balance(trace, trace.load);
  write_text((dir / "balance.csv").string(), balance_csv(bal));
  if (cfg.export_vtu)
    for (const EvolutionStep& s : trace.steps) {
      const VtuData data{&s.u, &s.increment, &s.accumulated};
      export_vtu(trace.mesh_of(s), data, s.a_mod, (dir / fmt::format("step_{:04d}.vtu", s.k)).string());
    }
  bool nested = true;
  for (const EvolutionStep& s : trace.steps) nested = nested && s.crack_nested && s.tmod_nested;
  const EvolutionStep* last = trace.steps.empty() ? nullptr : &trace.steps.back();
  fmt::print("steps {}  final energy {:.6g}  crack length {:.6g}  balance {}  nesting {}\n", trace.steps.size(),
             last ? last->energy.total : 0.0, last ? last->k_length_half : 0.0, bal.pass ? "ok" : "FAILED",
             nested ? "ok" : "FAILED");
  if (trace.aborted) {
    std::cerr << "run aborted: " << trace.error << "\n";
    return 2;
  }
  return bal.pass && nested ? 0 : 3;
}

int voidmod(const std::string& mesh_path, const std::string& set_path, const std::string& field_path, double eta,
            const std::string& heal, const std::string& out, const std::string& vtu) {
  const Triangulation mesh = read_mesh(mesh_path);
  const TriangleSet a = ids_from_text(read_text(set_path));
  for (int t : a.ids)
    if (t >= mesh.num_triangles()) throw ValidationError(fmt::format("triangle id {} out of range", t));
  const DisplacementField u =
      field_path.empty() ? DisplacementField::zeros(mesh) : field_from_json(mesh, read_text(field_path));
  VoidModParams p;
  p.eta = eta;
  if (heal == "mcshane")
    p.heal_mode = HealMode::McShane;
  else if (heal != "elastic")
    throw ValidationError("heal mode must be elastic or mcshane");
  const ModResult r = modify_voids(mesh, a, u, p);
  const std::string json = mod_result_to_json(r, p);
  if (out.empty())
    std::cout << json;
  else
    write_text(out, json);
  if (!vtu.empty()) export_vtu(mesh, VtuData{&r.u_mod, &r.a_mod, &a}, r.a_mod, vtu);
  return 0;
}

int check_mesh(const std::string& path) {
  const Triangulation mesh = read_mesh(path);
  const ValidationReport rep = check_admissible(mesh);
  std::cout << report_to_json(rep);
  return rep.admissible() ? 0 : 1;
}

int study(const std::string& config_path, int refine, const std::string& out_override) {
  RunConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  const ConvergenceStudy s = run_convergence_study(cfg, refine);
  write_text((std::filesystem::path(cfg.output_dir) / "convergence.csv").string(), convergence_csv(s));
  std::cout << convergence_csv(s);
  fmt::print("last pair change {:.4g}  cauchy {}  energy bound {}\n", s.last_pair_change,
             s.cauchy_pass ? "ok" : "FAILED", s.energy_bound_pass ? "ok" : "FAILED");
  bool aborted = false;
  for (const StudyRow& r : s.rows) aborted = aborted || r.aborted;
  if (aborted) return 2;
  return s.cauchy_pass && s.energy_bound_pass ? 0 : 3;
}

int energy(const std::string& mesh_path, const std::string& field_path, double kappa) {
  const Triangulation mesh = read_mesh(mesh_path);
  const DisplacementField u = field_from_json(mesh, read_text(field_path));
  MaterialModel m;
  m.kappa = kappa;
  m.validate();
  std::cout << energy_to_json(static_energy(mesh, u, m));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive finite-element simulator for quasi-static brittle fracture"};
  app.require_subcommand(1);

  std::string config, out, mesh_path, set_path, field_path, heal = "elastic", vtu;
  double eta = 0.2, kappa = 1.0;
  int refine = 0;

  auto* sim = app.add_subcommand("simulate", "Run a quasi-static evolution");
  sim->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out, "Override output_dir");

  auto* vm = app.add_subcommand("voidmod", "Modify a void set");
  vm->add_option("--mesh", mesh_path, "Mesh JSON")->required()->check(CLI::ExistingFile);
  vm->add_option("--set", set_path, "Triangle id list")->required()->check(CLI::ExistingFile);
  vm->add_option("--field", field_path, "Displacement JSON")->check(CLI::ExistingFile);
  vm->add_option("--eta", eta, "Smallness parameter");
  vm->add_option("--heal-mode", heal, "elastic or mcshane");
  vm->add_option("--out", out, "Write the result JSON here instead of stdout");
  vm->add_option("--vtu", vtu, "Also export the modified set as .vtu/.vtp");

  auto* cm = app.add_subcommand("check-mesh", "Check admissibility of a mesh");
  cm->add_option("mesh", mesh_path, "Mesh JSON")->required()->check(CLI::ExistingFile);

  auto* st = app.add_subcommand("study", "Refinement study");
  st->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  st->add_option("--refine", refine, "Number of halvings of eps and delta")->check(CLI::NonNegativeNumber);
  st->add_option("--out", out, "Override output_dir");

  auto* en = app.add_subcommand("energy", "Evaluate the truncated energy of a field");
  en->add_option("--mesh", mesh_path, "Mesh JSON")->required()->check(CLI::ExistingFile);
  en->add_option("--field", field_path, "Displacement JSON")->required()->check(CLI::ExistingFile);
  en->add_option("--kappa", kappa, "Energy density cap");

  CLI11_PARSE(app, argc, argv);
  try {
    if (sim->parsed()) return simulate(config, out);
    if (vm->parsed()) return voidmod(mesh_path, set_path, field_path, eta, heal, out, vtu);
    if (cm->parsed()) return check_mesh(mesh_path);
    if (st->parsed()) return study(config, refine, out);
    if (en->parsed()) return energy(mesh_path, field_path, kappa);
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
