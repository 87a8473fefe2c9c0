#include "fracture/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "fracture/error.hpp"

namespace fracture {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

struct Reader {
  int line;
  std::string key;

  [[noreturn]] void fail(const std::string& why) const { throw ParseError(line, key, why); }

  double real(const std::string& s) const {
    const std::string t = trim(s);
    double v = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) fail("expected a number, got '" + t + "'");
    return v;
  }
  long integer(const std::string& s) const {
    const std::string t = trim(s);
    long v = 0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) fail("expected an integer, got '" + t + "'");
    return v;
  }
  bool boolean(const std::string& s) const {
    if (s == "true") return true;
    if (s == "false") return false;
    fail("expected true or false");
  }
  std::vector<double> reals(const std::string& s, std::size_t n) const {
    std::vector<double> v;
    for (const auto& p : split(s, ',')) v.push_back(real(p));
    if (n && v.size() != n) fail("expected " + std::to_string(n) + " comma-separated numbers");
    return v;
  }
  Rect rect(const std::string& s) const {
    const auto v = reals(s, 4);
    return {v[0], v[1], v[2], v[3]};
  }
  // "a b, c d, ..."
  std::vector<std::pair<double, double>> pairs(const std::string& s) const {
    std::vector<std::pair<double, double>> out;
    if (trim(s).empty()) return out;
    for (const auto& p : split(s, ',')) {
      std::istringstream is(p);
      std::string a, b, extra;
      is >> a >> b;
      if (a.empty() || b.empty() || (is >> extra)) fail("expected pairs 'a b' separated by commas");
      out.emplace_back(real(a), real(b));
    }
    return out;
  }
};

std::string pairs_text(const std::vector<std::pair<double, double>>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i].first) + " " + num(v[i].second);
  return s;
}

std::string rect_text(const Rect& r) { return num(r.x0) + ", " + num(r.y0) + ", " + num(r.x1) + ", " + num(r.y1); }

std::string notches_text(const std::vector<Polygon>& ns) {
  std::string s;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (i) s += "; ";
    for (std::size_t j = 0; j < ns[i].size(); ++j) s += (j ? ", " : "") + num(ns[i][j].x) + " " + num(ns[i][j].y);
  }
  return s;
}

using Setter = std::function<void(RunConfig&, const Reader&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Key {
  const char* name;
  Setter set;
  Getter get;
};

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      {"omega", [](RunConfig& c, const Reader& r, const std::string& v) { c.domain.omega = r.rect(v); },
       [](const RunConfig& c) { return rect_text(c.domain.omega); }},
      {"omega_prime", [](RunConfig& c, const Reader& r, const std::string& v) { c.domain.omega_prime = r.rect(v); },
       [](const RunConfig& c) { return rect_text(c.domain.omega_prime); }},
      {"notches",
       [](RunConfig& c, const Reader& r, const std::string& v) {
         c.domain.notches.clear();
         if (trim(v).empty()) return;
         for (const auto& poly : split(v, ';')) {
           Polygon p;
           for (const auto& [x, y] : r.pairs(poly)) p.push_back({x, y});
           c.domain.notches.push_back(p);
         }
       },
       [](const RunConfig& c) { return notches_text(c.domain.notches); }},
      {"domain_units",
       [](RunConfig& c, const Reader& r, const std::string& v) {
         if (v == "physical")
           c.domain_units = DomainUnits::Physical;
         else if (v == "lattice")
           c.domain_units = DomainUnits::Lattice;
         else
           r.fail("expected physical or lattice");
       },
       [](const RunConfig& c) { return std::string(c.domain_units == DomainUnits::Lattice ? "lattice" : "physical"); }},
      {"lattice_eps", [](RunConfig& c, const Reader& r, const std::string& v) { c.lattice_eps = r.real(v); },
       [](const RunConfig& c) { return num(c.lattice_eps); }},
      {"theta0", [](RunConfig& c, const Reader& r, const std::string& v) { c.mesh.theta0 = r.real(v); },
       [](const RunConfig& c) { return num(c.mesh.theta0); }},
      {"eps", [](RunConfig& c, const Reader& r, const std::string& v) { c.mesh.eps = r.real(v); },
       [](const RunConfig& c) { return num(c.mesh.eps); }},
      {"omega_factor", [](RunConfig& c, const Reader& r, const std::string& v) { c.mesh.omega_factor = r.real(v); },
       [](const RunConfig& c) { return num(c.mesh.omega_factor); }},
      {"bg_dist_factor",
       [](RunConfig& c, const Reader& r, const std::string& v) { c.mesh.bg_dist_factor = r.real(v); },
       [](const RunConfig& c) { return num(c.mesh.bg_dist_factor); }},
      {"kappa", [](RunConfig& c, const Reader& r, const std::string& v) { c.material.kappa = r.real(v); },
       [](const RunConfig& c) { return num(c.material.kappa); }},
      {"elasticity",
       [](RunConfig& c, const Reader& r, const std::string& v) {
         const auto x = r.reals(v, 9);
         std::copy(x.begin(), x.end(), c.material.elasticity.begin());
       },
       [](const RunConfig& c) {
         std::string s;
         for (int i = 0; i < 9; ++i) s += (i ? ", " : "") + num(c.material.elasticity[i]);
         return s;
       }},
      {"f_profile",
       [](RunConfig& c, const Reader& r, const std::string& v) {
         if (v == "truncated")
           c.material.profile = FProfile::TruncatedQuadratic;
         else if (v == "custom")
           c.material.profile = FProfile::Custom;
         else
           r.fail("expected truncated or custom");
       },
       [](const RunConfig& c) {
         return std::string(c.material.profile == FProfile::Custom ? "custom" : "truncated");
       }},
      {"f_table", [](RunConfig& c, const Reader& r, const std::string& v) { c.material.f_table = r.pairs(v); },
       [](const RunConfig& c) { return pairs_text(c.material.f_table); }},
      {"load",
       [](RunConfig& c, const Reader& r, const std::string& v) {
         try {
           c.load.kind = load_kind_from_string(v);
         } catch (const ValidationError& e) {
           r.fail(e.what());
         }
       },
       [](const RunConfig& c) { return std::string(to_string(c.load.kind)); }},
      {"load_amplitude", [](RunConfig& c, const Reader& r, const std::string& v) { c.load.amplitude = r.real(v); },
       [](const RunConfig& c) { return num(c.load.amplitude); }},
      {"load_matrix",
       [](RunConfig& c, const Reader& r, const std::string& v) {
         const auto x = r.reals(v, 4);
         std::copy(x.begin(), x.end(), c.load.matrix.begin());
       },
       [](const RunConfig& c) {
         return num(c.load.matrix[0]) + ", " + num(c.load.matrix[1]) + ", " + num(c.load.matrix[2]) + ", " +
                num(c.load.matrix[3]);
       }},
      {"load_band",
       [](RunConfig& c, const Reader& r, const std::string& v) {
         const auto x = r.reals(v, 2);
         c.load.y0 = x[0];
         c.load.y1 = x[1];
       },
       [](const RunConfig& c) { return num(c.load.y0) + ", " + num(c.load.y1); }},
      {"load_schedule", [](RunConfig& c, const Reader& r, const std::string& v) { c.load.schedule = r.pairs(v); },
       [](const RunConfig& c) { return pairs_text(c.load.schedule); }},
      {"t_end", [](RunConfig& c, const Reader& r, const std::string& v) { c.load.t_end = r.real(v); },
       [](const RunConfig& c) { return num(c.load.t_end); }},
      {"delta",
       [](RunConfig& c, const Reader& r, const std::string& v) {
         const double d = r.real(v);
         if (!(d > 0.0)) throw ValidationError("delta must be positive");
         const double n = std::round(c.load.t_end / d);
         if (n < 1.0 || std::abs(n * d - c.load.t_end) > 1e-9 * c.load.t_end)
           throw ValidationError("delta must divide t_end into whole steps");
         c.load.n_steps = static_cast<int>(n);
       },
       [](const RunConfig& c) { return num(c.load.delta()); }},
      {"eta",
       [](RunConfig& c, const Reader& r, const std::string& v) {
         if (v == "auto") {
           c.eta_auto = true;
         } else {
           c.eta_auto = false;
           c.vm.eta = r.real(v);
         }
       },
       [](const RunConfig& c) { return c.eta_auto ? std::string("auto") : num(c.vm.eta); }},
      {"heal_mode",
       [](RunConfig& c, const Reader& r, const std::string& v) {
         if (v == "elastic")
           c.vm.heal_mode = HealMode::ElasticExtension;
         else if (v == "mcshane")
           c.vm.heal_mode = HealMode::McShane;
         else
           r.fail("expected elastic or mcshane");
       },
       [](const RunConfig& c) { return std::string(c.vm.heal_mode == HealMode::McShane ? "mcshane" : "elastic"); }},
      {"cg_rel_tol", [](RunConfig& c, const Reader& r, const std::string& v) { c.solve.cg_rel_tol = r.real(v); },
       [](const RunConfig& c) { return num(c.solve.cg_rel_tol); }},
      {"max_outer",
       [](RunConfig& c, const Reader& r, const std::string& v) { c.solve.max_outer = static_cast<int>(r.integer(v)); },
       [](const RunConfig& c) { return std::to_string(c.solve.max_outer); }},
      {"max_cg",
       [](RunConfig& c, const Reader& r, const std::string& v) { c.solve.max_cg = static_cast<int>(r.integer(v)); },
       [](const RunConfig& c) { return std::to_string(c.solve.max_cg); }},
      {"multistarts",
       [](RunConfig& c, const Reader& r, const std::string& v) {
         c.solve.multistarts = static_cast<int>(r.integer(v));
       },
       [](const RunConfig& c) { return std::to_string(c.solve.multistarts); }},
      {"local_search",
       [](RunConfig& c, const Reader& r, const std::string& v) {
         c.solve.local_search = static_cast<int>(r.integer(v));
       },
       [](const RunConfig& c) { return std::to_string(c.solve.local_search); }},
      {"seed",
       [](RunConfig& c, const Reader& r, const std::string& v) {
         const long s = r.integer(v);
         if (s < 0) r.fail("seed must be nonnegative");
         c.solve.seed = static_cast<std::uint64_t>(s);
       },
       [](const RunConfig& c) { return std::to_string(c.solve.seed); }},
      {"output_dir", [](RunConfig& c, const Reader&, const std::string& v) { c.output_dir = v; },
       [](const RunConfig& c) { return c.output_dir; }},
      {"export_vtu", [](RunConfig& c, const Reader& r, const std::string& v) { c.export_vtu = r.boolean(v); },
       [](const RunConfig& c) { return std::string(c.export_vtu ? "true" : "false"); }},
      {"export_fields", [](RunConfig& c, const Reader& r, const std::string& v) { c.export_fields = r.boolean(v); },
       [](const RunConfig& c) { return std::string(c.export_fields ? "true" : "false"); }},
      {"mesh_candidates",
       [](RunConfig& c, const Reader& r, const std::string& v) {
         if (v == "previous")
           c.snap_candidates = false;
         else if (v == "snap")
           c.snap_candidates = true;
         else
           r.fail("expected previous or snap");
       },
       [](const RunConfig& c) { return std::string(c.snap_candidates ? "snap" : "previous"); }},
  };
  return k;
}

}  // namespace

RunConfig RunConfig::resolved() const {
  RunConfig c = *this;
  if (c.lattice_eps <= 0.0) c.lattice_eps = mesh.eps;
  if (c.domain_units == DomainUnits::Lattice) {
    MeshParams ref = mesh;
    ref.eps = c.lattice_eps;
    const double h = ref.lattice();
    auto scale = [h](Rect r) { return Rect{r.x0 * h, r.y0 * h, r.x1 * h, r.y1 * h}; };
    c.domain.omega = scale(domain.omega);
    c.domain.omega_prime = scale(domain.omega_prime);
    for (auto& poly : c.domain.notches)
      for (auto& p : poly) p = p * h;
    if (c.load.kind == LoadKind::Opening) {
      c.load.y0 *= h;
      c.load.y1 *= h;
    }
    c.domain_units = DomainUnits::Physical;
  }
  return c;
}

VoidModParams RunConfig::void_params() const {
  VoidModParams p = vm;
  if (eta_auto) p.eta = eta_schedule(mesh.eps);
  return p;
}

void RunConfig::validate() const {
  try {
    mesh.validate();
  } catch (const InadmissibleParams& e) {
    throw ValidationError(e.what());
  }
  if (lattice_eps < 0.0) throw ValidationError("lattice_eps must be nonnegative");
  resolved().domain.validate();
  material.validate();
  load.validate();
  void_params().validate();
  solve.validate();
  if (output_dir.empty()) throw ValidationError("output_dir must not be empty");
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::pair<std::string, int>> values;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, "", "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    bool known = false;
    for (const Key& k : keys()) known = known || key == k.name;
    if (!known) throw ParseError(line, key, "unknown key");
    if (values.count(key)) throw ParseError(line, key, "duplicate key");
    values[key] = {value, line};
  }
  RunConfig c;
  for (const Key& k : keys()) {
    const auto it = values.find(k.name);
    if (it == values.end()) continue;
    const Reader r{it->second.second, k.name};
    try {
      k.set(c, r, it->second.first);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(k.name) + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  for (const Key& k : keys()) out += std::string(k.name) + " = " + k.get(c) + "\n";
  return out;
}

EvolutionTrace run_config(const RunConfig& c) {
  c.validate();
  const RunConfig r = c.resolved();
  EvolutionOptions opts;
  opts.solve = r.solve;
  opts.snap_candidates = r.snap_candidates;
  return run_evolution(r.domain, r.mesh, r.material, r.load, r.void_params(), opts);
}

}  // namespace fracture
