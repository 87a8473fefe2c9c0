#include "fracture/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <boost/pending/disjoint_sets.hpp>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <fmt/format.h>

#include "fracture/error.hpp"
#include "fracture/parallel.hpp"

namespace fracture {
namespace {

using Mat6 = Eigen::Matrix<double, 6, 6>;

Mat6 element_matrix(const Tri& x, const std::array<double, 9>& c, double w) {
  const double det = cross(x[1] - x[0], x[2] - x[0]);
  Vec2 g[3];
  for (int i = 0; i < 3; ++i) {
    const Vec2& p = x[(i + 1) % 3];
    const Vec2& q = x[(i + 2) % 3];
    g[i] = {(p.y - q.y) / det, (q.x - p.x) / det};
  }
  Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    B(0, 2 * i) = g[i].x;
    B(1, 2 * i + 1) = g[i].y;
    B(2, 2 * i) = g[i].y;
    B(2, 2 * i + 1) = g[i].x;
  }
  Eigen::Matrix3d C;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) C(i, j) = c[3 * i + j];
  return w * B.transpose() * C * B;
}

struct System {
  std::vector<int> dof;  // node -> system node index or -1
  std::vector<int> nodes_of_dof;
  std::vector<std::uint8_t> floating;  // free nodes in components without a pinned node
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd b;
};

System assemble(const Triangulation& mesh, const std::vector<std::uint8_t>& inactive_mask,
                const std::vector<std::uint8_t>& pinned, const MaterialModel& m, const std::vector<Vec2>& u) {
  const int nn = mesh.num_nodes();
  System sys;
  std::vector<int> active;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    if (!inactive_mask[t] && mesh.area_in_omega(t) > 0.0) active.push_back(t);

  boost::disjoint_sets_with_storage<> ds(nn);
  std::vector<std::uint8_t> attached(nn, 0), anchored_tri_node(nn, 0);
  for (int t : active) {
    const auto& v = mesh.triangle(t);
    bool has_pin = false;
    for (int a : v) has_pin = has_pin || pinned[a];
    int first = -1;
    for (int a : v) {
      if (pinned[a]) continue;
      attached[a] = 1;
      if (has_pin) anchored_tri_node[a] = 1;
      if (first < 0)
        first = a;
      else
        ds.union_set(first, a);
    }
  }
  std::vector<std::uint8_t> anchored_root(nn, 0);
  for (int a = 0; a < nn; ++a)
    if (attached[a] && anchored_tri_node[a]) anchored_root[ds.find_set(a)] = 1;

  sys.dof.assign(nn, -1);
  sys.floating.assign(nn, 0);
  for (int a = 0; a < nn; ++a) {
    if (!attached[a]) continue;
    if (anchored_root[ds.find_set(a)]) {
      sys.dof[a] = static_cast<int>(sys.nodes_of_dof.size());
      sys.nodes_of_dof.push_back(a);
    } else {
      sys.floating[a] = 1;
    }
  }

  const int n = 2 * static_cast<int>(sys.nodes_of_dof.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(active.size() * 36);
  sys.b = Eigen::VectorXd::Zero(n);
  for (int t : active) {
    const auto& v = mesh.triangle(t);
    bool any = false;
    for (int a : v) any = any || sys.dof[a] >= 0;
    if (!any) continue;
    const Mat6 ke = element_matrix(mesh.coords(t), m.elasticity, mesh.area_in_omega(t));
    for (int i = 0; i < 3; ++i) {
      const int di = sys.dof[v[i]];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = sys.dof[v[j]];
        for (int r = 0; r < 2; ++r)
          for (int s = 0; s < 2; ++s) {
            const double k = ke(2 * i + r, 2 * j + s);
            if (dj >= 0)
              trip.emplace_back(2 * di + r, 2 * dj + s, k);
            else
              sys.b(2 * di + r) -= k * (s == 0 ? u[v[j]].x : u[v[j]].y);
          }
      }
    }
  }
  sys.K.resize(n, n);
  sys.K.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

bool result_better(const SolveResult& a, const SolveResult& b) {
  if (a.energy.total != b.energy.total) return a.energy.total < b.energy.total;
  if (a.energy.cracked_area != b.energy.cracked_area) return a.energy.cracked_area < b.energy.cracked_area;
  return std::lexicographical_compare(a.u.values.begin(), a.u.values.end(), b.u.values.begin(), b.u.values.end(),
                                      [](const Vec2& p, const Vec2& q) { return p.x != q.x ? p.x < q.x : p.y < q.y; });
}

struct Stepper {
  const Triangulation& mesh;
  const TriangleSet& history;
  const DisplacementField& bc;
  const MaterialModel& m;
  const SolveOptions& opts;
  const std::vector<std::uint8_t>& pinned;

  SolveResult run(TriangleSet S, DisplacementField u) const {
    SolveResult best;
    bool have = false;
    std::set<std::vector<int>> seen;
    seen.insert(S.ids);
    SolveResult r;
    for (int it = 1; it <= opts.max_outer; ++it) {
      u = solve_elastic(mesh, S, bc, m, opts, &u, &pinned);
      const auto strains = all_strains(mesh, u);
      const TriangleSet next = history.unite(classify_cracked(mesh, strains, m));
      r.u = u;
      r.energy = history_energy(mesh, u, history, m);
      r.cracked_now = next;
      r.outer_iters = it;
      r.outer_energies.push_back(r.energy.total);
      if (!have || result_better(r, best)) {
        best = r;
        have = true;
      }
      if (next == S) {
        r.converged = true;
        break;
      }
      if (!seen.insert(next.ids).second) {
        r.cycled = true;
        break;
      }
      S = next;
    }
    if (r.converged) return r;
    best.outer_iters = r.outer_iters;
    best.outer_energies = r.outer_energies;
    best.cycled = r.cycled;
    best.converged = false;
    return best;
  }
};

}  // namespace

void SolveOptions::validate() const {
  if (!(cg_rel_tol > 0.0)) throw ValidationError("cg_rel_tol must be positive");
  if (max_outer < 1) throw ValidationError("max_outer must be at least 1");
  if (max_cg < 0) throw ValidationError("max_cg must be nonnegative");
  if (multistarts < 1) throw ValidationError("multistarts must be at least 1");
  if (local_search < 0) throw ValidationError("local_search must be nonnegative");
}

std::vector<std::uint8_t> collar_nodes(const Triangulation& mesh) {
  std::vector<std::uint8_t> p(mesh.num_nodes(), 0);
  for (int t = 0; t < mesh.num_triangles(); ++t)
    if (mesh.is_collar(t))
      for (int v : mesh.triangle(t)) p[v] = 1;
  return p;
}

ElasticSolution solve_elastic_detailed(const Triangulation& mesh, const TriangleSet& inactive,
                                       const DisplacementField& bc, const MaterialModel& m, const SolveOptions& opts,
                                       const DisplacementField* warm, const std::vector<std::uint8_t>* pinned) {
  bc.check(mesh);
  const std::vector<std::uint8_t> own_pins = pinned ? std::vector<std::uint8_t>{} : collar_nodes(mesh);
  const auto& pins = pinned ? *pinned : own_pins;
  std::vector<Vec2> u = warm ? warm->values : bc.values;
  if (static_cast<int>(u.size()) != mesh.num_nodes()) throw MeshFieldMismatch("warm start size mismatch");
  for (int a = 0; a < mesh.num_nodes(); ++a)
    if (pins[a]) u[a] = bc.values[a];

  System sys = assemble(mesh, inactive.mask(mesh.num_triangles()), pins, m, u);
  for (int a = 0; a < mesh.num_nodes(); ++a)
    if (sys.floating[a]) u[a] = {0.0, 0.0};

  ElasticSolution out;
  const int n = static_cast<int>(sys.b.size());
  out.load_norm = sys.b.norm();
  if (n > 0) {
    Eigen::VectorXd x0(n);
    for (int k = 0; k < n / 2; ++k) {
      x0(2 * k) = u[sys.nodes_of_dof[k]].x;
      x0(2 * k + 1) = u[sys.nodes_of_dof[k]].y;
    }
    Eigen::VectorXd x;
    if (out.load_norm == 0.0) {
      x = Eigen::VectorXd::Zero(n);
    } else {
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                               Eigen::DiagonalPreconditioner<double>>
          cg;
      cg.setTolerance(opts.cg_rel_tol);
      cg.setMaxIterations(opts.max_cg > 0 ? opts.max_cg : 10 * mesh.num_nodes());
      cg.compute(sys.K);
      x = cg.solveWithGuess(sys.b, x0);
      out.cg_iterations = static_cast<int>(cg.iterations());
      if (!x.allFinite()) throw SingularSystem("elastic system produced non-finite values");
      if (cg.info() != Eigen::Success && cg.error() > opts.cg_rel_tol)
        throw NonConvergence(fmt::format("CG stopped after {} iterations at relative residual {:.3e}",
                                         cg.iterations(), cg.error()));
    }
    out.residual = (sys.K * x - sys.b).norm();
    for (int k = 0; k < n / 2; ++k) u[sys.nodes_of_dof[k]] = {x(2 * k), x(2 * k + 1)};
  }
  out.u = DisplacementField::on(mesh, std::move(u));
  return out;
}

DisplacementField solve_elastic(const Triangulation& mesh, const TriangleSet& inactive, const DisplacementField& bc,
                                const MaterialModel& m, const SolveOptions& opts, const DisplacementField* warm,
                                const std::vector<std::uint8_t>* pinned) {
  return solve_elastic_detailed(mesh, inactive, bc, m, opts, warm, pinned).u;
}

SolveResult minimize_step(const Triangulation& mesh, const TriangleSet& history, const DisplacementField& bc,
                          const MaterialModel& m, const SolveOptions& opts, const DisplacementField* warm,
                          const std::vector<std::uint8_t>* pinned) {
  opts.validate();
  bc.check(mesh);
  for (int t : history.ids)
    if (t < 0 || t >= mesh.num_triangles()) throw InconsistentHistory("history triangle outside the mesh");
  const std::vector<std::uint8_t> pins = pinned ? *pinned : collar_nodes(mesh);
  const Stepper step{mesh, history, bc, m, opts, pins};

  std::vector<int> candidates;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    if (mesh.area_in_omega(t) > 0.0 && !history.contains(t)) candidates.push_back(t);

  struct Start {
    TriangleSet S;
    DisplacementField u;
  };
  std::vector<Start> starts;
  if (warm) {
    DisplacementField w = warm->rebind(mesh);
    for (int a = 0; a < mesh.num_nodes(); ++a)
      if (pins[a]) w.values[a] = bc.values[a];
    starts.push_back({history.unite(classify_cracked(mesh, w, m)), w});
  }
  starts.push_back({history, bc});
  static constexpr double kDensity[] = {0.05, 0.15, 0.3, 0.5};
  for (int k = 0; static_cast<int>(starts.size()) < opts.multistarts; ++k) {
    std::mt19937_64 rng(opts.seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(k));
    std::bernoulli_distribution coin(kDensity[k % 4]);
    TriangleSet S = history;
    std::vector<int> extra;
    for (int t : candidates)
      if (coin(rng)) extra.push_back(t);
    starts.push_back({S.unite(TriangleSet(extra)), bc});
  }
  starts.resize(std::min<std::size_t>(starts.size(), std::max(opts.multistarts, 1)));

  std::vector<SolveResult> results(starts.size());
  parallel_for(
      static_cast<int>(starts.size()), [&](int i) { results[i] = step.run(starts[i].S, starts[i].u); },
      opts.threads);
  std::size_t bi = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (result_better(results[i], results[bi])) bi = i;
  SolveResult best = std::move(results[bi]);

  if (opts.local_search > 0) {
    for (int pass = 0; pass < 50; ++pass) {
      const auto strains = all_strains(mesh, best.u);
      std::vector<std::pair<double, int>> add, remove;
      for (int t : candidates) {
        const double ratio = mesh.params().eps * m.contract(strains[t]) / m.kappa;
        if (best.cracked_now.contains(t))
          remove.emplace_back(ratio, t);
        else
          add.emplace_back(-ratio, t);
      }
      std::sort(add.begin(), add.end());
      std::sort(remove.begin(), remove.end());
      if (static_cast<int>(add.size()) > opts.local_search) add.resize(opts.local_search);
      if (static_cast<int>(remove.size()) > opts.local_search) remove.resize(opts.local_search);
      std::vector<TriangleSet> trials;
      for (auto [r, t] : add) trials.push_back(best.cracked_now.unite(TriangleSet{t}));
      for (auto [r, t] : remove) trials.push_back(best.cracked_now.minus(TriangleSet{t}));
      std::vector<SolveResult> tr(trials.size());
      parallel_for(
          static_cast<int>(trials.size()), [&](int i) { tr[i] = step.run(trials[i], best.u); }, opts.threads);
      const double gate = best.energy.total - 1e-12 * std::max(1.0, std::abs(best.energy.total));
      int pick = -1;
      for (std::size_t i = 0; i < tr.size(); ++i)
        if (tr[i].energy.total < gate && (pick < 0 || result_better(tr[i], tr[pick]))) pick = static_cast<int>(i);
      if (pick < 0) break;
      best = std::move(tr[pick]);
    }
  }
  return best;
}

SolveResult minimize_step(const Triangulation& mesh, const CrackHistory& history, const DisplacementField& bc,
                          const MaterialModel& m, const SolveOptions& opts, const DisplacementField* warm) {
  history.check(mesh);
  return minimize_step(mesh, history.accumulated(), bc, m, opts, warm);
}

void write_matrix_market(const Triangulation& mesh, const TriangleSet& inactive, const MaterialModel& m,
                         const std::string& path, const std::vector<std::uint8_t>* pinned) {
  const std::vector<std::uint8_t> pins = pinned ? *pinned : collar_nodes(mesh);
  const System sys =
      assemble(mesh, inactive.mask(mesh.num_triangles()), pins, m, std::vector<Vec2>(mesh.num_nodes()));
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path);
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << sys.K.rows() << ' ' << sys.K.cols() << ' ' << sys.K.nonZeros() << '\n';
  for (int k = 0; k < sys.K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.K, k); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << fmt::format("{:.17g}", it.value()) << '\n';
  if (!os) throw IoError("failed writing " + path);
}

}  // namespace fracture
