#include "fracture/voidmod.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "fracture/energy.hpp"
#include "fracture/error.hpp"

namespace fracture {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double frob2(const Strain& e) { return e.xx * e.xx + e.yy * e.yy + 2.0 * e.xy * e.xy; }

double strain2(const Triangulation& mesh, const std::vector<Vec2>& u, int t) {
  const auto& v = mesh.triangle(t);
  return frob2(strain_of(mesh.coords(t), {u[v[0]], u[v[1]], u[v[2]]}));
}

using Mat6 = Eigen::Matrix<double, 6, 6>;

Mat6 frobenius_matrix(const Tri& x, double w) {
  const double det = cross(x[1] - x[0], x[2] - x[0]);
  Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
  const double r = std::sqrt(0.5);
  for (int i = 0; i < 3; ++i) {
    const Vec2& p = x[(i + 1) % 3];
    const Vec2& q = x[(i + 2) % 3];
    const Vec2 g{(p.y - q.y) / det, (q.x - p.x) / det};
    B(0, 2 * i) = g.x;
    B(1, 2 * i + 1) = g.y;
    B(2, 2 * i) = r * g.y;
    B(2, 2 * i + 1) = r * g.x;
  }
  return w * B.transpose() * B;
}

// Minimizes sum over tris of |T| |e(v)|^2 over the free nodes, starting from u.
// The minimum-norm increment is taken when the free block is singular.
void elastic_extension(const Triangulation& mesh, const std::vector<int>& tris, const std::vector<int>& free_nodes,
                       std::vector<Vec2>& u) {
  if (free_nodes.empty()) return;
  std::unordered_map<int, int> local;
  for (std::size_t k = 0; k < free_nodes.size(); ++k) local[free_nodes[k]] = static_cast<int>(k);
  const int n = 2 * static_cast<int>(free_nodes.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (int t : tris) {
    const Mat6 ke = frobenius_matrix(mesh.coords(t), mesh.area(t));
    const auto& v = mesh.triangle(t);
    Eigen::Matrix<double, 6, 1> ut;
    for (int i = 0; i < 3; ++i) {
      ut(2 * i) = u[v[i]].x;
      ut(2 * i + 1) = u[v[i]].y;
    }
    const Eigen::Matrix<double, 6, 1> ge = ke * ut;
    for (int i = 0; i < 3; ++i) {
      const auto it = local.find(v[i]);
      if (it == local.end()) continue;
      for (int a = 0; a < 2; ++a) {
        const int r = 2 * it->second + a;
        g(r) += ge(2 * i + a);
        for (int j = 0; j < 3; ++j) {
          const auto jt = local.find(v[j]);
          if (jt == local.end()) continue;
          for (int b = 0; b < 2; ++b) K(r, 2 * jt->second + b) += ke(2 * i + a, 2 * j + b);
        }
      }
    }
  }
  const Eigen::VectorXd d = K.completeOrthogonalDecomposition().solve(-g);
  for (std::size_t k = 0; k < free_nodes.size(); ++k) {
    u[free_nodes[k]].x += d(2 * k);
    u[free_nodes[k]].y += d(2 * k + 1);
  }
}

// Mean-square strain of v over `heal` plus `ring`, relative to that of u over `ring`.
double amplification(const Triangulation& mesh, const std::vector<Vec2>& u, const std::vector<Vec2>& v,
                     const std::vector<int>& heal, const std::vector<int>& ring) {
  double num = 0.0, num_area = 0.0, den = 0.0, den_area = 0.0;
  for (int t : heal) {
    num += mesh.area(t) * strain2(mesh, v, t);
    num_area += mesh.area(t);
  }
  for (int t : ring) {
    num += mesh.area(t) * strain2(mesh, v, t);
    num_area += mesh.area(t);
    den += mesh.area(t) * strain2(mesh, u, t);
    den_area += mesh.area(t);
  }
  const double scale = 1e-24 * std::max(1.0, num + den);
  if (num <= scale) return 0.0;
  if (den <= scale || den_area <= 0.0) return kInf;
  return (num / num_area) / (den / den_area);
}

bool is_far(const Triangulation& mesh, const TriangleSet& z) {
  const double w = mesh.params().omega();
  for (int t : z.ids)
    if (mesh.boundary_distance(t) < w) return false;
  return true;
}

// Triangles outside z sharing a vertex with z.
std::vector<int> vertex_ring(const Triangulation& mesh, const TriangleSet& z) {
  std::vector<int> r;
  for (int n : set_nodes(mesh, z))
    for (int t : mesh.node_triangles(n))
      if (!z.contains(t)) r.push_back(t);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

std::vector<int> boundary_degree(const Triangulation& mesh, const std::vector<std::uint8_t>& in,
                                 const TriangleSet& s) {
  std::vector<int> deg(mesh.num_nodes(), 0);
  for (int t : s.ids)
    for (int e : mesh.triangle_edges(t)) {
      const auto& et = mesh.edge_triangles(e);
      const int o = et[0] == t ? et[1] : et[0];
      if (o < 0 || !in[o]) {
        ++deg[mesh.edge(e)[0]];
        ++deg[mesh.edge(e)[1]];
      }
    }
  return deg;
}

}  // namespace

void VoidModParams::validate() const {
  if (!(eta > 0.0 && eta <= 0.5)) throw ValidationError("eta must lie in (0, 0.5]");
}

double small_area(const Triangulation& mesh, const VoidModParams& p) {
  const double e = mesh.params().eps;
  return e * e / (p.eta * p.eta);
}

ComplementMap::ComplementMap(const Triangulation& mesh, const TriangleSet& H)
    : mesh_(mesh), in_h_(H.mask(mesh.num_triangles())), comp_(mesh.num_triangles(), -1) {
  const int nt = mesh.num_triangles();
  for (int s = 0; s < nt; ++s) {
    if (in_h_[s] || comp_[s] >= 0) continue;
    const int id = static_cast<int>(comp_area_.size());
    comp_area_.push_back(0.0);
    comp_unbounded_.push_back(0);
    comp_h_neighbors_.emplace_back();
    std::vector<int> members;
    std::deque<int> q{s};
    comp_[s] = id;
    while (!q.empty()) {
      const int t = q.front();
      q.pop_front();
      members.push_back(t);
      comp_area_[id] += mesh.area(t);
      for (int e : mesh.triangle_edges(t)) {
        const auto& et = mesh.edge_triangles(e);
        const int o = et[0] == t ? et[1] : et[0];
        if (o < 0) {
          comp_unbounded_[id] = 1;
        } else if (in_h_[o]) {
          comp_h_neighbors_[id].push_back(o);
        } else if (comp_[o] < 0) {
          comp_[o] = id;
          q.push_back(o);
        }
      }
    }
    auto& nb = comp_h_neighbors_[id];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    if (!comp_unbounded_[id]) holes_.emplace_back(std::move(members));
  }
}

double ComplementMap::saturated_area(const TriangleSet& Z) const {
  double area = set_area(mesh_, Z);
  // nodes: H \ Z triangles as t, complement pieces as -(id + 1)
  std::unordered_map<int, int> region;  // node -> region index
  std::vector<std::uint8_t> region_unbounded;
  auto in_z = [&](int t) { return Z.contains(t); };
  auto neighbors_of = [&](int node, std::vector<int>& out, bool& unbounded) {
    out.clear();
    if (node >= 0) {
      for (int e : mesh_.triangle_edges(node)) {
        const auto& et = mesh_.edge_triangles(e);
        const int o = et[0] == node ? et[1] : et[0];
        if (o < 0) {
          unbounded = true;
        } else if (in_h_[o]) {
          if (!in_z(o)) out.push_back(o);
        } else {
          out.push_back(-(comp_[o] + 1));
        }
      }
    } else {
      const int c = -node - 1;
      if (comp_unbounded_[c]) unbounded = true;
      for (int o : comp_h_neighbors_[c])
        if (!in_z(o)) out.push_back(o);
    }
  };
  std::vector<int> nb;
  for (int t : Z.ids)
    for (int e : mesh_.triangle_edges(t)) {
      const auto& et = mesh_.edge_triangles(e);
      const int o = et[0] == t ? et[1] : et[0];
      if (o < 0 || (in_h_[o] && in_z(o))) continue;
      const int start = in_h_[o] ? o : -(comp_[o] + 1);
      if (region.count(start)) continue;
      const int rid = static_cast<int>(region_unbounded.size());
      region_unbounded.push_back(0);
      double piece = 0.0;
      bool unbounded = false;
      std::deque<int> q{start};
      region[start] = rid;
      while (!q.empty() && !unbounded) {
        const int node = q.front();
        q.pop_front();
        piece += node >= 0 ? mesh_.area(node) : comp_area_[-node - 1];
        neighbors_of(node, nb, unbounded);
        for (int m : nb) {
          const auto it = region.find(m);
          if (it == region.end()) {
            region[m] = rid;
            q.push_back(m);
          } else if (it->second != rid && region_unbounded[it->second]) {
            unbounded = true;
          }
        }
      }
      if (unbounded) {
        region_unbounded[rid] = 1;
      } else {
        area += piece;
      }
    }
  return area;
}

TriangleSet fill_holes(const Triangulation& mesh, const TriangleSet& A, const VoidModParams& p) {
  const double thr = small_area(mesh, p);
  const ComplementMap cm(mesh, A);
  TriangleSet b = A;
  for (const TriangleSet& h : cm.holes())
    if (set_area(mesh, h) <= thr) b = b.unite(h);
  return b;
}

HealResult heal_component(const Triangulation& mesh, const TriangleSet& Z, const DisplacementField& u,
                          const TriangleSet& Y, const VoidModParams& p) {
  p.validate();
  u.check(mesh);
  if (Z.empty()) throw PreconditionViolated("component is empty");
  if (vertex_components(mesh, Z).size() != 1) throw PreconditionViolated("component is not connected");
  if (!ComplementMap(mesh, Z).holes().empty()) throw PreconditionViolated("component is not saturated");
  if (set_area(mesh, Z) > small_area(mesh, p)) throw PreconditionViolated("component is not small");
  if (!is_far(mesh, Z)) throw PreconditionViolated("component is too close to the mesh boundary");
  const std::vector<int> ring = vertex_ring(mesh, Z);
  for (int t : Y.ids)
    if (!std::binary_search(ring.begin(), ring.end(), t))
      throw PreconditionViolated("Y must consist of triangles touching the component");
  const auto znodes = set_nodes(mesh, Z);
  const auto ynodes = set_nodes(mesh, Y);
  std::vector<int> shared;
  std::set_intersection(znodes.begin(), znodes.end(), ynodes.begin(), ynodes.end(), std::back_inserter(shared));
  if (shared.size() > 2) throw PreconditionViolated("Y touches the component in more than two points");
  for (std::size_t i = 0; i < shared.size(); ++i)
    for (std::size_t j = i + 1; j < shared.size(); ++j)
      if (mesh.find_edge(shared[i], shared[j]) >= 0) {
        const auto& et = mesh.edge_triangles(mesh.find_edge(shared[i], shared[j]));
        const bool zy = (Z.contains(et[0]) && Y.contains(et[1])) || (Z.contains(et[1]) && Y.contains(et[0]));
        if (et[1] >= 0 && zy) throw PreconditionViolated("Y shares an edge with the component");
      }

  std::vector<int> outer;
  for (int t : ring)
    if (!Y.contains(t)) outer.push_back(t);
  std::vector<std::uint8_t> fixed(mesh.num_nodes(), 0);
  for (int t : outer)
    for (int v : mesh.triangle(t)) fixed[v] = 1;
  std::vector<int> free_nodes;
  for (int v : znodes)
    if (!fixed[v]) free_nodes.push_back(v);

  std::vector<Vec2> v = u.values;
  if (p.heal_mode == HealMode::ElasticExtension) {
    elastic_extension(mesh, Z.ids, free_nodes, v);
  } else {
    double a1 = 0.0;
    if (!outer.empty()) {
      const int t = outer.front();
      const auto& tv = mesh.triangle(t);
      const Tri x = mesh.coords(t);
      const Vec2 a = x[1] - x[0], b = x[2] - x[0];
      const Vec2 du1 = u.values[tv[1]] - u.values[tv[0]], du2 = u.values[tv[2]] - u.values[tv[0]];
      const double det = cross(a, b);
      const double g01 = (-du1.x * b.x + du2.x * a.x) / det;
      const double g10 = (du1.y * b.y - du2.y * a.y) / det;
      a1 = 0.5 * (g01 - g10);
    }
    auto skew = [a1](const Vec2& x) { return Vec2{a1 * x.y, -a1 * x.x}; };
    std::vector<int> fixed_nodes;
    for (int n = 0; n < mesh.num_nodes(); ++n)
      if (fixed[n]) fixed_nodes.push_back(n);
    std::vector<Vec2> w(fixed_nodes.size());
    for (std::size_t k = 0; k < fixed_nodes.size(); ++k)
      w[k] = u.values[fixed_nodes[k]] - skew(mesh.node(fixed_nodes[k]));
    double lx = 0.0, ly = 0.0;
    for (std::size_t i = 0; i < fixed_nodes.size(); ++i)
      for (std::size_t j = i + 1; j < fixed_nodes.size(); ++j) {
        const double d = norm(mesh.node(fixed_nodes[i]) - mesh.node(fixed_nodes[j]));
        lx = std::max(lx, std::abs(w[i].x - w[j].x) / d);
        ly = std::max(ly, std::abs(w[i].y - w[j].y) / d);
      }
    for (int n : free_nodes) {
      Vec2 best{kInf, kInf};
      for (std::size_t k = 0; k < fixed_nodes.size(); ++k) {
        const double d = norm(mesh.node(n) - mesh.node(fixed_nodes[k]));
        best.x = std::min(best.x, w[k].x + lx * d);
        best.y = std::min(best.y, w[k].y + ly * d);
      }
      if (fixed_nodes.empty()) best = u.values[n] - skew(mesh.node(n));
      v[n] = best + skew(mesh.node(n));
    }
  }
  HealResult r;
  r.ratio = amplification(mesh, u.values, v, Z.ids, outer);
  r.u = DisplacementField{u.mesh_id, std::move(v)};
  return r;
}

RemovalResult remove_small_pieces(const Triangulation& mesh, const TriangleSet& B, const DisplacementField& u,
                                  const VoidModParams& p, int max_cuts) {
  p.validate();
  u.check(mesh);
  const int nt = mesh.num_triangles();
  const double thr = small_area(mesh, p);
  double min_area = kInf;
  for (int t = 0; t < nt; ++t) min_area = std::min(min_area, mesh.area(t));
  const std::size_t n_max = static_cast<std::size_t>(std::floor(thr / min_area));
  const auto in = B.mask(nt);
  const auto deg = boundary_degree(mesh, in, B);

  // Component of t in the closure of B with the vertices in `cut` removed,
  // abandoned once it exceeds `cap` triangles.
  auto piece = [&](int t0, const std::array<int, 2>& cut, std::size_t cap, std::vector<int>& out) {
    out.clear();
    std::unordered_set<int> seen{t0};
    std::deque<int> q{t0};
    while (!q.empty()) {
      const int t = q.front();
      q.pop_front();
      out.push_back(t);
      if (out.size() > cap) return false;
      for (int e : mesh.triangle_edges(t)) {
        const auto& et = mesh.edge_triangles(e);
        const int o = et[0] == t ? et[1] : et[0];
        if (o >= 0 && in[o] && seen.insert(o).second) q.push_back(o);
      }
      for (int v : mesh.triangle(t)) {
        if (v == cut[0] || v == cut[1]) continue;
        for (int o : mesh.node_triangles(v))
          if (in[o] && seen.insert(o).second) q.push_back(o);
      }
    }
    return true;
  };

  std::set<std::vector<int>> candidates;
  for (const TriangleSet& c : vertex_components(mesh, B))
    if (c.size() <= n_max) candidates.insert(c.ids);
  if (max_cuts >= 1) {
    std::vector<int> buf, buf2;
    for (int pv = 0; pv < mesh.num_nodes(); ++pv) {
      if (deg[pv] < 4) continue;
      for (int t : mesh.node_triangles(pv)) {
        if (!in[t]) continue;
        const bool small = piece(t, {pv, -1}, n_max, buf);
        if (small) {
          std::vector<int> s = buf;
          std::sort(s.begin(), s.end());
          candidates.insert(std::move(s));
        }
        if (max_cuts < 2) continue;
        std::set<int> qs;
        for (int s : buf)
          for (int v : mesh.triangle(s))
            if (v != pv && deg[v] >= 4) qs.insert(v);
        for (int qv : qs) {
          if (piece(t, {pv, qv}, n_max, buf2)) {
            std::sort(buf2.begin(), buf2.end());
            candidates.insert(buf2);
          }
        }
      }
    }
  }

  const ComplementMap cm(mesh, B);
  std::vector<std::uint8_t> removed(nt, 0);
  for (const auto& ids : candidates) {
    TriangleSet z;
    z.ids = ids;
    if (cm.saturated_area(z) > thr) continue;
    if (!is_far(mesh, z)) continue;
    for (int t : ids) removed[t] = 1;
  }

  RemovalResult r;
  r.u = u;
  const TriangleSet gone = TriangleSet::from_mask(removed);
  r.kept = B.minus(gone);
  if (gone.empty()) return r;
  const auto kept_mask = r.kept.mask(nt);
  for (const TriangleSet& grp : vertex_components(mesh, gone)) {
    const auto nodes = set_nodes(mesh, grp);
    std::vector<int> free_nodes, ring;
    std::set<int> touch;
    for (int n : nodes) {
      bool attached = false;
      for (int t : mesh.node_triangles(n)) {
        if (kept_mask[t]) touch.insert(n);
        if (!kept_mask[t] && !grp.contains(t)) {
          attached = true;
          ring.push_back(t);
        }
      }
      if (!attached) free_nodes.push_back(n);
    }
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
    std::vector<Vec2> before = r.u.values;
    elastic_extension(mesh, grp.ids, free_nodes, r.u.values);
    r.max_ratio = std::max(r.max_ratio, amplification(mesh, before, r.u.values, grp.ids, ring));
    if (touch.size() > 2) ++r.wide_groups;
    r.removed_groups.push_back(grp);
  }
  return r;
}

RemovalResult remove_separating_small(const Triangulation& mesh, const TriangleSet& B, const DisplacementField& u,
                                      const VoidModParams& p) {
  return remove_small_pieces(mesh, B, u, p, 1);
}

TriangleHealResult heal_triangles(const Triangulation& mesh, const TriangleSet& H, const DisplacementField& u,
                                  const VoidModParams& p) {
  p.validate();
  u.check(mesh);
  const int nt = mesh.num_triangles();
  const auto in = H.mask(nt);
  const double w = mesh.params().omega();
  TriangleHealResult r;
  r.u = u;
  std::vector<std::uint8_t> heal(nt, 0);
  for (int t : H.ids) {
    int j = 0;
    for (int e : mesh.triangle_edges(t)) {
      const auto& et = mesh.edge_triangles(e);
      const int o = et[0] == t ? et[1] : et[0];
      if (o >= 0 && in[o]) ++j;
    }
    ++r.m_counts[j];
    if (j > 1) continue;
    double best = kInf;
    bool exclusive = false;
    for (int v : mesh.triangle(t)) {
      bool alone = true;
      for (int o : mesh.node_triangles(v))
        if (o != t && in[o]) alone = false;
      if (!alone) continue;
      exclusive = true;
      std::vector<int> fan;
      for (int o : mesh.node_triangles(v))
        if (o != t) fan.push_back(o);
      best = std::min(best, amplification(mesh, u.values, u.values, {t}, fan));
    }
    if (!exclusive) {
      r.not_healable.push_back(t);
      continue;
    }
    if (mesh.boundary_distance(t) < w) continue;
    heal[t] = 1;
    r.healed.push_back(t);
    r.max_ratio = std::max(r.max_ratio, best);
  }
  r.kept = H.minus(TriangleSet::from_mask(heal));
  return r;
}

ModResult modify_voids(const Triangulation& mesh, const TriangleSet& A, const DisplacementField& u,
                       const VoidModParams& p) {
  p.validate();
  u.check(mesh);
  const int nt = mesh.num_triangles();
  const MeshParams& mp = mesh.params();
  ModResult res;
  ModStats& st = res.stats;

  const TriangleSet b = fill_holes(mesh, A, p);
  const RemovalResult r1 = remove_small_pieces(mesh, b, u, p, 1);
  const RemovalResult r2 = remove_small_pieces(mesh, r1.kept, r1.u, p, 2);
  const TriangleHealResult th = heal_triangles(mesh, r2.kept, r2.u, p);

  // peel filled triangles exposed on the boundary
  auto q = th.kept.mask(nt);
  const auto input = A.mask(nt);
  std::deque<int> work(th.kept.ids.begin(), th.kept.ids.end());
  int peeled = 0;
  while (!work.empty()) {
    const int t = work.front();
    work.pop_front();
    if (!q[t] || input[t]) continue;
    bool exposed = false;
    for (int e : mesh.triangle_edges(t)) {
      const auto& et = mesh.edge_triangles(e);
      const int o = et[0] == t ? et[1] : et[0];
      if (o < 0 || !q[o]) exposed = true;
    }
    if (!exposed) continue;
    q[t] = 0;
    ++peeled;
    for (int e : mesh.triangle_edges(t)) {
      const auto& et = mesh.edge_triangles(e);
      const int o = et[0] == t ? et[1] : et[0];
      if (o >= 0 && q[o]) work.push_back(o);
    }
  }

  res.a_mod = TriangleSet::from_mask(q);
  res.u_mod = th.u;
  res.t_mod = A.intersect(res.a_mod);

  st.area_A = set_area(mesh, A);
  st.area_Amod = set_area(mesh, res.a_mod);
  st.perim_Amod = boundary_length(mesh, res.a_mod);
  st.n_components = static_cast<int>(edge_components(mesh, res.a_mod).size());
  st.healed_triangle_count = static_cast<int>(th.healed.size());
  st.removed_component_count = static_cast<int>(r1.removed_groups.size() + r2.removed_groups.size());
  st.filled_triangle_count = static_cast<int>(b.size() - A.size());
  st.peeled_triangle_count = peeled;
  st.max_heal_ratio = std::max({r1.max_ratio, r2.max_ratio, th.max_ratio});

  const double inner = 2.0 * mp.omega() + mp.eps / (p.eta * p.eta * p.eta);
  const auto amod_mask = res.a_mod.mask(nt);
  for (int t = 0; t < nt; ++t) {
    if (!input[t]) st.energy_in += mesh.area_in_omega(t) * strain2(mesh, u.values, t);
    if (mesh.boundary_distance(t) <= inner) continue;
    if (!amod_mask[t]) st.energy_out += mesh.area_in_omega(t) * strain2(mesh, res.u_mod.values, t);
    bool changed = false;
    for (int v : mesh.triangle(t)) changed = changed || !(u.values[v] == res.u_mod.values[v]);
    if (changed) st.changed_area += mesh.area(t);
  }

  st.perimeter_excess = st.perim_Amod - 2.0 * st.area_A / (mp.eps * std::sin(mp.theta0));
  st.c_perimeter = st.perimeter_excess / p.eta;
  st.c_eta = st.area_Amod / mp.eps;
  st.c_components = st.n_components * mp.eps / p.eta;
  for (int e : boundary_edges(mesh, res.a_mod)) {
    const auto& et = mesh.edge_triangles(e);
    const int inside = amod_mask[et[0]] ? et[0] : et[1];
    if (!input[inside]) st.filled_boundary_length += mesh.edge_length(e);
  }
  return res;
}

}  // namespace fracture
