#include "fracture/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "fracture/error.hpp"
#include "fracture/load.hpp"

namespace fracture {
namespace {

std::atomic<std::uint64_t> next_mesh_id{1};

std::vector<std::uint8_t> coincide_mask(const std::vector<Vec2>& nodes, const std::vector<Vec2>& ref,
                                        const std::vector<std::array<int, 3>>& tris, double tol) {
  std::vector<std::uint8_t> m(tris.size(), 1);
  for (std::size_t t = 0; t < tris.size(); ++t)
    for (int v : tris[t])
      if (norm(nodes[v] - ref[v]) > tol) m[t] = 0;
  return m;
}

bool triangle_ok(const Tri& t, const MeshParams& p) {
  if (signed_area(t) <= 0.0) return false;
  const auto ang = interior_angles(t);
  if (*std::min_element(ang.begin(), ang.end()) < p.theta0 - 1e-12) return false;
  for (int i = 0; i < 3; ++i) {
    const double l = norm(t[(i + 1) % 3] - t[i]);
    if (l < p.eps * (1.0 - 1e-9) || l > p.omega() * (1.0 + 1e-9)) return false;
  }
  return true;
}

}  // namespace

void MeshParams::validate() const {
  if (!(theta0 > 0.0 && theta0 <= std::numbers::pi / 3.0 + 1e-15))
    throw InadmissibleParams("theta0 must lie in (0, pi/3]");
  if (!(eps > 0.0)) throw InadmissibleParams("eps must be positive");
  if (!(omega_factor >= 6.0)) throw InadmissibleParams("omega_factor must be at least 6");
  if (!(bg_dist_factor > 0.0)) throw InadmissibleParams("bg_dist_factor must be positive");
}

void Domain::validate() const {
  if (!(omega.x1 > omega.x0 && omega.y1 > omega.y0)) throw ValidationError("omega is empty");
  if (!omega_prime.contains(omega)) throw ValidationError("omega must lie inside omega_prime");
  if (!(omega_prime.area() - omega.area() > 0.0)) throw ValidationError("omega_prime needs a collar of positive area");
  for (const auto& n : notches)
    if (n.size() < 3) throw ValidationError("notch polygon needs at least 3 vertices");
}

double Domain::body_area() const {
  double a = omega.area();
  for (const auto& n : notches)
    for (const auto& piece : clip_polygon(n, omega)) a -= std::abs(polygon_area(piece));
  return a;
}

std::vector<std::array<Vec2, 2>> Domain::dirichlet_part() const {
  std::vector<std::array<Vec2, 2>> out;
  const Rect& r = omega;
  const Rect& q = omega_prime;
  if (r.y0 > q.y0) out.push_back({Vec2{r.x0, r.y0}, Vec2{r.x1, r.y0}});
  if (r.x1 < q.x1) out.push_back({Vec2{r.x1, r.y0}, Vec2{r.x1, r.y1}});
  if (r.y1 < q.y1) out.push_back({Vec2{r.x1, r.y1}, Vec2{r.x0, r.y1}});
  if (r.x0 > q.x0) out.push_back({Vec2{r.x0, r.y1}, Vec2{r.x0, r.y0}});
  return out;
}

Triangulation::Triangulation(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> triangles, MeshParams params,
                             std::optional<Domain> domain, std::vector<std::uint8_t> background,
                             std::shared_ptr<const std::vector<Vec2>> reference)
    : id_(next_mesh_id++),
      nodes_(std::move(nodes)),
      tris_(std::move(triangles)),
      params_(params),
      domain_(std::move(domain)),
      background_(std::move(background)),
      reference_(std::move(reference)),
      lazy_(std::make_shared<Lazy>()) {
  build();
}

void Triangulation::build() {
  const int nn = num_nodes();
  for (auto& t : tris_) {
    for (int v : t)
      if (v < 0 || v >= nn) throw ValidationError("triangle references node " + std::to_string(v) + " out of range");
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) throw ValidationError("triangle with repeated node");
    if (signed_area({nodes_[t[0]], nodes_[t[1]], nodes_[t[2]]}) < 0.0) std::swap(t[1], t[2]);
  }
  if (!reference_) reference_ = std::make_shared<const std::vector<Vec2>>(nodes_);
  if (static_cast<int>(reference_->size()) != nn) throw ValidationError("reference coordinates size mismatch");
  if (background_.empty()) background_.assign(tris_.size(), 1);
  if (background_.size() != tris_.size()) throw ValidationError("background mask size mismatch");

  std::unordered_map<std::uint64_t, int> edge_index;
  edge_index.reserve(tris_.size() * 2);
  tri_edges_.resize(tris_.size());
  for (int t = 0; t < num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      int a = tris_[t][i], b = tris_[t][(i + 1) % 3];
      if (a > b) std::swap(a, b);
      const std::uint64_t key = static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(nn) + b;
      auto [it, fresh] = edge_index.try_emplace(key, num_edges());
      if (fresh) {
        edges_.push_back({a, b});
        edge_tris_.push_back({t, -1});
      } else {
        auto& et = edge_tris_[it->second];
        if (et[1] < 0)
          et[1] = t;
        else
          nonmanifold_.push_back(it->second);
      }
      tri_edges_[t][i] = it->second;
    }
  }

  node_tri_offset_.assign(nn + 1, 0);
  for (const auto& t : tris_)
    for (int v : t) ++node_tri_offset_[v + 1];
  for (int i = 0; i < nn; ++i) node_tri_offset_[i + 1] += node_tri_offset_[i];
  node_tri_list_.resize(node_tri_offset_[nn]);
  std::vector<int> fill(node_tri_offset_.begin(), node_tri_offset_.end() - 1);
  for (int t = 0; t < num_triangles(); ++t)
    for (int v : tris_[t]) node_tri_list_[fill[v]++] = t;

  boundary_node_.assign(nn, 0);
  for (int e = 0; e < num_edges(); ++e)
    if (edge_tris_[e][1] < 0) boundary_node_[edges_[e][0]] = boundary_node_[edges_[e][1]] = 1;

  std::vector<Polygon> notch_pieces;
  if (domain_)
    for (const auto& n : domain_->notches)
      for (auto& piece : clip_polygon(n, domain_->omega)) notch_pieces.push_back(std::move(piece));

  area_.resize(tris_.size());
  area_omega_.resize(tris_.size());
  collar_.assign(tris_.size(), 0);
  for (int t = 0; t < num_triangles(); ++t) {
    const Tri c = coords(t);
    area_[t] = signed_area(c);
    if (!domain_) {
      area_omega_[t] = area_[t];
      continue;
    }
    double a = clipped_area(c, domain_->omega);
    if (a > 0.0)
      for (const auto& piece : notch_pieces) a -= clipped_area(c, piece);
    if (a <= 1e-12 * area_[t]) {
      a = 0.0;
      collar_[t] = 1;
    }
    area_omega_[t] = a;
  }
}

Vec2 Triangulation::centroid(int t) const {
  const auto& v = tris_[t];
  return (nodes_[v[0]] + nodes_[v[1]] + nodes_[v[2]]) * (1.0 / 3.0);
}

std::span<const int> Triangulation::node_triangles(int n) const {
  return {node_tri_list_.data() + node_tri_offset_[n],
          static_cast<std::size_t>(node_tri_offset_[n + 1] - node_tri_offset_[n])};
}

int Triangulation::find_edge(int a, int b) const {
  for (int t : node_triangles(a))
    for (int e : tri_edges_[t]) {
      const auto& ed = edges_[e];
      if ((ed[0] == a && ed[1] == b) || (ed[0] == b && ed[1] == a)) return e;
    }
  return -1;
}

double Triangulation::boundary_distance(int t) const {
  std::call_once(lazy_->boundary_once, [this] {
    std::vector<int> bedges;
    for (int e = 0; e < num_edges(); ++e)
      if (is_boundary_edge(e)) bedges.push_back(e);
    auto& d = lazy_->boundary_dist;
    d.assign(tris_.size(), std::numeric_limits<double>::infinity());
    for (int s = 0; s < num_triangles(); ++s) {
      bool touches = false;
      for (int v : tris_[s]) touches = touches || boundary_node_[v];
      if (touches) {
        d[s] = 0.0;
        continue;
      }
      const Tri c = coords(s);
      double best = std::numeric_limits<double>::infinity();
      for (int e : bedges) {
        const Vec2& p = nodes_[edges_[e][0]];
        const Vec2& q = nodes_[edges_[e][1]];
        for (int i = 0; i < 3; ++i) best = std::min(best, segment_distance(c[i], c[(i + 1) % 3], p, q));
      }
      d[s] = best;
    }
  });
  return lazy_->boundary_dist[t];
}

double Triangulation::background_distance(int t) const {
  std::call_once(lazy_->background_once, [this] {
    auto& d = lazy_->background_dist;
    d.assign(tris_.size(), std::numeric_limits<double>::infinity());
    std::vector<int> bg;
    for (int s = 0; s < num_triangles(); ++s)
      if (background_[s]) bg.push_back(s);
    for (int s = 0; s < num_triangles(); ++s) {
      if (background_[s]) {
        d[s] = 0.0;
        continue;
      }
      const Tri c = coords(s);
      const Vec2 cs = centroid(s);
      double best = std::numeric_limits<double>::infinity();
      for (int b : bg) {
        // cheap lower bound from centroids and circumradius-like extents
        const Tri cb = coords(b);
        double rs = 0.0, rb = 0.0;
        const Vec2 ccb = centroid(b);
        for (int i = 0; i < 3; ++i) {
          rs = std::max(rs, norm(c[i] - cs));
          rb = std::max(rb, norm(cb[i] - ccb));
        }
        if (norm(cs - ccb) - rs - rb >= best) continue;
        best = std::min(best, triangle_distance(c, cb));
        if (best == 0.0) break;
      }
      d[s] = best;
    }
  });
  return lazy_->background_dist[t];
}

Triangulation Triangulation::with_nodes(std::vector<Vec2> nodes) const {
  auto mask = coincide_mask(nodes, *reference_, tris_, 1e-9 * params_.eps);
  return Triangulation(std::move(nodes), tris_, params_, domain_, std::move(mask), reference_);
}

DisplacementField DisplacementField::zeros(const Triangulation& mesh) {
  return {mesh.id(), std::vector<Vec2>(mesh.num_nodes())};
}

DisplacementField DisplacementField::on(const Triangulation& mesh, std::vector<Vec2> values) {
  if (static_cast<int>(values.size()) != mesh.num_nodes())
    throw MeshFieldMismatch("field has " + std::to_string(values.size()) + " values, mesh has " +
                            std::to_string(mesh.num_nodes()) + " nodes");
  return {mesh.id(), std::move(values)};
}

DisplacementField DisplacementField::rebind(const Triangulation& mesh) const { return on(mesh, values); }

void DisplacementField::check(const Triangulation& mesh) const {
  if (mesh_id != mesh.id() || static_cast<int>(values.size()) != mesh.num_nodes())
    throw MeshFieldMismatch("displacement field does not belong to this mesh");
}

bool ValidationReport::has(const std::string& kind) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

Triangulation build_background_mesh(const Domain& domain, const MeshParams& params) {
  params.validate();
  domain.validate();
  if (params.theta0 > std::numbers::pi / 4.0 + 1e-15)
    throw InadmissibleParams("theta0 above pi/4: half-square triangles have 45 degree angles");
  const double h = params.lattice();
  if (h < params.eps * (1.0 - 1e-12) || std::sqrt(2.0) * h > params.omega() * (1.0 + 1e-12))
    throw InadmissibleParams("half-square edges violate the edge length bounds");
  const Rect& q = domain.omega_prime;
  const int nx = static_cast<int>(std::floor(q.width() / h + 1e-9));
  const int ny = static_cast<int>(std::floor(q.height() / h + 1e-9));
  if (nx < 1 || ny < 1) throw InadmissibleParams("omega_prime is smaller than one lattice cell");

  auto lattice_id = [&](int i, int j) { return j * (nx + 1) + i; };
  auto point = [&](int i, int j) { return Vec2{q.x0 + i * h, q.y0 + j * h}; };
  auto in_notch = [&](const Vec2& c) {
    for (const auto& n : domain.notches)
      if (point_in_polygon(c, n)) return true;
    return false;
  };

  std::vector<std::array<int, 3>> lattice_tris;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::array<int, 3> lower{lattice_id(i, j), lattice_id(i + 1, j), lattice_id(i + 1, j + 1)};
      const std::array<int, 3> upper{lattice_id(i, j), lattice_id(i + 1, j + 1), lattice_id(i, j + 1)};
      const Vec2 cl = (point(i, j) + point(i + 1, j) + point(i + 1, j + 1)) * (1.0 / 3.0);
      const Vec2 cu = (point(i, j) + point(i + 1, j + 1) + point(i, j + 1)) * (1.0 / 3.0);
      if (!in_notch(cl)) lattice_tris.push_back(lower);
      if (!in_notch(cu)) lattice_tris.push_back(upper);
    }

  std::vector<int> renumber((nx + 1) * (ny + 1), -1);
  for (const auto& t : lattice_tris)
    for (int v : t) renumber[v] = 0;
  std::vector<Vec2> nodes;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      if (renumber[lattice_id(i, j)] == 0) {
        renumber[lattice_id(i, j)] = static_cast<int>(nodes.size());
        nodes.push_back(point(i, j));
      }
  for (auto& t : lattice_tris)
    for (int& v : t) v = renumber[v];
  return Triangulation(std::move(nodes), std::move(lattice_tris), params, domain);
}

ValidationReport check_admissible(const Triangulation& mesh) {
  const MeshParams& p = mesh.params();
  const double tol = 1e-9 * p.eps;
  ValidationReport rep;
  auto add = [&](std::string kind, int t, int other, int edge, double value, std::string msg) {
    rep.violations.push_back({std::move(kind), t, other, edge, value, std::move(msg)});
  };

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Tri c = mesh.coords(t);
    const double a = signed_area(c);
    if (a < 1e-14 * p.eps * p.eps) {
      add("orientation", t, -1, -1, a, "degenerate triangle");
      continue;
    }
    const auto ang = interior_angles(c);
    const double amin = *std::min_element(ang.begin(), ang.end());
    if (amin < p.theta0 - 1e-12) add("angle", t, -1, -1, amin, "interior angle below theta0");
    double lmax = 0.0;
    for (int i = 0; i < 3; ++i) lmax = std::max(lmax, norm(c[(i + 1) % 3] - c[i]));
    if (a < 0.5 * p.eps * std::sin(p.theta0) * lmax * (1.0 - 1e-12))
      add("area_bound", t, -1, -1, a, "area below eps sin(theta0) max edge / 2");
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const double l = mesh.edge_length(e);
    if (l < p.eps - tol || l > p.omega() + tol)
      add("edge_length", mesh.edge_triangles(e)[0], mesh.edge_triangles(e)[1], e, l, "edge length outside [eps, omega]");
  }
  for (int e : mesh.nonmanifold_edges())
    add("nonmanifold", mesh.edge_triangles(e)[0], mesh.edge_triangles(e)[1], e, 0.0, "edge shared by more than two triangles");

  // bucket grid for pairwise tests
  double xmin = std::numeric_limits<double>::infinity(), ymin = xmin, xmax = -xmin, ymax = -xmin, hmax = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e) hmax = std::max(hmax, mesh.edge_length(e));
  for (const Vec2& v : mesh.nodes()) {
    xmin = std::min(xmin, v.x), xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y), ymax = std::max(ymax, v.y);
  }
  if (mesh.num_triangles() > 0 && hmax > 0.0) {
    const int gx = std::max(1, std::min(4096, static_cast<int>((xmax - xmin) / hmax) + 1));
    const int gy = std::max(1, std::min(4096, static_cast<int>((ymax - ymin) / hmax) + 1));
    const double cw = (xmax - xmin) / gx + 1e-300, ch = (ymax - ymin) / gy + 1e-300;
    auto cell_of = [&](double x, double y) {
      const int i = std::clamp(static_cast<int>((x - xmin) / cw), 0, gx - 1);
      const int j = std::clamp(static_cast<int>((y - ymin) / ch), 0, gy - 1);
      return std::pair{i, j};
    };
    std::vector<std::vector<int>> bucket(static_cast<std::size_t>(gx) * gy);
    std::vector<std::array<int, 4>> box(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const Tri c = mesh.coords(t);
      auto [i0, j0] = cell_of(std::min({c[0].x, c[1].x, c[2].x}), std::min({c[0].y, c[1].y, c[2].y}));
      auto [i1, j1] = cell_of(std::max({c[0].x, c[1].x, c[2].x}), std::max({c[0].y, c[1].y, c[2].y}));
      box[t] = {i0, j0, i1, j1};
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) bucket[static_cast<std::size_t>(j) * gx + i].push_back(t);
    }
    std::vector<std::pair<int, int>> overlaps;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const Tri c = mesh.coords(t);
      std::vector<int> seen;
      for (int j = box[t][1]; j <= box[t][3]; ++j)
        for (int i = box[t][0]; i <= box[t][2]; ++i)
          for (int s : bucket[static_cast<std::size_t>(j) * gx + i])
            if (s > t) seen.push_back(s);
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (int s : seen)
        if (interiors_overlap(c, mesh.coords(s), tol)) overlaps.emplace_back(t, s);
    }
    for (auto [t, s] : overlaps) add("overlap", t, s, -1, 0.0, "triangle interiors overlap");

    for (int n = 0; n < mesh.num_nodes(); ++n) {
      const Vec2& x = mesh.node(n);
      auto [i, j] = cell_of(x.x, x.y);
      for (int t : bucket[static_cast<std::size_t>(j) * gx + i]) {
        const auto& tv = mesh.triangle(t);
        if (tv[0] == n || tv[1] == n || tv[2] == n) continue;
        for (int k = 0; k < 3; ++k) {
          const Vec2& a = mesh.node(tv[k]);
          const Vec2& b = mesh.node(tv[(k + 1) % 3]);
          if (point_segment_distance(x, a, b) <= tol && norm(x - a) > tol && norm(x - b) > tol)
            add("nonconforming", t, -1, mesh.triangle_edges(t)[k], static_cast<double>(n), "node lies inside an edge");
        }
      }
    }
  }

  if (mesh.has_domain()) {
    double covered = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) covered += mesh.area_in_omega(t);
    const Rect& r = mesh.domain().omega;
    const double missing = mesh.domain().body_area() - covered;
    if (missing > 1e-10 * p.eps * 2.0 * (r.width() + r.height()))
      add("coverage", -1, -1, -1, missing, "triangles do not cover omega");
  }

  std::stable_sort(rep.violations.begin(), rep.violations.end(),
                   [](const Violation& a, const Violation& b) { return a.triangle < b.triangle; });
  return rep;
}

DisplacementField interpolate(const Triangulation& mesh, const LoadProgram& g, double t) {
  std::vector<Vec2> v(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) v[i] = g.g(t, mesh.node(i));
  return DisplacementField::on(mesh, std::move(v));
}

StrainHint hint_from_set(const Triangulation& mesh, const TriangleSet& s, int min_size) {
  StrainHint hint;
  for (const TriangleSet& comp : edge_components(mesh, s)) {
    if (static_cast<int>(comp.size()) < min_size) continue;
    Vec2 c{0.0, 0.0};
    for (int t : comp.ids) c += mesh.centroid(t);
    c = c * (1.0 / comp.size());
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int t : comp.ids) {
      const Vec2 d = mesh.centroid(t) - c;
      sxx += d.x * d.x, sxy += d.x * d.y, syy += d.y * d.y;
    }
    const double ang = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    const Vec2 dir{std::cos(ang), std::sin(ang)};
    double smin = 0.0, smax = 0.0, wmax = 0.0;
    for (int t : comp.ids) {
      const Vec2 d = mesh.centroid(t) - c;
      smin = std::min(smin, dot(d, dir));
      smax = std::max(smax, dot(d, dir));
      wmax = std::max(wmax, std::abs(cross(dir, d)));
    }
    hint.bands.push_back({c + dir * smin, c + dir * smax, wmax + 0.5 * mesh.params().lattice()});
  }
  return hint;
}

Triangulation adapt_mesh(const Triangulation& prev, const TriangleSet& locked, const StrainHint& hint) {
  const MeshParams& p = prev.params();
  const auto& ref = prev.reference_nodes();
  std::vector<Vec2> nodes = ref;
  std::vector<std::uint8_t> pinned(prev.num_nodes(), 0);
  for (int t : locked.ids) {
    if (t < 0 || t >= prev.num_triangles()) throw InconsistentHistory("locked triangle " + std::to_string(t) + " not in mesh");
    for (int v : prev.triangle(t)) {
      nodes[v] = prev.node(v);
      pinned[v] = 1;
    }
  }

  std::vector<std::uint8_t> moved(prev.num_nodes(), 0);
  double h = 0.0;
  for (int e = 0; e < prev.num_edges(); ++e) h = h == 0.0 ? prev.edge_length(e) : std::min(h, prev.edge_length(e));
  for (const auto& band : hint.bands) {
    const Vec2 d0 = band.b - band.a;
    const double len = norm(d0);
    if (len == 0.0) continue;
    const Vec2 dir = d0 * (1.0 / len);
    for (int n = 0; n < prev.num_nodes(); ++n) {
      if (pinned[n] || moved[n] || prev.is_boundary_node(n)) continue;
      const Vec2 r = ref[n] - band.a;
      const double s = dot(r, dir);
      const double off = cross(dir, r);
      if (s < -0.5 * h || s > len + 0.5 * h || std::abs(off) > 0.3 * h) continue;
      nodes[n] = band.a + dir * s;
      moved[n] = 1;
    }
  }

  // revert snapped nodes until every touched triangle is admissible
  auto tri_at = [&](int t) {
    const auto& v = prev.triangle(t);
    return Tri{nodes[v[0]], nodes[v[1]], nodes[v[2]]};
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (int t = 0; t < prev.num_triangles(); ++t) {
      if (triangle_ok(tri_at(t), p)) continue;
      int worst = -1;
      double dmax = -1.0;
      for (int v : prev.triangle(t))
        if (moved[v] && norm(nodes[v] - ref[v]) > dmax) {
          dmax = norm(nodes[v] - ref[v]);
          worst = v;
        }
      if (worst < 0) {
        if (locked.contains(t)) continue;
        throw AdaptationFailed("triangle " + std::to_string(t) + " cannot be made admissible around locked triangles");
      }
      nodes[worst] = ref[worst];
      moved[worst] = 0;
      changed = true;
    }
  }
  Triangulation out = prev.with_nodes(std::move(nodes));
  for (int t : locked.ids)
    for (int v : prev.triangle(t))
      if (!(out.node(v) == prev.node(v))) throw AdaptationFailed("locked triangle moved");
  return out;
}

}  // namespace fracture
