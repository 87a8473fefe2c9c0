#include "fracture/triangle_set.hpp"

#include <algorithm>
#include <boost/pending/disjoint_sets.hpp>
#include <map>

#include "fracture/mesh.hpp"

namespace fracture {

TriangleSet::TriangleSet(std::vector<int> v) : ids(std::move(v)) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

TriangleSet TriangleSet::from_mask(const std::vector<std::uint8_t>& mask) {
  TriangleSet s;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) s.ids.push_back(static_cast<int>(i));
  return s;
}

std::vector<std::uint8_t> TriangleSet::mask(int n_triangles) const {
  std::vector<std::uint8_t> m(n_triangles, 0);
  for (int t : ids)
    if (t >= 0 && t < n_triangles) m[t] = 1;
  return m;
}

bool TriangleSet::contains(int id) const { return std::binary_search(ids.begin(), ids.end(), id); }

bool TriangleSet::subset_of(const TriangleSet& o) const {
  return std::includes(o.ids.begin(), o.ids.end(), ids.begin(), ids.end());
}

TriangleSet TriangleSet::unite(const TriangleSet& o) const {
  TriangleSet r;
  std::set_union(ids.begin(), ids.end(), o.ids.begin(), o.ids.end(), std::back_inserter(r.ids));
  return r;
}

TriangleSet TriangleSet::minus(const TriangleSet& o) const {
  TriangleSet r;
  std::set_difference(ids.begin(), ids.end(), o.ids.begin(), o.ids.end(), std::back_inserter(r.ids));
  return r;
}

TriangleSet TriangleSet::intersect(const TriangleSet& o) const {
  TriangleSet r;
  std::set_intersection(ids.begin(), ids.end(), o.ids.begin(), o.ids.end(), std::back_inserter(r.ids));
  return r;
}

double set_area(const Triangulation& mesh, const TriangleSet& s) {
  double a = 0.0;
  for (int t : s.ids) a += mesh.area(t);
  return a;
}

std::vector<int> boundary_edges(const Triangulation& mesh, const TriangleSet& s) {
  const auto in = s.mask(mesh.num_triangles());
  std::vector<int> out;
  for (int t : s.ids)
    for (int e : mesh.triangle_edges(t)) {
      const auto& et = mesh.edge_triangles(e);
      const int other = et[0] == t ? et[1] : et[0];
      if (other < 0 || !in[other]) out.push_back(e);
    }
  std::sort(out.begin(), out.end());
  return out;
}

double boundary_length(const Triangulation& mesh, const TriangleSet& s) {
  double l = 0.0;
  for (int e : boundary_edges(mesh, s)) l += mesh.edge_length(e);
  return l;
}

double interior_boundary_length(const Triangulation& mesh, const TriangleSet& s) {
  double l = 0.0;
  for (int e : boundary_edges(mesh, s))
    if (!mesh.is_boundary_edge(e)) l += mesh.edge_length(e);
  return l;
}

namespace {

std::vector<TriangleSet> group(const TriangleSet& s, boost::disjoint_sets_with_storage<>& ds) {
  std::map<int, std::vector<int>> by_root;
  for (std::size_t i = 0; i < s.ids.size(); ++i) by_root[static_cast<int>(ds.find_set(i))].push_back(s.ids[i]);
  std::vector<TriangleSet> out;
  for (auto& [root, v] : by_root) out.emplace_back(std::move(v));
  std::sort(out.begin(), out.end(), [](const TriangleSet& a, const TriangleSet& b) { return a.ids[0] < b.ids[0]; });
  return out;
}

}  // namespace

std::vector<TriangleSet> edge_components(const Triangulation& mesh, const TriangleSet& s) {
  std::vector<int> local(mesh.num_triangles(), -1);
  for (std::size_t i = 0; i < s.ids.size(); ++i) local[s.ids[i]] = static_cast<int>(i);
  boost::disjoint_sets_with_storage<> ds(s.ids.size());
  for (int t : s.ids)
    for (int e : mesh.triangle_edges(t)) {
      const auto& et = mesh.edge_triangles(e);
      const int other = et[0] == t ? et[1] : et[0];
      if (other >= 0 && local[other] >= 0) ds.union_set(local[t], local[other]);
    }
  return group(s, ds);
}

std::vector<TriangleSet> vertex_components(const Triangulation& mesh, const TriangleSet& s) {
  std::vector<int> local(mesh.num_triangles(), -1);
  for (std::size_t i = 0; i < s.ids.size(); ++i) local[s.ids[i]] = static_cast<int>(i);
  boost::disjoint_sets_with_storage<> ds(s.ids.size());
  for (int t : s.ids)
    for (int v : mesh.triangle(t))
      for (int other : mesh.node_triangles(v))
        if (local[other] >= 0) ds.union_set(local[t], local[other]);
  return group(s, ds);
}

std::vector<int> set_nodes(const Triangulation& mesh, const TriangleSet& s) {
  std::vector<int> n;
  for (int t : s.ids)
    for (int v : mesh.triangle(t)) n.push_back(v);
  std::sort(n.begin(), n.end());
  n.erase(std::unique(n.begin(), n.end()), n.end());
  return n;
}

}  // namespace fracture
