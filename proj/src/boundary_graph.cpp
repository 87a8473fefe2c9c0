#include <algorithm>
#include <boost/pending/disjoint_sets.hpp>
#include <set>
#include <unordered_map>

#include "fracture/error.hpp"
#include "fracture/voidmod.hpp"

namespace fracture {

std::map<int, int> BoundaryGraph::vertex_classes() const {
  std::map<int, int> c;
  for (const auto& [v, n] : degree) ++c[n / 2];
  return c;
}

std::map<int, int> BoundaryGraph::d_counts() const {
  std::map<int, int> c;
  for (int l : d_class) ++c[l];
  return c;
}

bool BoundaryGraph::euler_holds() const {
  return static_cast<long>(vertices.size()) - static_cast<long>(edges.size()) + num_faces == num_graph_components;
}

bool BoundaryGraph::degree_sum_holds() const {
  long lhs = 0, rhs = 0;
  for (const auto& [l, n] : d_counts()) lhs += static_cast<long>(l) * n;
  for (const auto& [k, n] : vertex_classes())
    if (k >= 2) rhs += static_cast<long>(k) * n;
  return lhs == rhs;
}

bool BoundaryGraph::edge_count_holds() const {
  long rhs = 0;
  for (const auto& [k, n] : vertex_classes()) rhs += static_cast<long>(k) * n;
  return static_cast<long>(edges.size()) == rhs;
}

BoundaryGraph build_boundary_graph(const Triangulation& mesh, const TriangleSet& H) {
  const int nt = mesh.num_triangles();
  const auto in = H.mask(nt);
  BoundaryGraph g;

  auto other_side = [&](int t, int i) {
    const auto& et = mesh.edge_triangles(mesh.triangle_edges(t)[i]);
    return et[0] == t ? et[1] : et[0];
  };
  auto is_boundary = [&](int t, int i) {
    const int o = other_side(t, i);
    return o < 0 || !in[o];
  };

  for (int t : H.ids)
    for (int i = 0; i < 3; ++i)
      if (is_boundary(t, i)) {
        const int e = mesh.triangle_edges(t)[i];
        g.edges.push_back(e);
        ++g.degree[mesh.edge(e)[0]];
        ++g.degree[mesh.edge(e)[1]];
      }
  std::sort(g.edges.begin(), g.edges.end());
  for (const auto& [v, n] : g.degree) g.vertices.push_back(v);

  // boundary cycles, H on the left
  g.components = edge_components(mesh, H);
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(nt) * 3, 0);
  for (const TriangleSet& comp : g.components) {
    std::vector<int> tuple;
    for (int t0 : comp.ids)
      for (int i0 = 0; i0 < 3; ++i0) {
        if (!is_boundary(t0, i0) || visited[3 * t0 + i0]) continue;
        int t = t0, i = i0;
        while (!visited[3 * t + i]) {
          visited[3 * t + i] = 1;
          tuple.push_back(mesh.triangle(t)[i]);
          const int b = mesh.triangle(t)[(i + 1) % 3];
          int j = (i + 1) % 3;
          while (!is_boundary(t, j)) {
            t = other_side(t, j);
            const auto& tv = mesh.triangle(t);
            j = static_cast<int>(std::find(tv.begin(), tv.end(), b) - tv.begin());
          }
          i = j;
        }
      }
    int l = 0;
    for (int v : tuple)
      if (g.degree[v] >= 4) ++l;
    g.tuples.push_back(std::move(tuple));
    g.d_class.push_back(l);
  }

  // components of the graph
  {
    std::unordered_map<int, int> local;
    for (std::size_t k = 0; k < g.vertices.size(); ++k) local[g.vertices[k]] = static_cast<int>(k);
    boost::disjoint_sets_with_storage<> ds(g.vertices.size());
    for (int e : g.edges) ds.union_set(local[mesh.edge(e)[0]], local[mesh.edge(e)[1]]);
    std::set<std::size_t> roots;
    for (std::size_t k = 0; k < g.vertices.size(); ++k) roots.insert(ds.find_set(k));
    g.num_graph_components = static_cast<int>(roots.size());
  }

  // complement of the closure: non-H triangles plus the regions outside the
  // mesh, one per boundary loop; loops oriented counterclockwise face infinity
  {
    const int nn = mesh.num_nodes();
    boost::disjoint_sets_with_storage<> loops(nn);
    std::vector<int> bedges;
    for (int e = 0; e < mesh.num_edges(); ++e)
      if (mesh.is_boundary_edge(e)) {
        bedges.push_back(e);
        loops.union_set(mesh.edge(e)[0], mesh.edge(e)[1]);
      }
    std::map<std::size_t, double> loop_area;
    for (int e : bedges) {
      const int t = mesh.edge_triangles(e)[0];
      const auto& tv = mesh.triangle(t);
      const int k = static_cast<int>(std::find(mesh.triangle_edges(t).begin(), mesh.triangle_edges(t).end(), e) -
                                     mesh.triangle_edges(t).begin());
      const Vec2& a = mesh.node(tv[k]);
      const Vec2& b = mesh.node(tv[(k + 1) % 3]);
      loop_area[loops.find_set(tv[k])] += 0.5 * cross(a, b);
    }
    std::map<std::size_t, int> virt;
    const int inf = nt;
    int next = nt + 1;
    for (const auto& [root, a] : loop_area) virt[root] = a > 0.0 ? inf : next++;
    boost::disjoint_sets_with_storage<> ds(next);
    for (int e = 0; e < mesh.num_edges(); ++e) {
      const auto& et = mesh.edge_triangles(e);
      if (et[1] >= 0) {
        if (!in[et[0]] && !in[et[1]]) ds.union_set(et[0], et[1]);
      } else if (!in[et[0]]) {
        ds.union_set(et[0], virt[loops.find_set(mesh.edge(e)[0])]);
      }
    }
    std::set<std::size_t> roots;
    const std::size_t inf_root = ds.find_set(inf);
    for (int t = 0; t < nt; ++t)
      if (!in[t]) roots.insert(ds.find_set(t));
    for (int k = nt + 1; k < next; ++k) roots.insert(ds.find_set(k));
    roots.erase(inf_root);
    g.bounded_complement = static_cast<int>(roots.size());
  }
  g.num_faces = static_cast<int>(g.components.size()) + g.bounded_complement;
  return g;
}

}  // namespace fracture
