#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace fracture {

class Triangulation;

// Sorted, duplicate-free set of triangle ids. Ids are shared by all meshes
// with the same connectivity.
struct TriangleSet {
  std::vector<int> ids;

  TriangleSet() = default;
  explicit TriangleSet(std::vector<int> v);
  TriangleSet(std::initializer_list<int> v) : TriangleSet(std::vector<int>(v)) {}

  static TriangleSet from_mask(const std::vector<std::uint8_t>& mask);
  std::vector<std::uint8_t> mask(int n_triangles) const;

  bool contains(int id) const;
  bool empty() const { return ids.empty(); }
  std::size_t size() const { return ids.size(); }
  bool subset_of(const TriangleSet& o) const;

  TriangleSet unite(const TriangleSet& o) const;
  TriangleSet minus(const TriangleSet& o) const;
  TriangleSet intersect(const TriangleSet& o) const;

  bool operator==(const TriangleSet& o) const = default;
};

double set_area(const Triangulation& mesh, const TriangleSet& s);
// Edges incident to exactly one member triangle, mesh-boundary edges included.
std::vector<int> boundary_edges(const Triangulation& mesh, const TriangleSet& s);
double boundary_length(const Triangulation& mesh, const TriangleSet& s);
// Same, skipping edges on the mesh boundary.
double interior_boundary_length(const Triangulation& mesh, const TriangleSet& s);
// Components of the open set (triangles joined through shared edges).
std::vector<TriangleSet> edge_components(const Triangulation& mesh, const TriangleSet& s);
// Components of the closure (triangles joined through shared vertices).
std::vector<TriangleSet> vertex_components(const Triangulation& mesh, const TriangleSet& s);
std::vector<int> set_nodes(const Triangulation& mesh, const TriangleSet& s);

}  // namespace fracture
