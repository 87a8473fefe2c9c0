#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracture/geometry.hpp"
#include "fracture/triangle_set.hpp"

namespace fracture {

class LoadProgram;

struct MeshParams {
  double theta0 = 0.3490658503988659;  // 20 degrees
  double eps = 1.0 / 16.0;
  double omega_factor = 1e6;
  double bg_dist_factor = 1e6;

  double omega() const { return omega_factor * eps; }
  // Lattice spacing of the background mesh.
  double lattice() const { return 2.0 * eps * std::cos(theta0); }
  void validate() const;
  bool operator==(const MeshParams&) const = default;
};

// Body Ω inside the enclosing rectangle Ω'. Notches are removed from both.
struct Domain {
  Rect omega{0.0, 0.0, 1.0, 1.0};
  Rect omega_prime{0.0, -0.25, 1.0, 1.25};
  std::vector<Polygon> notches;

  void validate() const;
  // |Ω minus notches|
  double body_area() const;
  // Sides of Ω lying inside Ω' (where the boundary datum acts).
  std::vector<std::array<Vec2, 2>> dirichlet_part() const;
  bool operator==(const Domain&) const = default;
};

class Triangulation {
 public:
  // Triangles are reoriented counterclockwise. Without a background mask every
  // triangle counts as a background triangle.
  Triangulation(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> triangles, MeshParams params,
                std::optional<Domain> domain = std::nullopt, std::vector<std::uint8_t> background = {},
                std::shared_ptr<const std::vector<Vec2>> reference = nullptr);

  std::uint64_t id() const { return id_; }
  const MeshParams& params() const { return params_; }
  bool has_domain() const { return domain_.has_value(); }
  const Domain& domain() const { return *domain_; }
  const std::optional<Domain>& domain_opt() const { return domain_; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_triangles() const { return static_cast<int>(tris_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Vec2>& nodes() const { return nodes_; }
  const Vec2& node(int i) const { return nodes_[i]; }
  const std::vector<std::array<int, 3>>& triangles() const { return tris_; }
  const std::array<int, 3>& triangle(int t) const { return tris_[t]; }
  Tri coords(int t) const { return {nodes_[tris_[t][0]], nodes_[tris_[t][1]], nodes_[tris_[t][2]]}; }
  Vec2 centroid(int t) const;

  // Edge i of triangle t joins local vertices i and i+1.
  const std::array<int, 3>& triangle_edges(int t) const { return tri_edges_[t]; }
  const std::array<int, 2>& edge(int e) const { return edges_[e]; }
  // Incident triangles; the second is -1 on the mesh boundary.
  const std::array<int, 2>& edge_triangles(int e) const { return edge_tris_[e]; }
  bool is_boundary_edge(int e) const { return edge_tris_[e][1] < 0; }
  double edge_length(int e) const { return norm(nodes_[edges_[e][1]] - nodes_[edges_[e][0]]); }
  int find_edge(int a, int b) const;
  std::span<const int> node_triangles(int n) const;
  bool is_boundary_node(int n) const { return boundary_node_[n] != 0; }
  const std::vector<int>& nonmanifold_edges() const { return nonmanifold_; }

  double area(int t) const { return area_[t]; }
  // |T ∩ Ω|, equal to |T| without a domain.
  double area_in_omega(int t) const { return area_omega_[t]; }
  // Triangles not meeting the open body; their nodes carry the boundary datum.
  bool is_collar(int t) const { return collar_[t] != 0; }
  bool is_background(int t) const { return background_[t] != 0; }
  const std::vector<std::uint8_t>& background_mask() const { return background_; }
  const std::vector<Vec2>& reference_nodes() const { return *reference_; }
  std::shared_ptr<const std::vector<Vec2>> reference_ptr() const { return reference_; }

  // Distance from T to the mesh boundary (∂Ω'), computed on first use.
  double boundary_distance(int t) const;
  // Distance from T to the nearest background triangle (+inf if none).
  double background_distance(int t) const;

  // Same connectivity, new coordinates.
  Triangulation with_nodes(std::vector<Vec2> nodes) const;

 private:
  void build();

  std::uint64_t id_;
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 3>> tris_;
  MeshParams params_;
  std::optional<Domain> domain_;
  std::vector<std::uint8_t> background_;
  std::shared_ptr<const std::vector<Vec2>> reference_;

  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 2>> edge_tris_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<int> node_tri_offset_, node_tri_list_;
  std::vector<std::uint8_t> boundary_node_, collar_;
  std::vector<double> area_, area_omega_;
  std::vector<int> nonmanifold_;

  struct Lazy {
    std::once_flag boundary_once, background_once;
    std::vector<double> boundary_dist, background_dist;
  };
  std::shared_ptr<Lazy> lazy_;
};

struct DisplacementField {
  std::uint64_t mesh_id = 0;
  std::vector<Vec2> values;

  static DisplacementField zeros(const Triangulation& mesh);
  static DisplacementField on(const Triangulation& mesh, std::vector<Vec2> values);
  // Rebinds to a mesh with the same node count.
  DisplacementField rebind(const Triangulation& mesh) const;
  void check(const Triangulation& mesh) const;
};

struct Violation {
  std::string kind;  // angle, edge_length, orientation, area_bound, overlap, nonconforming, nonmanifold, coverage
  int triangle = -1;
  int other = -1;
  int edge = -1;
  double value = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool admissible() const { return violations.empty(); }
  bool has(const std::string& kind) const;
};

Triangulation build_background_mesh(const Domain& domain, const MeshParams& params);
ValidationReport check_admissible(const Triangulation& mesh);
DisplacementField interpolate(const Triangulation& mesh, const LoadProgram& g, double t);

struct StrainHint {
  struct Band {
    Vec2 a, b;
    double half_width = 0.0;
  };
  std::vector<Band> bands;
  bool empty() const { return bands.empty(); }
};

// Line fits through the edge components of s with at least min_size triangles.
StrainHint hint_from_set(const Triangulation& mesh, const TriangleSet& s, int min_size = 3);

// Background coordinates, locked triangles kept verbatim, nodes near hint bands
// snapped onto the band center lines.
Triangulation adapt_mesh(const Triangulation& prev, const TriangleSet& locked, const StrainHint& hint);

}  // namespace fracture
