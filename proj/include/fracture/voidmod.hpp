#pragma once

#include <array>
#include <map>
#include <vector>

#include "fracture/mesh.hpp"
#include "fracture/triangle_set.hpp"

namespace fracture {

// Boundary graph of an induced set H: vertices and edges of ∂H, bounded faces.
struct BoundaryGraph {
  std::vector<int> vertices;          // node ids, sorted
  std::vector<int> edges;             // edge ids, sorted
  std::map<int, int> degree;          // node -> number of boundary edges at it
  std::vector<TriangleSet> components;  // edge-connected components of H
  std::vector<std::vector<int>> tuples;  // per component: its boundary cycles, concatenated
  std::vector<int> d_class;           // per component: tuple entries with degree >= 4
  int bounded_complement = 0;         // bounded components of the complement of the closure
  int num_faces = 0;                  // bounded faces
  int num_graph_components = 0;

  // #V_{2k} for k >= 1
  std::map<int, int> vertex_classes() const;
  // #D_l for l >= 0
  std::map<int, int> d_counts() const;
  bool euler_holds() const;
  // sum_l l #D_l == sum_{k>=2} k #V_{2k}
  bool degree_sum_holds() const;
  // #E == sum_k k #V_{2k}
  bool edge_count_holds() const;
};

BoundaryGraph build_boundary_graph(const Triangulation& mesh, const TriangleSet& H);

enum class HealMode { ElasticExtension, McShane };

struct VoidModParams {
  double eta = 0.2;
  HealMode heal_mode = HealMode::ElasticExtension;

  void validate() const;
  bool operator==(const VoidModParams&) const = default;
};

// eps^2 / eta^2
double small_area(const Triangulation& mesh, const VoidModParams& p);

// Areas of the complement pieces of a set, with everything outside the mesh
// treated as one unbounded region.
class ComplementMap {
 public:
  ComplementMap(const Triangulation& mesh, const TriangleSet& H);
  // |sat(Z)| for Z ⊂ H.
  double saturated_area(const TriangleSet& Z) const;
  // Bounded complement pieces (each a set of non-H triangles).
  const std::vector<TriangleSet>& holes() const { return holes_; }

 private:
  const Triangulation& mesh_;
  std::vector<std::uint8_t> in_h_;
  std::vector<int> comp_;  // non-H triangle -> piece id
  std::vector<double> comp_area_;
  std::vector<std::uint8_t> comp_unbounded_;
  std::vector<std::vector<int>> comp_h_neighbors_;
  std::vector<TriangleSet> holes_;
};

TriangleSet fill_holes(const Triangulation& mesh, const TriangleSet& A, const VoidModParams& p);

struct HealResult {
  DisplacementField u;
  double ratio = 0.0;
};

// Extends u over Z keeping it on the triangles touching Z outside Y.
HealResult heal_component(const Triangulation& mesh, const TriangleSet& Z, const DisplacementField& u,
                          const TriangleSet& Y, const VoidModParams& p);

struct RemovalResult {
  TriangleSet kept;
  DisplacementField u;
  std::vector<TriangleSet> removed_groups;
  double max_ratio = 0.0;
  int wide_groups = 0;  // removed groups touching the rest in more than two points
};

// Removes pieces cut off by at most max_cuts vertices of degree >= 4 whose
// saturation is small and which keep omega away from the mesh boundary.
RemovalResult remove_small_pieces(const Triangulation& mesh, const TriangleSet& B, const DisplacementField& u,
                                  const VoidModParams& p, int max_cuts);
RemovalResult remove_separating_small(const Triangulation& mesh, const TriangleSet& B, const DisplacementField& u,
                                      const VoidModParams& p);

struct TriangleHealResult {
  TriangleSet kept;
  DisplacementField u;
  std::array<int, 4> m_counts{};  // #M_j
  std::vector<int> healed;
  std::vector<int> not_healable;  // in M_0 or M_1 without an exclusive vertex
  double max_ratio = 0.0;
};

TriangleHealResult heal_triangles(const Triangulation& mesh, const TriangleSet& H, const DisplacementField& u,
                                  const VoidModParams& p);

struct ModStats {
  double area_A = 0.0;
  double area_Amod = 0.0;
  double perim_Amod = 0.0;
  int n_components = 0;
  int healed_triangle_count = 0;
  int removed_component_count = 0;
  int filled_triangle_count = 0;
  int peeled_triangle_count = 0;
  double energy_in = 0.0;
  double energy_out = 0.0;
  double changed_area = 0.0;
  double max_heal_ratio = 0.0;
  // measured constants
  double perimeter_excess = 0.0;  // perim - 2|A| / (eps sin theta0)
  double c_perimeter = 0.0;       // excess / eta
  double c_eta = 0.0;             // |A_mod| / eps
  double c_components = 0.0;      // n_components eps / eta
  // length of ∂A_mod shared with filled triangles
  double filled_boundary_length = 0.0;
};

struct ModResult {
  TriangleSet a_mod;
  DisplacementField u_mod;
  TriangleSet t_mod;  // input triangles kept in A_mod
  ModStats stats;
};

ModResult modify_voids(const Triangulation& mesh, const TriangleSet& A, const DisplacementField& u,
                       const VoidModParams& p);

}  // namespace fracture
