#pragma once

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "fracture/mesh.hpp"
#include "fracture/triangle_set.hpp"

namespace fracture {

// Symmetric 2x2 strain; xy is the tensor component e12.
struct Strain {
  double xx = 0.0, yy = 0.0, xy = 0.0;
};

enum class FProfile { TruncatedQuadratic, Custom };

// Elasticity is stored as a 3x3 matrix acting on the Voigt vector
// (e11, e22, 2 e12). The identity tensor is diag(1, 1, 1/2), which gives the
// Frobenius norm.
struct MaterialModel {
  double kappa = 1.0;
  std::array<double, 9> elasticity = identity_voigt();
  FProfile profile = FProfile::TruncatedQuadratic;
  // Custom f: piecewise linear through (t, f) points, constant kappa beyond.
  std::vector<std::pair<double, double>> f_table;

  static std::array<double, 9> identity_voigt() { return {1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5}; }
  double contract(const Strain& e) const;
  double f(double t) const;
  // Ellipticity bounds c1 <= C xi:xi / |xi|^2 <= c2.
  double c1() const;
  double c2() const;
  void validate() const;
  bool operator==(const MaterialModel&) const = default;
};

struct EnergyReport {
  double total = 0.0;
  double elastic = 0.0;
  double crack = 0.0;
  double cracked_area = 0.0;
  int n_cracked = 0;
  std::vector<double> per_triangle;
};

Strain strain_of(const Tri& x, const std::array<Vec2, 3>& u);
Strain triangle_strain(const Triangulation& mesh, const DisplacementField& u, int t);
std::vector<Strain> all_strains(const Triangulation& mesh, const DisplacementField& u);

EnergyReport static_energy(const Triangulation& mesh, const DisplacementField& u, const MaterialModel& m,
                           bool per_triangle = false);
// Same sum with f replaced by min(f, f(R)) below the level R and f(R) above it.
double truncated_lower_bound(const Triangulation& mesh, const DisplacementField& u, const MaterialModel& m, double R);

TriangleSet classify_cracked(const Triangulation& mesh, const DisplacementField& u, const MaterialModel& m);
TriangleSet classify_cracked(const Triangulation& mesh, const std::vector<Strain>& strains, const MaterialModel& m);

// Monotone sequence of cracked sets; locked triangles remember their geometry.
class CrackHistory {
 public:
  void push(const Triangulation& mesh, const TriangleSet& cracked);
  const TriangleSet& accumulated() const { return accumulated_; }
  const std::vector<TriangleSet>& steps() const { return steps_; }
  // Throws InconsistentHistory if a locked triangle is absent from mesh.
  void check(const Triangulation& mesh) const;

 private:
  struct Locked {
    std::array<int, 3> nodes;
    Tri coords;
  };
  std::vector<TriangleSet> steps_;
  TriangleSet accumulated_;
  std::map<int, Locked> locked_;
};

EnergyReport history_energy(const Triangulation& mesh, const DisplacementField& u, const CrackHistory& history,
                            const MaterialModel& m);
EnergyReport history_energy(const Triangulation& mesh, const DisplacementField& u, const TriangleSet& history,
                            const MaterialModel& m);

}  // namespace fracture
