#include "fracture/energy.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fracture/error.hpp"

namespace fracture {
namespace {

Eigen::Matrix3d mandel(const std::array<double, 9>& c) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = c[3 * i + j];
  const Eigen::Vector3d d(1.0, 1.0, std::sqrt(2.0));
  return d.asDiagonal() * m * d.asDiagonal();
}

}  // namespace

double MaterialModel::contract(const Strain& e) const {
  const double v[3] = {e.xx, e.yy, 2.0 * e.xy};
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += v[i] * elasticity[3 * i + j] * v[j];
  return s;
}

double MaterialModel::f(double t) const {
  if (profile == FProfile::TruncatedQuadratic) return std::min(t, kappa);
  if (t <= f_table.front().first) return f_table.front().second;
  for (std::size_t i = 1; i < f_table.size(); ++i) {
    const auto [ta, fa] = f_table[i - 1];
    const auto [tb, fb] = f_table[i];
    if (t <= tb) return fa + (fb - fa) * (t - ta) / (tb - ta);
  }
  return kappa;
}

double MaterialModel::c1() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(mandel(elasticity));
  return es.eigenvalues().minCoeff();
}

double MaterialModel::c2() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(mandel(elasticity));
  return es.eigenvalues().maxCoeff();
}

void MaterialModel::validate() const {
  if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < i; ++j)
      if (elasticity[3 * i + j] != elasticity[3 * j + i]) throw ValidationError("elasticity must be symmetric");
  if (!(c1() > 0.0)) throw ValidationError("elasticity must be positive definite");
  if (profile == FProfile::Custom) {
    if (f_table.size() < 2) throw ValidationError("f_table needs at least two points");
    if (f_table.front().first != 0.0 || f_table.front().second != 0.0) throw ValidationError("f_table must start at (0, 0)");
    const auto [t1, f1] = f_table[1];
    if (std::abs(f1 / t1 - 1.0) > 1e-9) throw ValidationError("f_table must have unit slope at 0");
    for (std::size_t i = 1; i < f_table.size(); ++i)
      if (!(f_table[i].first > f_table[i - 1].first) || f_table[i].second < f_table[i - 1].second)
        throw ValidationError("f_table must be increasing in t and nondecreasing in f");
    if (std::abs(f_table.back().second - kappa) > 1e-12 * kappa) throw ValidationError("f_table must end at kappa");
  }
}

Strain strain_of(const Tri& x, const std::array<Vec2, 3>& u) {
  const Vec2 a = x[1] - x[0], b = x[2] - x[0];
  const Vec2 du1 = u[1] - u[0], du2 = u[2] - u[0];
  const double det = cross(a, b);
  const double g00 = (du1.x * b.y - du2.x * a.y) / det;
  const double g01 = (-du1.x * b.x + du2.x * a.x) / det;
  const double g10 = (du1.y * b.y - du2.y * a.y) / det;
  const double g11 = (-du1.y * b.x + du2.y * a.x) / det;
  return {g00, g11, 0.5 * (g01 + g10)};
}

Strain triangle_strain(const Triangulation& mesh, const DisplacementField& u, int t) {
  u.check(mesh);
  const double eps = mesh.params().eps;
  if (mesh.area(t) < 1e-14 * eps * eps) throw DegenerateTriangle("triangle " + std::to_string(t) + " is degenerate");
  const auto& v = mesh.triangle(t);
  return strain_of(mesh.coords(t), {u.values[v[0]], u.values[v[1]], u.values[v[2]]});
}

std::vector<Strain> all_strains(const Triangulation& mesh, const DisplacementField& u) {
  u.check(mesh);
  std::vector<Strain> s(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) s[t] = triangle_strain(mesh, u, t);
  return s;
}

EnergyReport static_energy(const Triangulation& mesh, const DisplacementField& u, const MaterialModel& m,
                           bool per_triangle) {
  const auto strains = all_strains(mesh, u);
  const double eps = mesh.params().eps;
  EnergyReport r;
  if (per_triangle) r.per_triangle.resize(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double w = mesh.area_in_omega(t);
    const double c = m.contract(strains[t]);
    const double fv = m.f(eps * c);
    const double contrib = w / eps * fv;
    r.total += contrib;
    if (per_triangle) r.per_triangle[t] = contrib;
    if (m.profile == FProfile::TruncatedQuadratic) {
      if (eps * c < m.kappa) {
        r.elastic += w * c;
      } else if (w > 0.0) {
        r.cracked_area += w;
        ++r.n_cracked;
      }
    } else {
      r.elastic += contrib;
      if (fv >= m.kappa && w > 0.0) {
        r.cracked_area += w;
        ++r.n_cracked;
      }
    }
  }
  if (m.profile == FProfile::TruncatedQuadratic) r.crack = m.kappa * r.cracked_area / eps;
  return r;
}

double truncated_lower_bound(const Triangulation& mesh, const DisplacementField& u, const MaterialModel& m, double R) {
  const auto strains = all_strains(mesh, u);
  const double eps = mesh.params().eps;
  const double fR = m.f(R);
  double s = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double x = eps * m.contract(strains[t]);
    s += mesh.area_in_omega(t) / eps * (x < R ? m.f(x) : fR);
  }
  return s;
}

TriangleSet classify_cracked(const Triangulation& mesh, const std::vector<Strain>& strains, const MaterialModel& m) {
  const MeshParams& p = mesh.params();
  const double far = p.bg_dist_factor * p.eps;
  TriangleSet s;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const bool big = p.eps * m.contract(strains[t]) >= m.kappa;
    if (big || (!mesh.is_background(t) && mesh.background_distance(t) >= far)) s.ids.push_back(t);
  }
  return s;
}

TriangleSet classify_cracked(const Triangulation& mesh, const DisplacementField& u, const MaterialModel& m) {
  return classify_cracked(mesh, all_strains(mesh, u), m);
}

void CrackHistory::push(const Triangulation& mesh, const TriangleSet& cracked) {
  steps_.push_back(cracked);
  accumulated_ = accumulated_.unite(cracked);
  for (int t : cracked.ids)
    if (!locked_.count(t)) locked_[t] = {mesh.triangle(t), mesh.coords(t)};
}

void CrackHistory::check(const Triangulation& mesh) const {
  const double tol = 1e-9 * mesh.params().eps;
  for (const auto& [t, lk] : locked_) {
    bool ok = t < mesh.num_triangles() && mesh.triangle(t) == lk.nodes;
    if (ok) {
      const Tri c = mesh.coords(t);
      for (int i = 0; i < 3; ++i) ok = ok && norm(c[i] - lk.coords[i]) <= tol;
    }
    if (!ok) throw InconsistentHistory("locked triangle " + std::to_string(t) + " is absent from the mesh");
  }
}

EnergyReport history_energy(const Triangulation& mesh, const DisplacementField& u, const TriangleSet& history,
                            const MaterialModel& m) {
  const auto strains = all_strains(mesh, u);
  const double eps = mesh.params().eps;
  const auto cracked = history.unite(classify_cracked(mesh, strains, m)).mask(mesh.num_triangles());
  EnergyReport r;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (cracked[t]) {
      r.cracked_area += mesh.area(t);
      ++r.n_cracked;
    } else {
      r.elastic += mesh.area_in_omega(t) * m.contract(strains[t]);
    }
  }
  r.crack = m.kappa * r.cracked_area / eps;
  r.total = r.elastic + r.crack;
  return r;
}

EnergyReport history_energy(const Triangulation& mesh, const DisplacementField& u, const CrackHistory& history,
                            const MaterialModel& m) {
  history.check(mesh);
  return history_energy(mesh, u, history.accumulated(), m);
}

}  // namespace fracture
