#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "fracture/geometry.hpp"

namespace fracture {

enum class LoadKind { Zero, Stretch, Shear, Opening };

const char* to_string(LoadKind k);
LoadKind load_kind_from_string(const std::string& s);

// g(t, x) = s(t) * G(x). G is affine for Stretch and Shear; for Opening it moves
// the parts above y1 and below y0 rigidly apart with a cubic blend in between.
class LoadProgram {
 public:
  LoadKind kind = LoadKind::Zero;
  double amplitude = 0.0;
  std::array<double, 4> matrix{1.0, 0.0, 0.0, 1.0};  // row-major, Stretch only
  double y0 = 0.0, y1 = 1.0;                        // Opening blend band
  double t_end = 1.0;
  int n_steps = 20;
  // Piecewise linear s(t) through these points; empty means s(t) = t.
  std::vector<std::pair<double, double>> schedule;

  double delta() const { return t_end / n_steps; }
  double time(int k) const { return k == n_steps ? t_end : t_end * k / n_steps; }

  double s(double t) const;
  // Right derivative of s.
  double ds(double t) const;
  Vec2 shape(const Vec2& x) const;
  Vec2 g(double t, const Vec2& x) const { return shape(x) * s(t); }
  Vec2 dg_dt(double t, const Vec2& x) const { return shape(x) * ds(t); }

  void validate() const;
  bool operator==(const LoadProgram&) const = default;
};

}  // namespace fracture
