#include "fracture/load.hpp"

#include <algorithm>

#include "fracture/error.hpp"

namespace fracture {

const char* to_string(LoadKind k) {
  switch (k) {
    case LoadKind::Zero: return "zero";
    case LoadKind::Stretch: return "stretch";
    case LoadKind::Shear: return "shear";
    case LoadKind::Opening: return "opening";
  }
  return "zero";
}

LoadKind load_kind_from_string(const std::string& s) {
  if (s == "zero") return LoadKind::Zero;
  if (s == "stretch") return LoadKind::Stretch;
  if (s == "shear") return LoadKind::Shear;
  if (s == "opening") return LoadKind::Opening;
  throw ValidationError("unknown load preset '" + s + "'");
}

double LoadProgram::s(double t) const {
  if (schedule.empty()) return t;
  if (t <= schedule.front().first) return schedule.front().second;
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    const auto [ta, sa] = schedule[i - 1];
    const auto [tb, sb] = schedule[i];
    if (t <= tb) return sa + (sb - sa) * (t - ta) / (tb - ta);
  }
  return schedule.back().second;
}

double LoadProgram::ds(double t) const {
  if (schedule.empty()) return 1.0;
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    const auto [ta, sa] = schedule[i - 1];
    const auto [tb, sb] = schedule[i];
    if (t >= ta && t < tb) return (sb - sa) / (tb - ta);
  }
  return 0.0;
}

Vec2 LoadProgram::shape(const Vec2& x) const {
  switch (kind) {
    case LoadKind::Zero: return {0.0, 0.0};
    case LoadKind::Stretch:
      return Vec2{matrix[0] * x.x + matrix[1] * x.y, matrix[2] * x.x + matrix[3] * x.y} * amplitude;
    case LoadKind::Shear: return {amplitude * x.y, 0.0};
    case LoadKind::Opening: {
      const double r = std::clamp((x.y - y0) / (y1 - y0), 0.0, 1.0);
      return {0.0, amplitude * (r * r * (3.0 - 2.0 * r) - 0.5)};
    }
  }
  return {0.0, 0.0};
}

void LoadProgram::validate() const {
  if (!(t_end > 0.0)) throw ValidationError("t_end must be positive");
  if (n_steps < 1) throw ValidationError("n_steps must be at least 1");
  if (kind == LoadKind::Opening && !(y1 > y0)) throw ValidationError("opening band needs y1 > y0");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (!(schedule[i].first > schedule[i - 1].first)) throw ValidationError("load schedule times must increase");
}

}  // namespace fracture
