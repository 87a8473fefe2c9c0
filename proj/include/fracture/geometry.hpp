#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace fracture {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  bool operator==(const Vec2& o) const = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(const Rect& o) const { return o.x0 >= x0 && o.y0 >= y0 && o.x1 <= x1 && o.y1 <= y1; }
  bool operator==(const Rect& o) const = default;
};

using Tri = std::array<Vec2, 3>;
using Polygon = std::vector<Vec2>;

// Signed area, positive for counterclockwise order.
double signed_area(const Tri& t);
double polygon_area(const Polygon& p);

// |T ∩ R| for an axis-aligned rectangle.
double clipped_area(const Tri& t, const Rect& r);
// |T ∩ P| for a simple polygon.
double clipped_area(const Tri& t, const Polygon& p);

bool point_in_polygon(const Vec2& p, const Polygon& poly);
// Pieces of a simple polygon inside a rectangle.
std::vector<Polygon> clip_polygon(const Polygon& p, const Rect& r);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
double segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);
// Euclidean distance between the convex hulls; 0 when they intersect.
double triangle_distance(const Tri& a, const Tri& b);

// True if the open interiors overlap by more than tol (separating axis test).
bool interiors_overlap(const Tri& a, const Tri& b, double tol);

// Interior angles at the three vertices, radians.
std::array<double, 3> interior_angles(const Tri& t);

}  // namespace fracture
