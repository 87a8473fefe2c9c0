#include "fracture/geometry.hpp"

#include <algorithm>
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/box.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

namespace bg = boost::geometry;

namespace fracture {
namespace {

using BPoint = bg::model::d2::point_xy<double>;
using BPoly = bg::model::polygon<BPoint, false>;
using BBox = bg::model::box<BPoint>;

BPoly to_poly(const Tri& t) {
  BPoly p;
  const bool ccw = signed_area(t) >= 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec2& v = t[ccw ? i : 2 - i];
    bg::append(p.outer(), BPoint(v.x, v.y));
  }
  bg::append(p.outer(), p.outer().front());
  return p;
}

BPoly to_poly(const Polygon& poly) {
  BPoly p;
  for (const Vec2& v : poly) bg::append(p.outer(), BPoint(v.x, v.y));
  if (!poly.empty()) bg::append(p.outer(), p.outer().front());
  bg::correct(p);
  return p;
}

}  // namespace

double signed_area(const Tri& t) { return 0.5 * cross(t[1] - t[0], t[2] - t[0]); }

double polygon_area(const Polygon& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += cross(p[i], p[(i + 1) % p.size()]);
  return 0.5 * s;
}

double clipped_area(const Tri& t, const Rect& r) {
  const double x0 = std::min({t[0].x, t[1].x, t[2].x}), x1 = std::max({t[0].x, t[1].x, t[2].x});
  const double y0 = std::min({t[0].y, t[1].y, t[2].y}), y1 = std::max({t[0].y, t[1].y, t[2].y});
  if (x0 >= r.x0 && x1 <= r.x1 && y0 >= r.y0 && y1 <= r.y1) return std::abs(signed_area(t));
  if (x1 <= r.x0 || x0 >= r.x1 || y1 <= r.y0 || y0 >= r.y1) return 0.0;
  std::vector<BPoly> out;
  bg::intersection(to_poly(t), BBox(BPoint(r.x0, r.y0), BPoint(r.x1, r.y1)), out);
  double a = 0.0;
  for (const auto& p : out) a += bg::area(p);
  return a;
}

double clipped_area(const Tri& t, const Polygon& poly) {
  const bool ccw = signed_area(t) >= 0.0;
  Polygon cur = poly;
  for (int i = 0; i < 3 && !cur.empty(); ++i) {
    const Vec2 a = t[ccw ? i : 2 - i], b = t[ccw ? (i + 1) % 3 : (4 - i) % 3];
    const Vec2 e = b - a;
    auto side = [&](const Vec2& p) { return cross(e, p - a); };
    Polygon next;
    for (std::size_t k = 0; k < cur.size(); ++k) {
      const Vec2& p = cur[(k + cur.size() - 1) % cur.size()];
      const Vec2& q = cur[k];
      const double sp = side(p), sq = side(q);
      if (sq >= 0.0) {
        if (sp < 0.0) next.push_back(p + (q - p) * (sp / (sp - sq)));
        next.push_back(q);
      } else if (sp >= 0.0) {
        next.push_back(p + (q - p) * (sp / (sp - sq)));
      }
    }
    cur = std::move(next);
  }
  return cur.size() < 3 ? 0.0 : std::abs(polygon_area(cur));
}

bool point_in_polygon(const Vec2& p, const Polygon& poly) { return bg::within(BPoint(p.x, p.y), to_poly(poly)); }

std::vector<Polygon> clip_polygon(const Polygon& poly, const Rect& r) {
  std::vector<BPoly> out;
  bg::intersection(to_poly(poly), BBox(BPoint(r.x0, r.y0), BPoint(r.x1, r.y1)), out);
  std::vector<Polygon> res;
  for (const auto& p : out) {
    Polygon q;
    for (std::size_t i = 0; i + 1 < p.outer().size(); ++i) q.push_back({p.outer()[i].x(), p.outer()[i].y()});
    res.push_back(std::move(q));
  }
  return res;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  double s = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return norm(p - (a + d * s));
}

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d), point_segment_distance(c, a, b),
                   point_segment_distance(d, a, b)});
}

double triangle_distance(const Tri& a, const Tri& b) { return bg::distance(to_poly(a), to_poly(b)); }

bool interiors_overlap(const Tri& a, const Tri& b, double tol) {
  auto separated_by = [&](const Tri& s) {
    const double orient = signed_area(s) >= 0.0 ? 1.0 : -1.0;
    for (int i = 0; i < 3; ++i) {
      const Vec2 e = s[(i + 1) % 3] - s[i];
      const Vec2 n{e.y * orient, -e.x * orient};  // outward normal
      const double len = norm(n);
      if (len == 0.0) continue;
      const double smax = dot(n, s[i]) / len;
      const Tri& other = (&s == &a) ? b : a;
      const double omin = std::min({dot(n, other[0]), dot(n, other[1]), dot(n, other[2])}) / len;
      if (omin >= smax - tol) return true;
    }
    return false;
  };
  return !(separated_by(a) || separated_by(b));
}

std::array<double, 3> interior_angles(const Tri& t) {
  std::array<double, 3> ang{};
  for (int i = 0; i < 3; ++i) {
    const Vec2 u = t[(i + 1) % 3] - t[i];
    const Vec2 v = t[(i + 2) % 3] - t[i];
    ang[i] = std::atan2(std::abs(cross(u, v)), dot(u, v));
  }
  return ang;
}

}  // namespace fracture
