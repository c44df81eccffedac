#pragma once
#include <cmath>
#include <algorithm>

namespace wfem {

struct Vec2 {
    double x = 0.0, y = 0.0;
    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double c) const { return {c * x, c * y}; }
};
inline Vec2 operator*(double c, Vec2 v) { return v * c; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// signed, positive for counter-clockwise (a,b,c)
inline double signed_area(Vec2 a, Vec2 b, Vec2 c) {
    return 0.5 * cross(b - a, c - a);
}

inline double dist_point_segment(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double t = dot(p - a, ab) / dot(ab, ab);
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

} // namespace wfem
