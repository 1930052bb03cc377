#pragma once

#include <cmath>

namespace curveflow {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double c) const { return {c * x, c * y}; }
    Vec2 operator/(double c) const { return {x / c, y / c}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double c) { x *= c; y *= c; return *this; }
};

inline Vec2 operator*(double c, Vec2 v) { return {c * v.x, c * v.y}; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// z-component of the 3D cross product; positive when b lies to the left of a.
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }

// Counterclockwise quarter turn.  Applied to the unit tangent of a
// counterclockwise curve this gives the inward unit normal.
inline Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }

} // namespace curveflow
