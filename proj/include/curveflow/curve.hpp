#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "curveflow/vec2.hpp"

namespace curveflow {

// Base class for failures of the numerics themselves (as opposed to misuse
// of an interface, which throws std::invalid_argument).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

namespace geom {

/// C2 periodic cubic interpolant through (t_i, y_i) with period `period`.
/// Knots must be strictly increasing; evaluation wraps modulo the period.
class PeriodicSpline {
public:
    PeriodicSpline() = default;
    PeriodicSpline(std::vector<double> knots, std::vector<double> values, double period);

    double eval(double t) const;
    double deriv(double t) const;

    std::size_t size() const { return knots_.size(); }
    double period() const { return period_; }

private:
    std::size_t segment(double& t) const;

    std::vector<double> knots_;
    std::vector<double> values_;
    std::vector<double> second_; // second derivatives at knots
    double period_ = 0.0;
};

/// Periodic cubic interpolant of a closed polygon, chord-length parameterized.
/// Supplies the smooth curve behind resampling and the quadratures of length,
/// enclosed area and centroid (Gauss rule per segment, exact for the cubic).
class CurveSpline {
public:
    explicit CurveSpline(const std::vector<Vec2>& points);

    Vec2 eval(double t) const;
    Vec2 deriv(double t) const;

    double total_length() const { return total_length_; }
    double parameter_period() const { return period_; }

    /// Parameter value at which arclength from the first vertex equals s.
    double parameter_at_arclength(double s) const;

    double area() const;
    Vec2 area_centroid() const;

private:
    double segment_arclength(std::size_t seg, double t0, double t1) const;

    PeriodicSpline sx_, sy_;
    std::vector<double> knots_;      // chordal parameter of input vertices
    std::vector<double> cum_length_; // arclength at each knot, cum_length_[0] = 0
    double period_ = 0.0;
    double total_length_ = 0.0;
};

/// Closed embedded plane curve as an ordered vertex loop, counterclockwise.
/// Construction validates vertex count (>= 16), finiteness, nondegenerate
/// edges and orientation; curves failing validation are rejected, never
/// repaired.  Simplicity is checkable on demand (is_simple), not enforced
/// per construction.
class ClosedCurve {
public:
    explicit ClosedCurve(std::vector<Vec2> vertices);

    std::size_t size() const { return pts_.size(); }
    const std::vector<Vec2>& vertices() const { return pts_; }
    Vec2 operator[](std::size_t i) const { return pts_[i]; }

    /// O(N^2) segment-intersection scan; true when no two non-adjacent
    /// edges cross.
    bool is_simple() const;

    static constexpr std::size_t min_vertices = 16;

private:
    std::vector<Vec2> pts_;
};

/// Arclength of the spline interpolant (not the polygon perimeter).
double curve_length(const ClosedCurve& curve);

/// Signed enclosed area via the shoelace line integral evaluated on the
/// spline interpolant.  Positive for the counterclockwise curves this
/// library admits.
double enclosed_area(const ClosedCurve& curve);

/// Area centroid of the enclosed region.
Vec2 centroid(const ClosedCurve& curve);

/// Symmetric Hausdorff distance between two closed polylines.
double hausdorff_distance(const ClosedCurve& a, const ClosedCurve& b);

ClosedCurve translate(const ClosedCurve& curve, Vec2 shift);
ClosedCurve scale(const ClosedCurve& curve, double factor);

ClosedCurve make_circle(double radius, std::size_t n);
ClosedCurve make_ellipse(double a, double b, std::size_t n);

/// Radial cosine perturbation of the sqrt(2) circle:
/// rho(theta) = sqrt(2) + sum_k amplitude_k cos(k theta).
ClosedCurve make_fourier_perturbed(const std::vector<std::pair<int, double>>& modes,
                                   std::size_t n);

} // namespace geom
} // namespace curveflow
