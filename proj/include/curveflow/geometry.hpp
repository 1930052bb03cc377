#pragma once

#include <vector>

#include "curveflow/curve.hpp"

namespace curveflow::geom {

// Orientation and sign conventions, used everywhere downstream:
//   * curves are counterclockwise, nu is the inward unit normal (tangent
//     rotated by +90 degrees), kappa > 0 on convex arcs;
//   * the shrinker defect S = kappa + <x, nu>/2 vanishes identically on the
//     circle of radius sqrt(2) about the origin.

/// Per-vertex geometric state of a closed curve.  Parameter derivatives are
/// second-order central differences on the periodic grid; the curvature is
/// the signed circumscribed-circle (three-point) curvature, which is exact
/// on circles and second-order accurate on smooth curves.
struct GeometrySnapshot {
    std::vector<Vec2> x;      // vertex positions
    std::vector<double> g;     // metric |dphi/du|^2, u the periodic parameter
    std::vector<double> gamma; // Christoffel symbol g_u / (2g)
    std::vector<Vec2> tangent; // unit tangent
    std::vector<Vec2> normal;  // inward unit normal (tangent rotated +90)
    std::vector<double> kappa; // signed curvature
    std::vector<double> S;     // shrinker defect kappa + <x,nu>/2
    std::vector<double> dS;    // arclength derivative of S
    std::vector<double> d2S;   // Laplace-Beltrami of S (= S_ss here)
    std::vector<double> w;     // Gaussian weight exp(-|x|^2/4)
    std::vector<double> ds;    // vertex quadrature weight (dual arc length)
    std::vector<double> edge_arc; // arc length of edge i -> i+1

    std::size_t size() const { return x.size(); }
};

/// Fields needed to evaluate flow velocities; cheaper than a full snapshot.
struct KinematicFields {
    std::vector<Vec2> normal;
    std::vector<double> kappa;
    std::vector<double> S;
};

GeometrySnapshot snapshot(const ClosedCurve& curve);
KinematicFields kinematic_fields(const ClosedCurve& curve);

/// Redistribute n vertices at equal arclength along the periodic cubic
/// interpolant of the input.  Throws std::invalid_argument for n < 16.
ClosedCurve resample_uniform(const ClosedCurve& curve, std::size_t n);

/// Relative spread of edge lengths, max/min - 1; zero for perfectly uniform.
double edge_length_spread(const ClosedCurve& curve);

/// Stability operator L f = Laplacian(f) - <x, grad f>/2 in flux form:
/// exactly self-adjoint against the Gaussian-weighted vertex measure
/// (inner product sum f g w ds).
std::vector<double> l_operator(const GeometrySnapshot& snap, const std::vector<double>& f);

/// Plain Laplace-Beltrami in the same flux form (no Gaussian weight).
std::vector<double> laplacian(const GeometrySnapshot& snap, const std::vector<double>& f);

/// Quadrature sum f_i (w_i if weighted) ds_i over the curve.
double weighted_integral(const GeometrySnapshot& snap, const std::vector<double>& f,
                         bool weighted = true);

// Difference helpers on snapshot grids (periodic central differences).
std::vector<double> parameter_derivative(const std::vector<double>& f);
std::vector<double> arclength_derivative(const GeometrySnapshot& snap, const std::vector<double>& f);
/// Covariant Hessian component of a scalar, (f_uu - gamma f_u) in
/// parameter coordinates; divide by g for the Laplacian.
std::vector<double> covariant_hessian(const GeometrySnapshot& snap, const std::vector<double>& f);

} // namespace curveflow::geom
