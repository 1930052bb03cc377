#include "curveflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace curveflow::geom {

namespace {

// Arc length of a circular arc with chord c and curvature kappa_edge:
// (2/kappa) asin(kappa c / 2).  Exact on circles, fourth-order on smooth
// curves; the series branch keeps the straight-line limit well conditioned.
double edge_arc_length(double chord, double kappa_edge) {
    const double t = std::abs(kappa_edge) * chord / 2.0;
    if (t < 1e-4) {
        const double t2 = t * t;
        return chord * (1.0 + t2 / 6.0 + 3.0 * t2 * t2 / 40.0);
    }
    if (t >= 1.0)
        throw NumericError("edge arc: chord exceeds osculating diameter "
                           "(curvature no longer resolved)");
    return chord * std::asin(t) / t;
}

// Signed circumscribed-circle curvature at vertex i of the triple
// (prev, here, next); positive when the triple turns left.
double menger_curvature(Vec2 prev, Vec2 here, Vec2 next) {
    const Vec2 a = here - prev;
    const Vec2 b = next - here;
    const Vec2 c = next - prev;
    const double denom = norm(a) * norm(b) * norm(c);
    if (!(denom > 0.0)) throw NumericError("curvature: coincident vertices");
    return 2.0 * cross(a, b) / denom;
}

void check_size(std::size_t have, std::size_t want, const char* where) {
    if (have != want)
        throw std::invalid_argument(std::string(where) + ": field size " +
                                    std::to_string(have) + " does not match grid size " +
                                    std::to_string(want));
}

} // namespace

GeometrySnapshot snapshot(const ClosedCurve& curve) {
    const std::size_t n = curve.size();
    const auto& p = curve.vertices();
    GeometrySnapshot snap;
    snap.x = p;

    std::vector<double> chord(n);
    double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        chord[i] = norm(p[(i + 1) % n] - p[i]);
        cmin = std::min(cmin, chord[i]);
        cmax = std::max(cmax, chord[i]);
    }
    // The stencils below assume near-uniform sampling; refuse grids that
    // have drifted past a 3:2 edge-length ratio instead of returning
    // quietly degraded derivatives.
    if (cmax > 1.5 * cmin)
        throw std::invalid_argument("snapshot: edge lengths spread beyond 3:2 "
                                    "(resample before taking diagnostics)");

    snap.g.resize(n);
    snap.tangent.resize(n);
    snap.normal.resize(n);
    snap.kappa.resize(n);
    snap.S.resize(n);
    snap.w.resize(n);
    const double du = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 prev = p[(i + n - 1) % n];
        const Vec2 next = p[(i + 1) % n];
        const Vec2 phi_u = (next - prev) / (2.0 * du);
        snap.g[i] = norm2(phi_u);
        const double len = norm(phi_u);
        if (!(len > 0.0)) throw NumericError("snapshot: vanishing tangent");
        snap.tangent[i] = phi_u / len;
        snap.normal[i] = rot90(snap.tangent[i]);
        snap.kappa[i] = menger_curvature(prev, p[i], next);
        snap.S[i] = snap.kappa[i] + 0.5 * dot(p[i], snap.normal[i]);
        snap.w[i] = std::exp(-0.25 * norm2(p[i]));
    }

    snap.gamma.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double g_u =
            (snap.g[(i + 1) % n] - snap.g[(i + n - 1) % n]) / (2.0 * du);
        snap.gamma[i] = g_u / (2.0 * snap.g[i]);
    }

    snap.edge_arc.resize(n);
    snap.ds.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double kappa_edge = 0.5 * (snap.kappa[i] + snap.kappa[(i + 1) % n]);
        snap.edge_arc[i] = edge_arc_length(chord[i], kappa_edge);
    }
    for (std::size_t i = 0; i < n; ++i)
        snap.ds[i] = 0.5 * (snap.edge_arc[(i + n - 1) % n] + snap.edge_arc[i]);

    snap.dS = arclength_derivative(snap, snap.S);
    snap.d2S.resize(n);
    const std::vector<double> hess = covariant_hessian(snap, snap.S);
    for (std::size_t i = 0; i < n; ++i) snap.d2S[i] = hess[i] / snap.g[i];
    return snap;
}

KinematicFields kinematic_fields(const ClosedCurve& curve) {
    const std::size_t n = curve.size();
    const auto& p = curve.vertices();
    KinematicFields kin;
    kin.normal.resize(n);
    kin.kappa.resize(n);
    kin.S.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 prev = p[(i + n - 1) % n];
        const Vec2 next = p[(i + 1) % n];
        const Vec2 c = next - prev;
        const double len = norm(c);
        if (!(len > 0.0)) throw NumericError("kinematic_fields: vanishing tangent");
        kin.normal[i] = rot90(c / len);
        kin.kappa[i] = menger_curvature(prev, p[i], next);
        kin.S[i] = kin.kappa[i] + 0.5 * dot(p[i], kin.normal[i]);
    }
    return kin;
}

ClosedCurve resample_uniform(const ClosedCurve& curve, std::size_t n) {
    if (n < ClosedCurve::min_vertices)
        throw std::invalid_argument("resample_uniform: need at least 16 vertices");
    const CurveSpline spline(curve.vertices());
    const double total = spline.total_length();
    std::vector<Vec2> pts(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double s = total * static_cast<double>(j) / static_cast<double>(n);
        pts[j] = spline.eval(spline.parameter_at_arclength(s));
    }
    return ClosedCurve(std::move(pts));
}

double edge_length_spread(const ClosedCurve& curve) {
    const std::size_t n = curve.size();
    const auto& p = curve.vertices();
    double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = norm(p[(i + 1) % n] - p[i]);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
    }
    return cmax / cmin - 1.0;
}

std::vector<double> l_operator(const GeometrySnapshot& snap, const std::vector<double>& f) {
    const std::size_t n = snap.size();
    check_size(f.size(), n, "l_operator");
    // Flux form: conductance (w_i + w_{i+1}) / (2 edge_arc_i) per edge,
    // divided by the weighted vertex measure w_i ds_i.  Summation against
    // h_i w_i ds_i telescopes to a symmetric edge sum, so self-adjointness
    // holds to roundoff rather than to discretization order.
    std::vector<double> out(n);
    std::vector<double> flux(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        flux[i] = 0.5 * (snap.w[i] + snap.w[j]) * (f[j] - f[i]) / snap.edge_arc[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t im = (i + n - 1) % n;
        out[i] = (flux[i] - flux[im]) / (snap.w[i] * snap.ds[i]);
    }
    return out;
}

std::vector<double> laplacian(const GeometrySnapshot& snap, const std::vector<double>& f) {
    const std::size_t n = snap.size();
    check_size(f.size(), n, "laplacian");
    std::vector<double> out(n);
    std::vector<double> flux(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        flux[i] = (f[j] - f[i]) / snap.edge_arc[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t im = (i + n - 1) % n;
        out[i] = (flux[i] - flux[im]) / snap.ds[i];
    }
    return out;
}

double weighted_integral(const GeometrySnapshot& snap, const std::vector<double>& f,
                         bool weighted) {
    const std::size_t n = snap.size();
    check_size(f.size(), n, "weighted_integral");
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += f[i] * (weighted ? snap.w[i] : 1.0) * snap.ds[i];
    return acc;
}

std::vector<double> parameter_derivative(const std::vector<double>& f) {
    const std::size_t n = f.size();
    if (n < 3) throw std::invalid_argument("parameter_derivative: need >= 3 samples");
    std::vector<double> out(n);
    const double scale = static_cast<double>(n) / 2.0; // 1/(2 du), du = 1/n
    for (std::size_t i = 0; i < n; ++i)
        out[i] = (f[(i + 1) % n] - f[(i + n - 1) % n]) * scale;
    return out;
}

std::vector<double> arclength_derivative(const GeometrySnapshot& snap,
                                         const std::vector<double>& f) {
    const std::size_t n = snap.size();
    check_size(f.size(), n, "arclength_derivative");
    std::vector<double> out = parameter_derivative(f);
    for (std::size_t i = 0; i < n; ++i) out[i] /= std::sqrt(snap.g[i]);
    return out;
}

std::vector<double> covariant_hessian(const GeometrySnapshot& snap,
                                      const std::vector<double>& f) {
    const std::size_t n = snap.size();
    check_size(f.size(), n, "covariant_hessian");
    std::vector<double> out(n);
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const std::vector<double> f_u = parameter_derivative(f);
    for (std::size_t i = 0; i < n; ++i) {
        const double f_uu =
            (f[(i + 1) % n] - 2.0 * f[i] + f[(i + n - 1) % n]) * n2;
        out[i] = f_uu - snap.gamma[i] * f_u[i];
    }
    return out;
}

} // namespace curveflow::geom
