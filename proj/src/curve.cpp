#include "curveflow/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curveflow/geometry.hpp"

namespace curveflow::geom {

namespace {

// 5-point Gauss-Legendre rule on [-1, 1]; exact through degree 9, which
// covers every polynomial integrand the spline quadratures produce.
constexpr double kGaussNode[5] = {
    0.0, -0.5384693101056831, 0.5384693101056831,
    -0.9061798459386640, 0.9061798459386640};
constexpr double kGaussWeight[5] = {
    0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
    0.2369268850561891, 0.2369268850561891};

// Thomas solve of a tridiagonal system; diagonals are copied since the
// sweep destroys them.
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
    return x;
}

// Cyclic tridiagonal solve via the Sherman-Morrison correction.
std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& lower,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& upper,
                                             const std::vector<double>& rhs,
                                             double corner_top, double corner_bottom) {
    const std::size_t n = diag.size();
    const double gamma = -diag[0];
    std::vector<double> d2 = diag;
    d2[0] -= gamma;
    d2[n - 1] -= corner_top * corner_bottom / gamma;

    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = corner_bottom;

    std::vector<double> y = solve_tridiagonal(lower, d2, upper, rhs);
    std::vector<double> z = solve_tridiagonal(lower, d2, upper, u);

    const double vy = y[0] + corner_top / gamma * y[n - 1];
    const double vz = z[0] + corner_top / gamma * z[n - 1];
    const double factor = vy / (1.0 + vz);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - factor * z[i];
    return x;
}

} // namespace

PeriodicSpline::PeriodicSpline(std::vector<double> knots, std::vector<double> values,
                               double period)
    : knots_(std::move(knots)), values_(std::move(values)), period_(period) {
    const std::size_t n = knots_.size();
    if (n < 3 || values_.size() != n)
        throw std::invalid_argument("PeriodicSpline: need >= 3 matching knots/values");
    if (!(period_ > 0.0))
        throw std::invalid_argument("PeriodicSpline: period must be positive");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(knots_[i + 1] > knots_[i]))
            throw std::invalid_argument("PeriodicSpline: knots must be strictly increasing");
    if (!(knots_.front() + period_ > knots_.back()))
        throw std::invalid_argument("PeriodicSpline: knots exceed one period");

    // Natural periodic C2 conditions: cyclic tridiagonal system in the
    // knot second derivatives.
    auto h = [&](std::size_t i) {
        return i + 1 < n ? knots_[i + 1] - knots_[i]
                         : knots_.front() + period_ - knots_.back();
    };
    auto val = [&](std::size_t i) { return values_[i % n]; };
    std::vector<double> lower(n), diag(n), upper(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double hm = h((i + n - 1) % n);
        const double hp = h(i);
        lower[i] = hm / 6.0;
        diag[i] = (hm + hp) / 3.0;
        upper[i] = hp / 6.0;
        rhs[i] = (val(i + 1) - val(i)) / hp - (val(i) - val(i + n - 1)) / hm;
    }
    second_ = solve_cyclic_tridiagonal(lower, diag, upper, rhs, lower[0], upper[n - 1]);
}

std::size_t PeriodicSpline::segment(double& t) const {
    const std::size_t n = knots_.size();
    const double t0 = knots_.front();
    t = t0 + std::fmod(t - t0, period_);
    if (t < t0) t += period_;
    // elements after the last knot still belong to the closing segment
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const std::size_t idx = static_cast<std::size_t>(it - knots_.begin());
    return idx == 0 ? n - 1 : idx - 1;
}

double PeriodicSpline::eval(double t) const {
    const std::size_t n = knots_.size();
    const std::size_t i = segment(t);
    const std::size_t j = (i + 1) % n;
    const double h = (i + 1 < n ? knots_[i + 1] : knots_.front() + period_) - knots_[i];
    const double a = t - knots_[i];
    const double b = h - a;
    return second_[i] * b * b * b / (6.0 * h) + second_[j] * a * a * a / (6.0 * h) +
           (values_[i] / h - second_[i] * h / 6.0) * b +
           (values_[j] / h - second_[j] * h / 6.0) * a;
}

double PeriodicSpline::deriv(double t) const {
    const std::size_t n = knots_.size();
    const std::size_t i = segment(t);
    const std::size_t j = (i + 1) % n;
    const double h = (i + 1 < n ? knots_[i + 1] : knots_.front() + period_) - knots_[i];
    const double a = t - knots_[i];
    const double b = h - a;
    return -second_[i] * b * b / (2.0 * h) + second_[j] * a * a / (2.0 * h) -
           (values_[i] / h - second_[i] * h / 6.0) +
           (values_[j] / h - second_[j] * h / 6.0);
}

CurveSpline::CurveSpline(const std::vector<Vec2>& points) {
    const std::size_t n = points.size();
    if (n < 3) throw std::invalid_argument("CurveSpline: need >= 3 points");
    knots_.resize(n);
    knots_[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double c = norm(points[i] - points[i - 1]);
        if (!(c > 0.0)) throw std::invalid_argument("CurveSpline: coincident points");
        knots_[i] = knots_[i - 1] + c;
    }
    const double closing = norm(points.front() - points.back());
    if (!(closing > 0.0)) throw std::invalid_argument("CurveSpline: coincident points");
    period_ = knots_.back() + closing;

    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = points[i].x;
        ys[i] = points[i].y;
    }
    sx_ = PeriodicSpline(knots_, xs, period_);
    sy_ = PeriodicSpline(knots_, ys, period_);

    cum_length_.resize(n + 1);
    cum_length_[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t1 = i + 1 < n ? knots_[i + 1] : period_;
        cum_length_[i + 1] = cum_length_[i] + segment_arclength(i, knots_[i], t1);
    }
    total_length_ = cum_length_.back();
}

Vec2 CurveSpline::eval(double t) const { return {sx_.eval(t), sy_.eval(t)}; }
Vec2 CurveSpline::deriv(double t) const { return {sx_.deriv(t), sy_.deriv(t)}; }

double CurveSpline::segment_arclength(std::size_t, double t0, double t1) const {
    const double mid = 0.5 * (t0 + t1);
    const double half = 0.5 * (t1 - t0);
    double acc = 0.0;
    for (int k = 0; k < 5; ++k)
        acc += kGaussWeight[k] * norm(deriv(mid + half * kGaussNode[k]));
    return acc * half;
}

double CurveSpline::parameter_at_arclength(double s) const {
    const std::size_t n = knots_.size();
    s = std::fmod(s, total_length_);
    if (s < 0.0) s += total_length_;
    auto it = std::upper_bound(cum_length_.begin(), cum_length_.end(), s);
    std::size_t seg = static_cast<std::size_t>(it - cum_length_.begin());
    seg = seg == 0 ? 0 : seg - 1;
    if (seg >= n) seg = n - 1;

    const double t0 = knots_[seg];
    const double t1 = seg + 1 < n ? knots_[seg + 1] : period_;
    const double target = s - cum_length_[seg];
    double lo = t0, hi = t1;
    double t = t0 + (t1 - t0) * target / std::max(cum_length_[seg + 1] - cum_length_[seg],
                                                   std::numeric_limits<double>::min());
    for (int iter = 0; iter < 60; ++iter) {
        const double f = segment_arclength(seg, t0, t) - target;
        if (std::abs(f) < 1e-15 * total_length_) break;
        if (f > 0.0) hi = t; else lo = t;
        const double speed = norm(deriv(t));
        double next = t - f / std::max(speed, std::numeric_limits<double>::min());
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        t = next;
    }
    return t;
}

double CurveSpline::area() const {
    // Shoelace line integral (1/2) closed-int (x y' - y x'), Gauss-exact on
    // each cubic segment.
    const std::size_t n = knots_.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t0 = knots_[i];
        const double t1 = i + 1 < n ? knots_[i + 1] : period_;
        const double mid = 0.5 * (t0 + t1);
        const double half = 0.5 * (t1 - t0);
        for (int k = 0; k < 5; ++k) {
            const double t = mid + half * kGaussNode[k];
            acc += kGaussWeight[k] * half * cross(eval(t), deriv(t));
        }
    }
    return 0.5 * acc;
}

Vec2 CurveSpline::area_centroid() const {
    const std::size_t n = knots_.size();
    double a = 0.0, mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t0 = knots_[i];
        const double t1 = i + 1 < n ? knots_[i + 1] : period_;
        const double mid = 0.5 * (t0 + t1);
        const double half = 0.5 * (t1 - t0);
        for (int k = 0; k < 5; ++k) {
            const double t = mid + half * kGaussNode[k];
            const Vec2 p = eval(t);
            const Vec2 d = deriv(t);
            const double wk = kGaussWeight[k] * half;
            a += wk * cross(p, d);
            mx += wk * p.x * p.x * d.y;
            my -= wk * p.y * p.y * d.x;
        }
    }
    a *= 0.5;
    if (!(std::abs(a) > 0.0)) throw NumericError("area_centroid: vanishing enclosed area");
    return {0.5 * mx / a, 0.5 * my / a};
}

ClosedCurve::ClosedCurve(std::vector<Vec2> vertices) : pts_(std::move(vertices)) {
    const std::size_t n = pts_.size();
    if (n < min_vertices)
        throw std::invalid_argument("ClosedCurve: need at least 16 vertices, got " +
                                    std::to_string(n));
    double scale = 0.0;
    for (const Vec2& p : pts_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("ClosedCurve: nonfinite vertex");
        scale = std::max(scale, std::max(std::abs(p.x), std::abs(p.y)));
    }
    double area2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = pts_[i];
        const Vec2 b = pts_[(i + 1) % n];
        if (!(norm(b - a) > 1e-15 * (1.0 + scale)))
            throw std::invalid_argument("ClosedCurve: degenerate edge at vertex " +
                                        std::to_string(i));
        area2 += cross(a, b);
    }
    if (!(area2 > 0.0))
        throw std::invalid_argument("ClosedCurve: orientation must be counterclockwise "
                                    "(signed area > 0)");
}

namespace {

bool proper_segment_intersection(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return cross(q - p, r - p); };
    const double o1 = orient(a, b, c), o2 = orient(a, b, d);
    const double o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = norm2(ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

double directed_hausdorff(const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
    const std::size_t m = to.size();
    double worst = 0.0;
    for (const Vec2& p : from) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j)
            best = std::min(best, point_segment_distance(p, to[j], to[(j + 1) % m]));
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

bool ClosedCurve::is_simple() const {
    const std::size_t n = pts_.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // skip edges sharing a vertex (neighbors and the wrap pair)
            if (j == i || j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (proper_segment_intersection(pts_[i], pts_[(i + 1) % n],
                                            pts_[j], pts_[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

double curve_length(const ClosedCurve& curve) {
    return CurveSpline(curve.vertices()).total_length();
}

double enclosed_area(const ClosedCurve& curve) {
    return CurveSpline(curve.vertices()).area();
}

Vec2 centroid(const ClosedCurve& curve) {
    return CurveSpline(curve.vertices()).area_centroid();
}

double hausdorff_distance(const ClosedCurve& a, const ClosedCurve& b) {
    return std::max(directed_hausdorff(a.vertices(), b.vertices()),
                    directed_hausdorff(b.vertices(), a.vertices()));
}

ClosedCurve translate(const ClosedCurve& curve, Vec2 shift) {
    std::vector<Vec2> pts = curve.vertices();
    for (Vec2& p : pts) p += shift;
    return ClosedCurve(std::move(pts));
}

ClosedCurve scale(const ClosedCurve& curve, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("scale: factor must be positive");
    std::vector<Vec2> pts = curve.vertices();
    for (Vec2& p : pts) p *= factor;
    return ClosedCurve(std::move(pts));
}

ClosedCurve make_circle(double radius, std::size_t n) {
    if (!(radius > 0.0)) throw std::invalid_argument("make_circle: radius must be positive");
    std::vector<Vec2> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
        pts[i] = {radius * std::cos(th), radius * std::sin(th)};
    }
    return ClosedCurve(std::move(pts));
}

ClosedCurve make_ellipse(double a, double b, std::size_t n) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("make_ellipse: semi-axes must be positive");
    std::vector<Vec2> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
        pts[i] = {a * std::cos(th), b * std::sin(th)};
    }
    return ClosedCurve(std::move(pts));
}

ClosedCurve make_fourier_perturbed(const std::vector<std::pair<int, double>>& modes,
                                   std::size_t n) {
    const double r0 = std::sqrt(2.0);
    std::vector<Vec2> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
        double rho = r0;
        for (const auto& [k, amp] : modes) rho += amp * std::cos(k * th);
        if (!(rho > 0.0))
            throw std::invalid_argument("make_fourier_perturbed: perturbation exceeds radius");
        pts[i] = {rho * std::cos(th), rho * std::sin(th)};
    }
    return ClosedCurve(std::move(pts));
}

} // namespace curveflow::geom
