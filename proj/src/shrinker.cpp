#include "curveflow/shrinker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "curveflow/diagnostics.hpp"

namespace curveflow::shrinker {

namespace {

constexpr double kRadius = 1.4142135623730951; // sqrt(2)

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    return a;
}

} // namespace

ReferenceShrinker::ReferenceShrinker(std::size_t m) : m_(m) {
    if (m < ClosedCurve::min_vertices)
        throw std::invalid_argument("ReferenceShrinker: need at least 16 grid points");
    omega_ = diag::gaussian_area(geom::snapshot(curve()));
}

double ReferenceShrinker::theta(std::size_t j) const {
    return 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(m_);
}

ClosedCurve ReferenceShrinker::curve() const { return geom::make_circle(kRadius, m_); }

GraphOverShrinker graph_decompose(const ClosedCurve& curve, const ReferenceShrinker& ref) {
    const Vec2 c = geom::centroid(curve);
    const std::size_t n = curve.size();

    // Polar angles about the centroid must advance monotonically or the
    // curve is not star-shaped there and has no radial graph.
    std::vector<double> theta(n), rho(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = curve[i] - c;
        rho[i] = norm(p);
        if (!(rho[i] > 0.0))
            throw GraphDecompositionError(0.0, "graph_decompose: vertex at the centroid");
        theta[i] = std::atan2(p.y, p.x);
    }
    std::vector<double> unwrapped(n);
    unwrapped[0] = theta[0];
    for (std::size_t i = 1; i < n; ++i) {
        double d = theta[i] - theta[i - 1];
        while (d <= -M_PI) d += 2.0 * M_PI;
        while (d > M_PI) d -= 2.0 * M_PI;
        if (!(d > 0.0))
            throw GraphDecompositionError(
                wrap_angle(theta[i]),
                "graph_decompose: polar angle not monotone (curve is not "
                "star-shaped about its centroid)");
        unwrapped[i] = unwrapped[i - 1] + d;
    }
    {
        double d = theta[0] - theta[n - 1];
        while (d <= -M_PI) d += 2.0 * M_PI;
        while (d > M_PI) d -= 2.0 * M_PI;
        if (!(d > 0.0))
            throw GraphDecompositionError(
                wrap_angle(theta[0]),
                "graph_decompose: polar angle not monotone at the closing edge");
    }

    const geom::PeriodicSpline radial(unwrapped, rho, 2.0 * M_PI);

    const std::size_t m = ref.grid_size();
    GraphOverShrinker graph;
    graph.v.resize(m);
    for (std::size_t j = 0; j < m; ++j)
        graph.v[j] = kRadius - radial.eval(ref.theta(j));

    const double dth = 2.0 * M_PI / static_cast<double>(m);
    std::vector<double> v1(m), v2(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double vp = graph.v[(j + 1) % m];
        const double vm = graph.v[(j + m - 1) % m];
        v1[j] = (vp - vm) / (2.0 * dth);
        v2[j] = (vp - 2.0 * graph.v[j] + vm) / (dth * dth);
    }
    for (std::size_t j = 0; j < m; ++j) {
        graph.c0 = std::max(graph.c0, std::abs(graph.v[j]));
        graph.c1 = std::max(graph.c1, std::abs(v1[j]));
        graph.c2 = std::max(graph.c2, std::abs(v2[j]));
    }
    // Discrete Hoelder-1/2 seminorm of v'' over geodesic distance on the
    // reference circle.
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = j + 1; k < m; ++k) {
            const double dj = std::abs(ref.theta(j) - ref.theta(k));
            const double arc = kRadius * std::min(dj, 2.0 * M_PI - dj);
            graph.c2_alpha = std::max(graph.c2_alpha,
                                      std::abs(v2[j] - v2[k]) / std::sqrt(arc));
        }
    }
    return graph;
}

ClosedCurve reconstruct(const GraphOverShrinker& graph, const ReferenceShrinker& ref,
                        std::size_t n) {
    const std::size_t m = ref.grid_size();
    if (graph.v.size() != m)
        throw std::invalid_argument("reconstruct: graph size does not match reference grid");
    auto point = [&](double th, double rho) { return Vec2{rho * std::cos(th), rho * std::sin(th)}; };
    if (n == m) {
        std::vector<Vec2> pts(m);
        for (std::size_t j = 0; j < m; ++j)
            pts[j] = point(ref.theta(j), kRadius - graph.v[j]);
        return ClosedCurve(std::move(pts));
    }
    std::vector<double> knots(m), rho(m);
    for (std::size_t j = 0; j < m; ++j) {
        knots[j] = ref.theta(j);
        rho[j] = kRadius - graph.v[j];
    }
    const geom::PeriodicSpline radial(knots, rho, 2.0 * M_PI);
    std::vector<Vec2> pts(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double th = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
        pts[j] = point(th, radial.eval(th));
    }
    return ClosedCurve(std::move(pts));
}

double q_value(const ClosedCurve& curve, const ReferenceShrinker& ref) {
    return diag::gaussian_area(geom::snapshot(curve)) - ref.omega();
}

double graph_gaussian_area(const GraphOverShrinker& graph, const ReferenceShrinker& ref) {
    const std::size_t m = ref.grid_size();
    if (graph.v.size() != m)
        throw std::invalid_argument("graph_gaussian_area: graph size mismatch");
    const double dth = 2.0 * M_PI / static_cast<double>(m);
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double rho = kRadius - graph.v[j];
        // fourth-order five-point derivative keeps this quadrature's error
        // below the comparison tolerance against the curve-side quadrature
        const double rho_p = (-(kRadius - graph.v[(j + 2) % m]) +
                              8.0 * (kRadius - graph.v[(j + 1) % m]) -
                              8.0 * (kRadius - graph.v[(j + m - 1) % m]) +
                              (kRadius - graph.v[(j + m - 2) % m])) /
                             (12.0 * dth);
        acc += std::exp(-0.25 * rho * rho) * std::sqrt(rho * rho + rho_p * rho_p) * dth;
    }
    return acc;
}

RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y,
                 double window_lo, double window_hi) {
    if (t.size() != y.size())
        throw std::invalid_argument("fit_rate: mismatched sample arrays");
    if (!(window_hi > window_lo))
        throw std::invalid_argument("fit_rate: empty window");
    RateFit fit;
    fit.window_lo = window_lo;
    fit.window_hi = window_hi;
    std::vector<double> ts, ly;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < window_lo || t[i] > window_hi) continue;
        if (y[i] > 0.0) {
            ts.push_back(t[i]);
            ly.push_back(std::log(y[i]));
        } else {
            ++fit.dropped;
        }
    }
    fit.used = ts.size();
    if (fit.used < 8)
        throw NumericError("fit_rate: fewer than 8 positive samples in the window");

    const double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / fit.used;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / fit.used;
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < fit.used; ++i) {
        stt += (ts[i] - mt) * (ts[i] - mt);
        sty += (ts[i] - mt) * (ly[i] - my);
    }
    if (!(stt > 0.0)) throw NumericError("fit_rate: degenerate time window");
    const double slope = sty / stt;
    fit.m = -slope;
    fit.C = std::exp(my - slope * mt);
    double ss = 0.0;
    for (std::size_t i = 0; i < fit.used; ++i) {
        const double r = ly[i] - (slope * ts[i] + (my - slope * mt));
        ss += r * r;
        fit.max_deviation = std::max(fit.max_deviation, std::abs(r));
    }
    fit.rms_residual = std::sqrt(ss / fit.used);
    return fit;
}

RateLemmaCheck rate_lemma_check(const std::vector<double>& t,
                                const std::vector<double>& q,
                                const std::vector<double>& vnorm,
                                double zero_tol) {
    const std::size_t n = t.size();
    if (q.size() != n || vnorm.size() != n)
        throw std::invalid_argument("rate_lemma_check: mismatched sample arrays");
    if (n < 4)
        throw std::invalid_argument("rate_lemma_check: need at least 4 samples");

    RateLemmaCheck check;
    std::vector<double> ratio_t, ratio;
    double max_abs_q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        max_abs_q = std::max(max_abs_q, std::abs(q[i]));
        if (vnorm[i] > zero_tol) {
            ratio_t.push_back(t[i]);
            ratio.push_back(q[i] / vnorm[i]);
        } else if (q[i] > 1e2 * zero_tol) {
            throw NumericError("rate_lemma_check: vanishing graph norm with a "
                               "positive area gap");
        }
    }
    if (ratio.empty()) {
        check.vacuous = max_abs_q <= 1e2 * zero_tol;
        check.bounded = check.vacuous;
        return check;
    }
    for (double r : ratio) check.c_tilde = std::max(check.c_tilde, r);

    // Trend over the last half of the samples; a bounded ratio may wiggle,
    // so allow a small drift relative to its own size.
    const std::size_t half = ratio.size() / 2;
    const std::size_t count = ratio.size() - half;
    if (count >= 2) {
        double mt = 0.0, mr = 0.0;
        for (std::size_t i = half; i < ratio.size(); ++i) {
            mt += ratio_t[i];
            mr += ratio[i];
        }
        mt /= count;
        mr /= count;
        double stt = 0.0, str = 0.0;
        for (std::size_t i = half; i < ratio.size(); ++i) {
            stt += (ratio_t[i] - mt) * (ratio_t[i] - mt);
            str += (ratio_t[i] - mt) * (ratio[i] - mr);
        }
        check.trend_slope = stt > 0.0 ? str / stt : 0.0;
        const double span = ratio_t.back() - ratio_t[half];
        check.bounded = check.trend_slope * span <=
                        0.02 * std::max(std::abs(check.c_tilde), zero_tol);
    }
    return check;
}

} // namespace curveflow::shrinker
