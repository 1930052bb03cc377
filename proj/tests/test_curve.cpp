#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "curveflow/curve.hpp"

using namespace curveflow;
using geom::ClosedCurve;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.4142135623730951;

// Sup error of the periodic spline of sin(t) sampled on n uniform knots,
// probed off-knot.
double sine_spline_error(std::size_t n, bool deriv) {
    std::vector<double> knots(n), vals(n);
    for (std::size_t i = 0; i < n; ++i) {
        knots[i] = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        vals[i] = std::sin(knots[i]);
    }
    geom::PeriodicSpline s(std::move(knots), std::move(vals), 2.0 * kPi);
    double worst = 0.0;
    for (int j = 0; j < 997; ++j) {
        const double t = 2.0 * kPi * j / 997.0;
        const double err = deriv ? std::abs(s.deriv(t) - std::cos(t))
                                 : std::abs(s.eval(t) - std::sin(t));
        worst = std::max(worst, err);
    }
    return worst;
}

ClosedCurve reversed(const ClosedCurve& c) {
    std::vector<Vec2> pts(c.vertices().rbegin(), c.vertices().rend());
    return ClosedCurve(std::move(pts));
}

// Limacon rho = 0.5 + cos(theta): positive signed area but a self-crossing
// inner loop.
ClosedCurve limacon(std::size_t n) {
    std::vector<Vec2> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        const double rho = 0.5 + std::cos(th);
        pts[i] = {rho * std::cos(th), rho * std::sin(th)};
    }
    return ClosedCurve(std::move(pts));
}

} // namespace

TEST_CASE("periodic spline interpolates sin to fourth order") {
    const double e32 = sine_spline_error(32, false);
    const double e64 = sine_spline_error(64, false);
    CHECK(e32 < 2e-5);
    CHECK(std::log2(e32 / e64) > 3.5);

    const double d32 = sine_spline_error(32, true);
    const double d64 = sine_spline_error(64, true);
    CHECK(d32 < 5e-4);
    CHECK(std::log2(d32 / d64) > 2.5);
}

TEST_CASE("periodic spline wraps modulo the period") {
    std::vector<double> knots{0.0, 1.0, 2.5, 4.0, 5.0};
    std::vector<double> vals{1.0, -0.5, 2.0, 0.25, -1.0};
    geom::PeriodicSpline s(knots, vals, 6.0);
    CHECK(s.eval(1.5) == doctest::Approx(s.eval(1.5 + 6.0)).epsilon(1e-14));
    CHECK(s.eval(-0.7) == doctest::Approx(s.eval(5.3)).epsilon(1e-14));
    CHECK(s.eval(2.5) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("periodic spline rejects non-increasing knots") {
    std::vector<double> knots{0.0, 1.0, 1.0, 2.0};
    std::vector<double> vals{0.0, 1.0, 2.0, 3.0};
    CHECK_THROWS_AS(geom::PeriodicSpline(knots, vals, 3.0), std::invalid_argument);
}

TEST_CASE("length and area quadratures converge at fourth order on circles") {
    auto err = [](std::size_t n) {
        const ClosedCurve c = geom::make_circle(2.0, n);
        const double el = std::abs(geom::curve_length(c) - 4.0 * kPi);
        const double ea = std::abs(geom::enclosed_area(c) - 4.0 * kPi);
        return std::pair{el, ea};
    };
    const auto [l64, a64] = err(64);
    const auto [l128, a128] = err(128);
    CHECK(l64 < 1e-4);
    CHECK(a64 < 1e-4);
    CHECK(std::log2(l64 / l128) > 3.5);
    CHECK(std::log2(a64 / a128) > 3.5);
}

TEST_CASE("area is positive for counterclockwise curves and rejects reversed input") {
    const ClosedCurve c = geom::make_ellipse(2.0, 1.0, 64);
    CHECK(geom::enclosed_area(c) > 0.0);
    CHECK_THROWS_AS(reversed(c), std::invalid_argument);
}

TEST_CASE("centroid recovers the center of a shifted circle") {
    const ClosedCurve c = geom::translate(geom::make_circle(1.5, 96), {0.4, 0.25});
    const Vec2 g = geom::centroid(c);
    CHECK(std::abs(g.x - 0.4) < 1e-7);
    CHECK(std::abs(g.y - 0.25) < 1e-7);
}

TEST_CASE("scaling multiplies the enclosed area by the square of the factor") {
    const ClosedCurve c = geom::make_ellipse(2.0, 1.0, 64);
    const double a0 = geom::enclosed_area(c);
    const double a1 = geom::enclosed_area(geom::scale(c, 2.5));
    CHECK(a1 == doctest::Approx(6.25 * a0).epsilon(1e-12));
}

TEST_CASE("arclength parameterization is uniform on a circle") {
    geom::CurveSpline s(geom::make_circle(2.0, 64).vertices());
    const double quarter = s.parameter_at_arclength(s.total_length() / 4.0);
    CHECK(quarter == doctest::Approx(s.parameter_period() / 4.0).epsilon(1e-6));
    const Vec2 p = s.eval(quarter);
    CHECK(std::abs(p.x) < 1e-5);
    CHECK(std::abs(p.y - 2.0) < 1e-5);
}

TEST_CASE("curve construction validates count, finiteness and edges") {
    CHECK_THROWS_AS(geom::make_circle(1.0, 15), std::invalid_argument);

    std::vector<Vec2> nan_pts = geom::make_circle(1.0, 24).vertices();
    nan_pts[7].y = std::nan("");
    CHECK_THROWS_AS(ClosedCurve(std::move(nan_pts)), std::invalid_argument);

    std::vector<Vec2> dup_pts = geom::make_circle(1.0, 24).vertices();
    dup_pts[5] = dup_pts[4];
    CHECK_THROWS_AS(ClosedCurve(std::move(dup_pts)), std::invalid_argument);
}

TEST_CASE("simplicity scan separates embedded curves from self-crossing ones") {
    CHECK(geom::make_circle(1.0, 32).is_simple());
    CHECK(geom::make_ellipse(3.0, 0.5, 48).is_simple());
    CHECK_FALSE(limacon(64).is_simple());
}

TEST_CASE("hausdorff distance of concentric circles is the radius gap") {
    const ClosedCurve inner = geom::make_circle(1.0, 256);
    const ClosedCurve outer = geom::make_circle(2.0, 256);
    const double d = geom::hausdorff_distance(inner, outer);
    CHECK(d == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(geom::hausdorff_distance(outer, inner) == doctest::Approx(d).epsilon(1e-14));
    CHECK(geom::hausdorff_distance(inner, inner) == 0.0);
}

TEST_CASE("fourier-perturbed circle has the prescribed radial profile") {
    const std::size_t n = 64;
    const ClosedCurve c = geom::make_fourier_perturbed({{2, 0.1}, {3, -0.05}}, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        const double rho = kSqrt2 + 0.1 * std::cos(2.0 * th) - 0.05 * std::cos(3.0 * th);
        CHECK(norm(c[i]) == doctest::Approx(rho).epsilon(1e-13));
    }
    CHECK_THROWS_AS(geom::make_fourier_perturbed({{2, 1.5}}, 64), std::invalid_argument);
}
