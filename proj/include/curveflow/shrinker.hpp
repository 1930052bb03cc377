#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curveflow/geometry.hpp"

namespace curveflow::shrinker {

using geom::ClosedCurve;

/// The stationary profile of the rescaled flow: the circle of radius sqrt(2)
/// about the origin, carried as an M-point angular grid.
class ReferenceShrinker {
public:
    explicit ReferenceShrinker(std::size_t m = 512);

    std::size_t grid_size() const { return m_; }
    double theta(std::size_t j) const;
    ClosedCurve curve() const;

    /// Gaussian-weighted area of the reference circle (quadrature route,
    /// agrees with the closed form 2 pi sqrt(2) exp(-1/2) to rounding).
    double omega() const { return omega_; }

private:
    std::size_t m_;
    double omega_;
};

/// The decomposition of a nearby curve as a normal graph over the reference
/// circle: distance v sampled on the angular grid, positive toward the
/// inward normal (v = sqrt(2) - rho).
struct GraphOverShrinker {
    std::vector<double> v;
    double c0 = 0.0; // sup |v|
    double c1 = 0.0; // sup |v'|
    double c2 = 0.0; // sup |v''|
    double c2_alpha = 0.0; // discrete Hoelder-1/2 seminorm of v''
    /// Full norm used by the quotient bound: c0 + c1 + c2 + c2_alpha.
    double c2_alpha_norm() const { return c0 + c1 + c2 + c2_alpha; }
};

struct GraphDecompositionError : NumericError {
    double angle; // polar angle at which star-shapedness fails
    GraphDecompositionError(double theta, const std::string& what)
        : NumericError(what), angle(theta) {}
};

/// Recenter by area centroid, verify the curve is star-shaped about it, and
/// sample the radial graph on the reference grid.
GraphOverShrinker graph_decompose(const ClosedCurve& curve, const ReferenceShrinker& ref);

/// Rebuild the curve described by a graph (n output vertices).
ClosedCurve reconstruct(const GraphOverShrinker& graph, const ReferenceShrinker& ref,
                        std::size_t n);

/// Gaussian-area gap Q = Omega(curve) - Omega(reference).
double q_value(const ClosedCurve& curve, const ReferenceShrinker& ref);

/// Gaussian area evaluated on the angular grid through the graph Jacobian
/// sqrt(rho^2 + rho'^2); independent quadrature route for cross-checks.
double graph_gaussian_area(const GraphOverShrinker& graph, const ReferenceShrinker& ref);

/// Exponential fit y ~ C exp(-m t) by least squares on log y.
struct RateFit {
    double C = 0.0;
    double m = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    double rms_residual = 0.0;
    /// Largest pointwise deviation of log y from the fit line; large values
    /// flag non-exponential decay.
    double max_deviation = 0.0;
    std::size_t used = 0;
    std::size_t dropped = 0; // nonpositive samples inside the window
};

/// Throws NumericError when fewer than 8 positive samples lie in the window.
RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y,
                 double window_lo, double window_hi);

/// Boundedness check of Q(t) / ||v(t)||_{C^{2,1/2}} along a run.
struct RateLemmaCheck {
    double c_tilde = 0.0;     // max ratio over the window
    double trend_slope = 0.0; // LSQ slope of the ratio over the last half
    bool bounded = true;      // no increasing trend over the last half
    bool vacuous = false;     // every sample had v == 0 and Q below tolerance
};

RateLemmaCheck rate_lemma_check(const std::vector<double>& t,
                                const std::vector<double>& q,
                                const std::vector<double>& vnorm,
                                double zero_tol = 1e-10);

} // namespace curveflow::shrinker
