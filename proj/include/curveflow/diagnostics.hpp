#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curveflow/flow.hpp"
#include "curveflow/geometry.hpp"

namespace curveflow::diag {

using geom::ClosedCurve;

/// One sampled row of a run's diagnostic series.  quotient (the log-derivative
/// N = d/dt log E) is absent while the energy sits below its floor, and the
/// graph norms are absent when the curve is not a graph over the reference
/// circle.
struct DiagnosticsRecord {
    double t = 0.0;
    double omega = 0.0;  // Gaussian-weighted area
    double energy = 0.0; // integral of S^2 against the weighted measure
    std::optional<double> quotient;
    double sup_S = 0.0;
    double sup_dS = 0.0;
    double sup_d2S = 0.0;
    double ndot_bound = 0.0; // lower bound for d/dt of the quotient
    double q = 0.0;          // omega minus the shrinker's omega
    std::optional<double> v_c0, v_c1, v_c2;
};

struct IdentityReport {
    std::string name;
    std::size_t n = 0;   // grid size
    double dt = 0.0;     // stencil timestep (0 for static identities)
    double residual = 0.0; // sup-norm residual
    std::optional<double> order; // present when two resolutions were run
    double scale = 1.0;  // tolerance scale max(1, sup kappa^2 * length)
    bool defined = true; // false when the check has no value on this state
    std::string note;
};

/// Gaussian-weighted area Omega = integral of exp(-|x|^2/4).
double gaussian_area(const geom::GeometrySnapshot& snap);

/// Shrinker-defect energy E = integral of S^2 exp(-|x|^2/4).
double energy(const geom::GeometrySnapshot& snap);

/// Closed-form rate of E under the normal rescaled flow:
/// -int S^4 + 2 int S (L S + (|A|^2 + 1/2) S).
double energy_rate(const geom::GeometrySnapshot& snap);

/// N = Edot / E.  Returns nothing when E <= floor.
std::optional<double> dirichlet_quotient(double e, double edot, double floor = 0.0);

/// Default energy floor below which the quotient is not reported.
double energy_floor(double omega);

/// Lower bound for d/dt N assembled from term-wise sup-norm estimates of the
/// quotient's rate.  bound = -C * (sup_S + sup_dS + sup_d2S) with C the max
/// of the per-norm coefficients (each a product of geometric sup-norms).
struct NdotBound {
    double bound = 0.0;
    double C = 0.0;
    double c_s = 0.0, c_ds = 0.0, c_d2s = 0.0; // per-norm coefficients
    double sup_S = 0.0, sup_dS = 0.0, sup_d2S = 0.0;
};

NdotBound ndot_bound(const geom::GeometrySnapshot& snap);

/// Names understood by identity_residual.
const std::vector<std::string>& identity_names();
bool identity_is_static(const std::string& name);

/// Material three-sample window of the normal rescaled flow: the same
/// vertices tracked over t - dt, t, t + dt with resampling suspended, so
/// centered time differences are material derivatives.
struct MaterialWindow {
    geom::GeometrySnapshot before, center, after;
    double dt = 0.0;
};

MaterialWindow material_window(const ClosedCurve& curve, double dt);

/// Residual of one named evolution or operator identity.  Static identities
/// use the window's center snapshot only; dynamic ones difference across the
/// window.  Unknown names throw std::invalid_argument.
IdentityReport identity_residual(const std::string& name, const MaterialWindow& window);

/// Convenience: windows at (n, dt) and (2n, dt/2) from the same initial
/// shape; reports carry the estimated order on the fine level.
std::vector<IdentityReport> identity_suite(const ClosedCurve& coarse_curve,
                                           const ClosedCurve& fine_curve,
                                           double dt,
                                           const std::vector<std::string>& names);

/// Per-interval defect of Omega(t_j) - Omega(t_{j+1}) = int E dt, trapezoid
/// in time.  Times must be strictly increasing and at least 3 samples long.
std::vector<double> monotonicity_residual(const std::vector<double>& t,
                                          const std::vector<double>& omega,
                                          const std::vector<double>& e);

/// Least-squares exponent theta of ||S||_{L^2} against the Gaussian-area gap:
/// log ||S|| = theta log Q + c.  Samples with Q <= 0 are dropped (counted);
/// a degenerate Q range throws NumericError.
struct LojasiewiczFit {
    double theta = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    std::size_t used = 0;
    std::size_t dropped = 0;
};

LojasiewiczFit lojasiewicz_probe(const std::vector<double>& q,
                                 const std::vector<double>& s_l2);

} // namespace curveflow::diag
