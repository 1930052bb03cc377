#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curveflow/geometry.hpp"

namespace curveflow::flow {

using geom::ClosedCurve;

enum class Mode {
    mcf,             // d phi/d tau = H nu
    rescaled,        // d phi/d t   = H nu + x/2
    normal_rescaled, // d phi/d t   = S nu,  S = H + <x,nu>/2
};

Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);

/// Evolving curve plus its clock.  The mode is fixed for the lifetime of a
/// state; the clock only moves forward.
struct FlowState {
    ClosedCurve curve;
    double clock = 0.0;
    Mode mode = Mode::rescaled;
    std::size_t step_count = 0;

    FlowState(ClosedCurve c, Mode m, double t0 = 0.0)
        : curve(std::move(c)), clock(t0), mode(m) {}
};

/// Requested dt exceeded the enforced parabolic stability bound.
struct StepRejected : NumericError {
    double admissible_dt;
    StepRejected(double adm, const std::string& what)
        : NumericError(what), admissible_dt(adm) {}
};

/// The curve left the class of valid embedded curves mid-run.
struct BlowUp : NumericError {
    double clock;
    BlowUp(double t, const std::string& what) : NumericError(what), clock(t) {}
};

/// Per-vertex velocity field of the given mode.
std::vector<Vec2> velocity(const ClosedCurve& curve, Mode mode);

/// Largest stable timestep, c * h^2 * min(1, 1/max kappa^2) with h the
/// shortest edge.
double admissible_dt(const ClosedCurve& curve, double cfl = 0.25);

/// One classical RK4 step of the vertex ODE system.  No resampling, no
/// stability enforcement: material stepping for derivative stencils.
ClosedCurve rk4_advance(const ClosedCurve& curve, Mode mode, double dt);

struct StepOptions {
    double cfl = 0.25;
    /// Resampling is skipped while the edge-length spread is below this;
    /// equilibria then stay bitwise put instead of absorbing interpolation
    /// noise every step.
    double resample_skip_spread = 1e-9;
};

/// RK4 step with the stability bound enforced (StepRejected carries the
/// admissible dt), followed by uniform resampling and a validity check
/// (BlowUp on failure).  Advances clock and step_count.
void step(FlowState& state, double dt, const StepOptions& opts = {});

/// T = enclosed area / (2 pi): exact for embedded curves under mcf.
double estimate_singular_time(const ClosedCurve& curve);

/// Map a curve at mcf time tau to the rescaled frame:
/// curve / sqrt(T - tau) at rescaled time t = -log(T - tau).
/// tau >= T throws std::invalid_argument.
std::pair<ClosedCurve, double> rescale_to_normalized(const ClosedCurve& curve,
                                                     double tau, double T);

/// Radius ODE of the round n-sphere under rescaled mcf, dr/dt = r/2 - n/r,
/// integrated with RK4 at fixed dt.
struct SphereOdeResult {
    std::vector<double> t;
    std::vector<double> r;
    std::optional<double> extinction_time; // r below lower bound
    std::optional<double> escape_time;     // r above upper bound
};

SphereOdeResult sphere_radius_ode(int dim, double r0, double t_end, double dt,
                                  double r_min = 1e-6, double r_max = 1e6);

} // namespace curveflow::flow
