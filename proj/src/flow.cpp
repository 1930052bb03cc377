#include "curveflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace curveflow::flow {

using geom::ClosedCurve;
using geom::KinematicFields;

Mode parse_mode(const std::string& name) {
    if (name == "mcf") return Mode::mcf;
    if (name == "rescaled") return Mode::rescaled;
    if (name == "normal_rescaled" || name == "normal") return Mode::normal_rescaled;
    throw std::invalid_argument("unknown flow mode '" + name +
                                "' (expected mcf, rescaled or normal_rescaled)");
}

std::string mode_name(Mode mode) {
    switch (mode) {
        case Mode::mcf: return "mcf";
        case Mode::rescaled: return "rescaled";
        case Mode::normal_rescaled: return "normal_rescaled";
    }
    throw std::invalid_argument("mode_name: invalid mode");
}

std::vector<Vec2> velocity(const ClosedCurve& curve, Mode mode) {
    const KinematicFields kin = geom::kinematic_fields(curve);
    const std::size_t n = curve.size();
    std::vector<Vec2> v(n);
    switch (mode) {
        case Mode::mcf:
            for (std::size_t i = 0; i < n; ++i)
                v[i] = kin.kappa[i] * kin.normal[i];
            break;
        case Mode::rescaled:
            for (std::size_t i = 0; i < n; ++i)
                v[i] = kin.kappa[i] * kin.normal[i] + 0.5 * curve[i];
            break;
        case Mode::normal_rescaled:
            for (std::size_t i = 0; i < n; ++i)
                v[i] = kin.S[i] * kin.normal[i];
            break;
    }
    return v;
}

double admissible_dt(const ClosedCurve& curve, double cfl) {
    if (!(cfl > 0.0)) throw std::invalid_argument("admissible_dt: cfl must be positive");
    const std::size_t n = curve.size();
    const auto& p = curve.vertices();
    double h = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        h = std::min(h, norm(p[(i + 1) % n] - p[i]));
    double kmax = 0.0;
    const KinematicFields kin = geom::kinematic_fields(curve);
    for (double k : kin.kappa) kmax = std::max(kmax, std::abs(k));
    const double limiter = kmax > 1.0 ? 1.0 / (kmax * kmax) : 1.0;
    return cfl * h * h * limiter;
}

ClosedCurve rk4_advance(const ClosedCurve& curve, Mode mode, double dt) {
    const std::size_t n = curve.size();
    const auto& p = curve.vertices();

    auto displaced = [&](const std::vector<Vec2>& dir, double factor) {
        std::vector<Vec2> q(n);
        for (std::size_t i = 0; i < n; ++i) q[i] = p[i] + factor * dir[i];
        return ClosedCurve(std::move(q));
    };

    const std::vector<Vec2> k1 = velocity(curve, mode);
    const std::vector<Vec2> k2 = velocity(displaced(k1, dt / 2.0), mode);
    const std::vector<Vec2> k3 = velocity(displaced(k2, dt / 2.0), mode);
    const std::vector<Vec2> k4 = velocity(displaced(k3, dt), mode);

    std::vector<Vec2> q(n);
    for (std::size_t i = 0; i < n; ++i)
        q[i] = p[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return ClosedCurve(std::move(q));
}

void step(FlowState& state, double dt, const StepOptions& opts) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    const double adm = admissible_dt(state.curve, opts.cfl);
    if (dt > adm * (1.0 + 1e-12))
        throw StepRejected(adm, "step: dt " + std::to_string(dt) +
                                    " exceeds stability bound " + std::to_string(adm));
    try {
        ClosedCurve advanced = rk4_advance(state.curve, state.mode, dt);
        if (geom::edge_length_spread(advanced) > opts.resample_skip_spread)
            advanced = geom::resample_uniform(advanced, advanced.size());
        state.curve = std::move(advanced);
    } catch (const std::invalid_argument& e) {
        throw BlowUp(state.clock, std::string("step: curve left the admissible class: ") +
                                      e.what());
    }
    state.clock += dt;
    ++state.step_count;
}

double estimate_singular_time(const ClosedCurve& curve) {
    return geom::enclosed_area(curve) / (2.0 * M_PI);
}

std::pair<ClosedCurve, double> rescale_to_normalized(const ClosedCurve& curve,
                                                     double tau, double T) {
    if (!(tau < T))
        throw std::invalid_argument("rescale_to_normalized: need tau < T");
    const double remaining = T - tau;
    return {geom::scale(curve, 1.0 / std::sqrt(remaining)), -std::log(remaining)};
}

SphereOdeResult sphere_radius_ode(int dim, double r0, double t_end, double dt,
                                  double r_min, double r_max) {
    if (dim < 1) throw std::invalid_argument("sphere_radius_ode: dim must be >= 1");
    if (!(r0 > 0.0)) throw std::invalid_argument("sphere_radius_ode: r0 must be positive");
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw std::invalid_argument("sphere_radius_ode: dt and t_end must be positive");

    const double nd = static_cast<double>(dim);
    auto f = [nd](double r) { return 0.5 * r - nd / r; };

    SphereOdeResult result;
    result.t.push_back(0.0);
    result.r.push_back(r0);
    double r = r0;
    const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
    for (std::size_t k = 0; k < steps; ++k) {
        const double k1 = f(r);
        const double k2 = f(r + 0.5 * dt * k1);
        const double k3 = f(r + 0.5 * dt * k2);
        const double k4 = f(r + dt * k3);
        r += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t = dt * static_cast<double>(k + 1);
        if (!std::isfinite(r) || r < r_min) {
            result.extinction_time = t;
            break;
        }
        if (r > r_max) {
            result.escape_time = t;
            break;
        }
        result.t.push_back(t);
        result.r.push_back(r);
    }
    return result;
}

} // namespace curveflow::flow
