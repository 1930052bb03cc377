#include "curveflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace curveflow::diag {

using geom::GeometrySnapshot;

namespace {

double sup_abs(const std::vector<double>& f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

double sup_abs_pos(const std::vector<Vec2>& x) {
    double m = 0.0;
    for (const Vec2& p : x) m = std::max(m, norm(p));
    return m;
}

// G = L S + (kappa^2 + 1/2) S, the linear part of the defect's evolution.
std::vector<double> defect_generator(const GeometrySnapshot& snap) {
    std::vector<double> out = geom::l_operator(snap, snap.S);
    for (std::size_t i = 0; i < snap.size(); ++i)
        out[i] += (snap.kappa[i] * snap.kappa[i] + 0.5) * snap.S[i];
    return out;
}

// F = -S^3 + 2 G, the integrand paired with S in the quotient's rate.
std::vector<double> quotient_pair_field(const GeometrySnapshot& snap,
                                        const std::vector<double>& gen) {
    std::vector<double> out(snap.size());
    for (std::size_t i = 0; i < snap.size(); ++i) {
        const double s = snap.S[i];
        out[i] = -s * s * s + 2.0 * gen[i];
    }
    return out;
}

double total_length(const GeometrySnapshot& snap) {
    return std::accumulate(snap.ds.begin(), snap.ds.end(), 0.0);
}

double report_scale(const GeometrySnapshot& snap) {
    const double k = sup_abs(snap.kappa);
    return std::max(1.0, k * k * total_length(snap));
}

} // namespace

double gaussian_area(const GeometrySnapshot& snap) {
    return weighted_integral(snap, std::vector<double>(snap.size(), 1.0));
}

double energy(const GeometrySnapshot& snap) {
    std::vector<double> s2(snap.size());
    for (std::size_t i = 0; i < snap.size(); ++i) s2[i] = snap.S[i] * snap.S[i];
    return weighted_integral(snap, s2);
}

double energy_rate(const GeometrySnapshot& snap) {
    const std::vector<double> gen = defect_generator(snap);
    std::vector<double> integrand(snap.size());
    for (std::size_t i = 0; i < snap.size(); ++i) {
        const double s = snap.S[i];
        integrand[i] = -s * s * s * s + 2.0 * s * gen[i];
    }
    return weighted_integral(snap, integrand);
}

std::optional<double> dirichlet_quotient(double e, double edot, double floor) {
    if (!(e > floor)) return std::nullopt;
    return edot / e;
}

double energy_floor(double omega) { return 1e-14 * omega; }

NdotBound ndot_bound(const GeometrySnapshot& snap) {
    NdotBound b;
    b.sup_S = sup_abs(snap.S);
    b.sup_dS = sup_abs(snap.dS);
    b.sup_d2S = sup_abs(snap.d2S);
    const double k = sup_abs(snap.kappa);
    const double ks = sup_abs(geom::arclength_derivative(snap, snap.kappa));
    const double xs = sup_abs_pos(snap.x);

    // Term-by-term sup-norm coefficients of the quotient's rate, grouped by
    // which derivative of S they multiply.
    b.c_d2s = 2.0 * b.sup_S + 11.0 * k;
    b.c_ds = b.sup_S * xs + 5.0 * ks + 2.5 * k * xs;
    b.c_s = 2.0 * (k * k + 0.5) * b.sup_S + 4.0 * k * k * k * b.sup_S;
    b.C = std::max({b.c_s, b.c_ds, b.c_d2s});
    b.bound = -b.C * (b.sup_S + b.sup_dS + b.sup_d2S);
    return b;
}

const std::vector<std::string>& identity_names() {
    static const std::vector<std::string> names = {
        // static (single snapshot)
        "mean-curvature-op",
        "curvature-norm-op",
        "curvature-hessian",
        // dynamic (material three-sample window)
        "metric-ev",
        "inverse-metric-ev",
        "normal-ev",
        "second-form-ev",
        "second-form-stability-ev",
        "curvature-norm-ev",
        "defect-ev",
        "weight-measure-ev",
        "defect-accel",
        "energy-rate",
        "energy-accel",
        "quotient-rate-displayed",
        "quotient-rate-recomposed",
        "quotient-cauchy-schwarz",
    };
    return names;
}

bool identity_is_static(const std::string& name) {
    return name == "mean-curvature-op" || name == "curvature-norm-op" ||
           name == "curvature-hessian";
}

MaterialWindow material_window(const ClosedCurve& curve, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("material_window: dt must be positive");
    MaterialWindow win;
    win.dt = dt;
    const ClosedCurve mid = flow::rk4_advance(curve, flow::Mode::normal_rescaled, dt);
    const ClosedCurve late = flow::rk4_advance(mid, flow::Mode::normal_rescaled, dt);
    win.before = geom::snapshot(curve);
    win.center = geom::snapshot(mid);
    win.after = geom::snapshot(late);
    return win;
}

namespace {

// Assembled per-vertex and integral quantities of a window's center, shared
// by several identities.
struct CenterFields {
    const GeometrySnapshot& c;
    std::vector<double> gen;      // G = LS + (kappa^2 + 1/2) S
    std::vector<double> pair;     // F = -S^3 + 2G
    std::vector<double> kappa_s;  // arclength derivative of kappa
    std::vector<double> x_dot_t;  // <x, T>
    std::vector<double> x_dot_nu; // <x, nu>
    double e = 0.0;

    explicit CenterFields(const GeometrySnapshot& center) : c(center) {
        gen = defect_generator(c);
        pair = quotient_pair_field(c, gen);
        kappa_s = geom::arclength_derivative(c, c.kappa);
        x_dot_t.resize(c.size());
        x_dot_nu.resize(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            x_dot_t[i] = dot(c.x[i], c.tangent[i]);
            x_dot_nu[i] = dot(c.x[i], c.normal[i]);
        }
        e = energy(c);
    }
};

// Centered material time derivative of a per-vertex scalar field.
std::vector<double> time_derivative(const std::vector<double>& before,
                                    const std::vector<double>& after, double dt) {
    std::vector<double> out(before.size());
    for (std::size_t i = 0; i < before.size(); ++i)
        out[i] = (after[i] - before[i]) / (2.0 * dt);
    return out;
}

std::vector<double> second_form(const GeometrySnapshot& snap) {
    std::vector<double> a(snap.size());
    for (std::size_t i = 0; i < snap.size(); ++i) a[i] = snap.kappa[i] * snap.g[i];
    return a;
}

std::vector<double> measure_density(const GeometrySnapshot& snap) {
    std::vector<double> m(snap.size());
    for (std::size_t i = 0; i < snap.size(); ++i)
        m[i] = snap.w[i] * std::sqrt(snap.g[i]);
    return m;
}

// The closed-form value of d/dt N at the window center, recomposed from the
// energy, its closed-form rate and its closed-form second derivative.
double quotient_rate_recomposed_value(const CenterFields& f) {
    const GeometrySnapshot& c = f.c;
    const std::size_t n = c.size();

    std::vector<double> pair_sq(n), s3g(n), mixed(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = c.S[i];
        pair_sq[i] = f.pair[i] * f.pair[i];
        s3g[i] = s * s * s * f.gen[i];
        // 2 S [4 S kappa S_ss + S S_s kappa_s + 2 S^2 kappa^3] + 2 S kappa S_s^2
        //   - S S_s^2 <x,nu> - kappa S^2 S_s <x,T>
        mixed[i] = 2.0 * s * (4.0 * s * c.kappa[i] * c.d2S[i] +
                              s * c.dS[i] * f.kappa_s[i] +
                              2.0 * s * s * c.kappa[i] * c.kappa[i] * c.kappa[i]) +
                   2.0 * s * c.kappa[i] * c.dS[i] * c.dS[i] -
                   s * c.dS[i] * c.dS[i] * f.x_dot_nu[i] -
                   c.kappa[i] * s * s * c.dS[i] * f.x_dot_t[i];
    }
    const double e = f.e;
    const double edot = energy_rate(c);
    const double eddot = weighted_integral(c, pair_sq) -
                         2.0 * weighted_integral(c, s3g) +
                         weighted_integral(c, mixed);
    return (eddot * e - edot * edot) / (e * e);
}

// The rate of N exactly as displayed, including the integrated-by-parts
// tangential terms (whose x-coefficient differs from the recomposed route).
double quotient_rate_displayed_value(const CenterFields& f) {
    const GeometrySnapshot& c = f.c;
    const std::size_t n = c.size();

    std::vector<double> pair_sq(n), s_pair(n), bracket(n);
    const std::vector<double> ls = geom::l_operator(c, c.S);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = c.S[i];
        const double s2 = s * s;
        pair_sq[i] = f.pair[i] * f.pair[i];
        s_pair[i] = s * f.pair[i];
        bracket[i] =
            -2.0 * s * s2 * f.gen[i] +
            2.0 * s2 * (4.0 * c.kappa[i] * c.d2S[i] + c.dS[i] * f.kappa_s[i] +
                        2.0 * s * c.kappa[i] * c.kappa[i] * c.kappa[i]) +
            s2 * (f.kappa_s[i] * c.dS[i] + c.kappa[i] * ls[i]) -
            2.0 * s2 * (f.kappa_s[i] * c.dS[i] + c.kappa[i] * c.d2S[i] -
                        f.x_dot_t[i] * c.kappa[i] * c.dS[i]);
    }
    const double e = f.e;
    const double cs = weighted_integral(c, pair_sq) * e -
                      weighted_integral(c, s_pair) * weighted_integral(c, s_pair);
    return cs / (e * e) + weighted_integral(c, bracket) / e;
}

} // namespace

IdentityReport identity_residual(const std::string& name, const MaterialWindow& window) {
    const GeometrySnapshot& c = window.center;
    const std::size_t n = c.size();
    const double dt = window.dt;

    IdentityReport report;
    report.name = name;
    report.n = n;
    report.dt = identity_is_static(name) ? 0.0 : dt;
    report.scale = report_scale(c);

    const CenterFields f(c);

    auto sup_residual = [&](const std::vector<double>& lhs, const std::vector<double>& rhs,
                            const std::vector<double>* normalizer = nullptr) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = lhs[i] - rhs[i];
            if (normalizer) r /= (*normalizer)[i];
            m = std::max(m, std::abs(r));
        }
        return m;
    };

    if (name == "mean-curvature-op") {
        // L kappa = kappa/2 + (S - kappa) kappa^2 + Laplacian S
        const std::vector<double> lhs = geom::l_operator(c, c.kappa);
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = 0.5 * c.kappa[i] +
                     (c.S[i] - c.kappa[i]) * c.kappa[i] * c.kappa[i] + c.d2S[i];
        report.residual = sup_residual(lhs, rhs);
        return report;
    }
    if (name == "curvature-norm-op") {
        // L kappa^2 = 2 kappa_s^2 + 2 kappa^2 (1/2 - kappa^2) + 2 S kappa^3
        //             + 2 kappa Laplacian S
        std::vector<double> k2(n), rhs(n);
        for (std::size_t i = 0; i < n; ++i) k2[i] = c.kappa[i] * c.kappa[i];
        const std::vector<double> lhs = geom::l_operator(c, k2);
        for (std::size_t i = 0; i < n; ++i) {
            const double k = c.kappa[i];
            rhs[i] = 2.0 * f.kappa_s[i] * f.kappa_s[i] + 2.0 * k * k * (0.5 - k * k) +
                     2.0 * c.S[i] * k * k * k + 2.0 * k * c.d2S[i];
        }
        report.residual = sup_residual(lhs, rhs);
        return report;
    }
    if (name == "curvature-hessian") {
        // Hessian of kappa = g [kappa/2 + (S - kappa) kappa^2]
        //                    + <x, phi_u> kappa_u / 2 + Hessian of S,
        // compared componentwise and normalized by g.
        const std::vector<double> lhs = geom::covariant_hessian(c, c.kappa);
        const std::vector<double> hess_s = geom::covariant_hessian(c, c.S);
        const std::vector<double> kappa_u = geom::parameter_derivative(c.kappa);
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double k = c.kappa[i];
            rhs[i] = c.g[i] * (0.5 * k + (c.S[i] - k) * k * k) +
                     0.5 * f.x_dot_t[i] * std::sqrt(c.g[i]) * kappa_u[i] + hess_s[i];
        }
        report.residual = sup_residual(lhs, rhs, &c.g);
        return report;
    }

    const GeometrySnapshot& b = window.before;
    const GeometrySnapshot& a = window.after;

    if (name == "metric-ev") {
        // d/dt g = -2 kappa g S, normalized by g
        const std::vector<double> lhs = time_derivative(b.g, a.g, dt);
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = -2.0 * c.kappa[i] * c.g[i] * c.S[i];
        report.residual = sup_residual(lhs, rhs, &c.g);
        return report;
    }
    if (name == "inverse-metric-ev") {
        // d/dt g^{-1} = 2 (kappa/g) S, normalized by g^{-1}
        std::vector<double> gb(n), ga(n), rhs(n), ginv(n);
        for (std::size_t i = 0; i < n; ++i) {
            gb[i] = 1.0 / b.g[i];
            ga[i] = 1.0 / a.g[i];
            ginv[i] = 1.0 / c.g[i];
            rhs[i] = 2.0 * (c.kappa[i] / c.g[i]) * c.S[i];
        }
        const std::vector<double> lhs = time_derivative(gb, ga, dt);
        report.residual = sup_residual(lhs, rhs, &ginv);
        return report;
    }
    if (name == "normal-ev") {
        // d/dt nu = -S_s T
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 lhs = (a.normal[i] - b.normal[i]) / (2.0 * dt);
            const Vec2 rhs = -c.dS[i] * c.tangent[i];
            m = std::max(m, norm(lhs - rhs));
        }
        report.residual = m;
        return report;
    }
    if (name == "second-form-ev") {
        // d/dt A = Hessian of S - S kappa^2 g, normalized by g
        const std::vector<double> lhs =
            time_derivative(second_form(b), second_form(a), dt);
        const std::vector<double> hess_s = geom::covariant_hessian(c, c.S);
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = hess_s[i] - c.S[i] * c.kappa[i] * c.kappa[i] * c.g[i];
        report.residual = sup_residual(lhs, rhs, &c.g);
        return report;
    }
    if (name == "second-form-stability-ev") {
        // d/dt A = g L kappa + (kappa^2 - 1/2) kappa g - 2 S kappa^2 g,
        // normalized by g
        const std::vector<double> lhs =
            time_derivative(second_form(b), second_form(a), dt);
        const std::vector<double> lk = geom::l_operator(c, c.kappa);
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double k = c.kappa[i];
            rhs[i] = c.g[i] * lk[i] + (k * k - 0.5) * k * c.g[i] -
                     2.0 * c.S[i] * k * k * c.g[i];
        }
        report.residual = sup_residual(lhs, rhs, &c.g);
        return report;
    }
    if (name == "curvature-norm-ev") {
        // d/dt kappa^2 = 2 kappa Laplacian S + 2 S kappa^3
        std::vector<double> k2b(n), k2a(n), rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            k2b[i] = b.kappa[i] * b.kappa[i];
            k2a[i] = a.kappa[i] * a.kappa[i];
            const double k = c.kappa[i];
            rhs[i] = 2.0 * k * c.d2S[i] + 2.0 * c.S[i] * k * k * k;
        }
        const std::vector<double> lhs = time_derivative(k2b, k2a, dt);
        report.residual = sup_residual(lhs, rhs);
        return report;
    }
    if (name == "defect-ev") {
        // d/dt S = L S + (kappa^2 + 1/2) S
        const std::vector<double> lhs = time_derivative(b.S, a.S, dt);
        report.residual = sup_residual(lhs, f.gen);
        return report;
    }
    if (name == "weight-measure-ev") {
        // d/dt (w sqrt(g)) = -S^2 w sqrt(g), normalized by w sqrt(g)
        const std::vector<double> mb = measure_density(b);
        const std::vector<double> ma = measure_density(a);
        std::vector<double> mc = measure_density(c), rhs(n);
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = -c.S[i] * c.S[i] * mc[i];
        const std::vector<double> lhs = time_derivative(mb, ma, dt);
        report.residual = sup_residual(lhs, rhs, &mc);
        return report;
    }
    if (name == "defect-accel") {
        // d2/dt2 S = L G + (kappa^2 + 1/2) G + 4 S kappa S_ss + kappa S_s^2
        //            + S S_s kappa_s + 2 kappa^3 S^2
        //            - (1/2) S_s^2 <x,nu> - (1/2) kappa S S_s <x,T>
        // The <x,.> terms are the commutator of the drift x/2 with d/ds.
        const std::vector<double> lg = geom::l_operator(c, f.gen);
        std::vector<double> lhs(n), rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = c.S[i];
            const double k = c.kappa[i];
            lhs[i] = (a.S[i] - 2.0 * s + b.S[i]) / (dt * dt);
            rhs[i] = lg[i] + (k * k + 0.5) * f.gen[i] +
                     4.0 * s * k * c.d2S[i] + k * c.dS[i] * c.dS[i] +
                     s * c.dS[i] * f.kappa_s[i] + 2.0 * k * k * k * s * s -
                     0.5 * c.dS[i] * c.dS[i] * f.x_dot_nu[i] -
                     0.5 * k * s * c.dS[i] * f.x_dot_t[i];
        }
        report.residual = sup_residual(lhs, rhs);
        return report;
    }
    if (name == "energy-rate") {
        const double lhs = (energy(a) - energy(b)) / (2.0 * dt);
        report.residual = std::abs(lhs - energy_rate(c));
        return report;
    }
    if (name == "energy-accel") {
        const double lhs = (energy(a) - 2.0 * f.e + energy(b)) / (dt * dt);
        std::vector<double> pair_sq(n), s3g(n), mixed(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = c.S[i];
            pair_sq[i] = f.pair[i] * f.pair[i];
            s3g[i] = s * s * s * f.gen[i];
            mixed[i] = 2.0 * s * (4.0 * s * c.kappa[i] * c.d2S[i] +
                                  s * c.dS[i] * f.kappa_s[i] +
                                  2.0 * s * s * c.kappa[i] * c.kappa[i] * c.kappa[i]) +
                       2.0 * s * c.kappa[i] * c.dS[i] * c.dS[i] -
                       s * c.dS[i] * c.dS[i] * f.x_dot_nu[i] -
                       c.kappa[i] * s * s * c.dS[i] * f.x_dot_t[i];
        }
        const double rhs = weighted_integral(c, pair_sq) -
                           2.0 * weighted_integral(c, s3g) +
                           weighted_integral(c, mixed);
        report.residual = std::abs(lhs - rhs);
        return report;
    }

    const bool quotient_identity = name == "quotient-rate-displayed" ||
                                   name == "quotient-rate-recomposed" ||
                                   name == "quotient-cauchy-schwarz";
    if (quotient_identity) {
        if (name == "quotient-cauchy-schwarz") {
            std::vector<double> pair_sq(n), s_pair(n);
            for (std::size_t i = 0; i < n; ++i) {
                pair_sq[i] = f.pair[i] * f.pair[i];
                s_pair[i] = c.S[i] * f.pair[i];
            }
            const double sp = weighted_integral(c, s_pair);
            const double value = f.e * weighted_integral(c, pair_sq) - sp * sp;
            report.residual = std::max(0.0, -value);
            report.note = "nonnegativity margin";
            return report;
        }
        const double floor = energy_floor(gaussian_area(c));
        if (!(f.e > floor) || !(energy(b) > floor) || !(energy(a) > floor)) {
            report.defined = false;
            report.note = "energy below floor; quotient undefined";
            return report;
        }
        const double nb = energy_rate(b) / energy(b);
        const double na = energy_rate(a) / energy(a);
        const double lhs = (na - nb) / (2.0 * dt);
        const double rhs = name == "quotient-rate-displayed"
                               ? quotient_rate_displayed_value(f)
                               : quotient_rate_recomposed_value(f);
        report.residual = std::abs(lhs - rhs);
        return report;
    }

    throw std::invalid_argument("identity_residual: unknown identity '" + name + "'");
}

std::vector<IdentityReport> identity_suite(const ClosedCurve& coarse_curve,
                                           const ClosedCurve& fine_curve,
                                           double dt,
                                           const std::vector<std::string>& names) {
    const MaterialWindow coarse = material_window(coarse_curve, dt);
    const MaterialWindow fine = material_window(fine_curve, dt / 2.0);
    std::vector<IdentityReport> reports;
    reports.reserve(2 * names.size());
    for (const std::string& name : names) {
        IdentityReport rc = identity_residual(name, coarse);
        IdentityReport rf = identity_residual(name, fine);
        if (rc.defined && rf.defined && rf.residual > 1e-15 * rf.scale &&
            rc.residual > 1e-15 * rc.scale)
            rf.order = std::log2(rc.residual / rf.residual);
        reports.push_back(std::move(rc));
        reports.push_back(std::move(rf));
    }
    return reports;
}

std::vector<double> monotonicity_residual(const std::vector<double>& t,
                                          const std::vector<double>& omega,
                                          const std::vector<double>& e) {
    const std::size_t n = t.size();
    if (n < 3 || omega.size() != n || e.size() != n)
        throw std::invalid_argument("monotonicity_residual: need >= 3 matching samples");
    for (std::size_t j = 0; j + 1 < n; ++j)
        if (!(t[j + 1] > t[j]))
            throw std::invalid_argument("monotonicity_residual: times must be increasing");
    std::vector<double> res(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double integral = 0.5 * (e[j] + e[j + 1]) * (t[j + 1] - t[j]);
        res[j] = std::abs(omega[j + 1] - omega[j] + integral);
    }
    return res;
}

LojasiewiczFit lojasiewicz_probe(const std::vector<double>& q,
                                 const std::vector<double>& s_l2) {
    if (q.size() != s_l2.size())
        throw std::invalid_argument("lojasiewicz_probe: mismatched sample arrays");
    LojasiewiczFit fit;
    std::vector<double> lq, ls;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] > 0.0 && s_l2[i] > 0.0) {
            lq.push_back(std::log(q[i]));
            ls.push_back(std::log(s_l2[i]));
        } else {
            ++fit.dropped;
        }
    }
    fit.used = lq.size();
    if (fit.used < 8)
        throw NumericError("lojasiewicz_probe: fewer than 8 usable samples");
    const auto [lo, hi] = std::minmax_element(lq.begin(), lq.end());
    if (*hi - *lo < 1e-8)
        throw NumericError("lojasiewicz_probe: fit-degenerate, gap range too small");

    const double mx = std::accumulate(lq.begin(), lq.end(), 0.0) / fit.used;
    const double my = std::accumulate(ls.begin(), ls.end(), 0.0) / fit.used;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < fit.used; ++i) {
        sxx += (lq[i] - mx) * (lq[i] - mx);
        sxy += (lq[i] - mx) * (ls[i] - my);
    }
    fit.theta = sxy / sxx;
    fit.intercept = my - fit.theta * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < fit.used; ++i) {
        const double r = ls[i] - (fit.theta * lq[i] + fit.intercept);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / fit.used);
    return fit;
}

} // namespace curveflow::diag
