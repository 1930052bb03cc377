#include "curveflow/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace curveflow::app {

namespace {

struct Prepared {
    ClosedCurve curve;
    double t0 = 0.0;
};

// Build, recenter, and (for the rescaled family) normalize the initial curve
// so that the predicted singular time maps to t0 = -log T.
Prepared prepare_initial(const RunConfig& config, std::size_t n) {
    ClosedCurve curve = build_initial_curve(config.initial, n);
    if (config.recenter)
        curve = geom::translate(curve, geom::centroid(curve) * -1.0);
    double t0 = 0.0;
    if (config.mode != flow::Mode::mcf) {
        const double T = config.singular_time ? *config.singular_time
                                              : flow::estimate_singular_time(curve);
        auto normalized = flow::rescale_to_normalized(curve, 0.0, T);
        curve = std::move(normalized.first);
        t0 = normalized.second;
    }
    return {std::move(curve), t0};
}

void append_record(const flow::FlowState& state, const shrinker::ReferenceShrinker& ref,
                   RunResult& out) {
    const geom::GeometrySnapshot snap = geom::snapshot(state.curve);
    diag::DiagnosticsRecord rec;
    rec.t = state.clock;
    rec.omega = diag::gaussian_area(snap);
    rec.energy = diag::energy(snap);
    const diag::NdotBound nb = diag::ndot_bound(snap);
    rec.sup_S = nb.sup_S;
    rec.sup_dS = nb.sup_dS;
    rec.sup_d2S = nb.sup_d2S;
    rec.ndot_bound = nb.bound;
    rec.q = rec.omega - ref.omega();

    RecordExtras extras;
    extras.ndot_c = nb.C;
    for (double k : snap.kappa)
        extras.sup_kappa = std::max(extras.sup_kappa, std::abs(k));
    try {
        const shrinker::GraphOverShrinker graph = shrinker::graph_decompose(state.curve, ref);
        rec.v_c0 = graph.c0;
        rec.v_c1 = graph.c1;
        rec.v_c2 = graph.c2;
        extras.v_norm_c2a = graph.c2_alpha_norm();
    } catch (const shrinker::GraphDecompositionError&) {
        // not a graph over the reference circle: norms stay absent
    }
    out.series.push_back(rec);
    out.extras.push_back(extras);
}

// N = d/dt log E by centered differences, defined only while the energy sits
// above its floor on the whole stencil.
void fill_quotients(std::vector<diag::DiagnosticsRecord>& series, double floor_factor) {
    for (std::size_t j = 1; j + 1 < series.size(); ++j) {
        const double floor = floor_factor * series[j].omega;
        if (series[j - 1].energy <= floor || series[j].energy <= floor ||
            series[j + 1].energy <= floor)
            continue;
        const double span = series[j + 1].t - series[j - 1].t;
        if (span > 0.0)
            series[j].quotient =
                (std::log(series[j + 1].energy) - std::log(series[j - 1].energy)) / span;
    }
}

constexpr std::size_t kMaxSubsteps = 50'000'000;

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("output: cannot open '" + path + "' for writing");
    out << text;
    if (!out)
        throw ConfigError("output: write to '" + path + "' failed");
}

void write_run_artifacts(const RunConfig& config, const RunResult& result,
                         const Summary& summary) {
    std::filesystem::create_directories(config.output_dir);
    write_series_csv(config.output_dir + "/series.csv", result.series);
    write_curve_csv(config.output_dir + "/final_curve.csv", result.final_curve);
    write_text_file(config.output_dir + "/summary.json",
                    summary_json(config, result, summary));
}

} // namespace

RunResult run_scenario(const RunConfig& config) {
    config.validate();
    const auto wall_start = std::chrono::steady_clock::now();

    Prepared prep = prepare_initial(config, config.n_points);
    const shrinker::ReferenceShrinker ref(config.graph_points);
    flow::FlowState state(std::move(prep.curve), config.mode, prep.t0);
    const double area0 = geom::enclosed_area(state.curve);

    RunResult result;
    result.series.clear();
    result.extras.clear();
    result.t_start = prep.t0;

    const double frame_dt = config.dt;
    std::size_t total_frames =
        static_cast<std::size_t>(std::ceil(config.t_end / frame_dt - 1e-9));
    if (total_frames == 0)
        total_frames = 1;

    append_record(state, ref, result);
    std::size_t last_recorded_frame = 0;

    flow::StepOptions opts;
    opts.cfl = config.cfl;

    for (std::size_t frame = 1; frame <= total_frames; ++frame) {
        const double target =
            prep.t0 + std::min(static_cast<double>(frame) * frame_dt, config.t_end);
        while (state.clock < target - 1e-12 * std::max(1.0, std::abs(target))) {
            const double remaining = target - state.clock;
            const double adm = flow::admissible_dt(state.curve, config.cfl);
            const double sub = remaining <= adm ? remaining : 0.9 * adm;
            const bool resample_now =
                config.resample_every <= 1 ||
                (state.step_count + 1) % config.resample_every == 0;
            opts.resample_skip_spread =
                resample_now ? config.resample_skip_spread
                             : std::numeric_limits<double>::infinity();
            flow::step(state, sub, opts);
            if (state.step_count > kMaxSubsteps)
                throw NumericError("run: step count exceeded the safety cap; "
                                   "the stability bound is collapsing");
        }
        state.clock = target;
        result.frames = frame;

        if (config.recenter)
            state.curve = geom::translate(state.curve, geom::centroid(state.curve) * -1.0);

        bool stop = false;
        if (config.mode == flow::Mode::mcf &&
            geom::enclosed_area(state.curve) < 0.01 * area0) {
            result.tau_area_hit = state.clock;
            stop = true;
        }
        if (frame % config.record_every == 0 || frame == total_frames || stop) {
            append_record(state, ref, result);
            last_recorded_frame = frame;
        }
        if (stop)
            break;
    }
    if (last_recorded_frame != result.frames) {
        // defensive: the loop above always records the final frame
        append_record(state, ref, result);
    }

    fill_quotients(result.series, config.quotient_floor_factor);

    result.final_curve = state.curve;
    result.t_final = state.clock;
    result.substeps = state.step_count;
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return result;
}

Summary summarize(const RunConfig& config, const RunResult& result) {
    Summary s;
    const auto& series = result.series;
    if (series.empty())
        return s;

    // Decay fit of the graph amplitude over the configured window.
    {
        std::vector<double> t, v;
        for (const auto& rec : series)
            if (rec.v_c0) {
                t.push_back(rec.t);
                v.push_back(*rec.v_c0);
            }
        try {
            const shrinker::RateFit fit =
                shrinker::fit_rate(t, v, config.fit_window_lo, config.fit_window_hi);
            s.m = fit.m;
            s.m_intercept = fit.C;
            s.m_rms = fit.rms_residual;
        } catch (const NumericError&) {
            // too few usable samples in the window: no fit reported
        }
    }

    double k_max = 0.0;
    for (const auto& ex : result.extras)
        k_max = std::max(k_max, ex.sup_kappa);
    s.K = 2.0 * (k_max * k_max + 0.5);

    double n_min = std::numeric_limits<double>::infinity();
    double n_max = -std::numeric_limits<double>::infinity();
    bool any_quotient = false;
    for (const auto& rec : series)
        if (rec.quotient) {
            any_quotient = true;
            n_min = std::min(n_min, *rec.quotient);
            n_max = std::max(n_max, *rec.quotient);
        }
    if (any_quotient)
        s.K_prime = -n_min;

    // Pinching: every defined quotient stays below K (2% slack).  The lower
    // bound -K' holds by construction of K'.
    s.pinching_upper_ok = !any_quotient || n_max <= 1.02 * *s.K;

    // Envelope consistency: Q(t) >= (E(T0)/K') exp(-K'(t - T0)), 10% slack.
    s.q_envelope_ok = true;
    if (s.K_prime && *s.K_prime > 0.0) {
        const double t0 = result.t_start + config.burn_in;
        std::size_t j0 = series.size();
        for (std::size_t j = 0; j < series.size(); ++j)
            if (series[j].t >= t0 &&
                series[j].energy > config.quotient_floor_factor * series[j].omega) {
                j0 = j;
                break;
            }
        if (j0 < series.size()) {
            const double e0 = series[j0].energy;
            const double tref = series[j0].t;
            for (std::size_t j = j0; j < series.size(); ++j) {
                const double envelope =
                    (e0 / *s.K_prime) * std::exp(-*s.K_prime * (series[j].t - tref));
                // below the quadrature resolution of omega the comparison
                // carries no information
                if (envelope < 1e-12 * series[j].omega)
                    break;
                if (series[j].q < 0.9 * envelope) {
                    s.q_envelope_ok = false;
                    break;
                }
            }
        }
    }

    // Differenced quotient rate against the assembled lower bound.
    s.ndot_bound_ok = true;
    for (std::size_t j = 1; j + 1 < series.size(); ++j) {
        if (!series[j - 1].quotient || !series[j + 1].quotient)
            continue;
        const double span = series[j + 1].t - series[j - 1].t;
        if (!(span > 0.0))
            continue;
        const double ndot = (*series[j + 1].quotient - *series[j - 1].quotient) / span;
        if (ndot < (1.0 + config.ndot_slack) * series[j].ndot_bound - 1e-9) {
            s.ndot_bound_ok = false;
            break;
        }
    }

    // Rate-lemma ratio over the fit window.
    {
        std::vector<double> t, q, vnorm;
        for (std::size_t j = 0; j < series.size(); ++j) {
            if (series[j].t < config.fit_window_lo || series[j].t > config.fit_window_hi)
                continue;
            if (!result.extras[j].v_norm_c2a)
                continue;
            t.push_back(series[j].t);
            q.push_back(series[j].q);
            vnorm.push_back(*result.extras[j].v_norm_c2a);
        }
        if (t.size() >= 4) {
            try {
                const shrinker::RateLemmaCheck check = shrinker::rate_lemma_check(t, q, vnorm);
                if (!check.vacuous)
                    s.C_tilde = check.c_tilde;
                s.rate_lemma_ok = check.bounded;
            } catch (const NumericError&) {
                s.rate_lemma_ok = false;
            }
        } else {
            s.rate_lemma_ok = true; // too few graph samples to test
        }
    }

    // Lojasiewicz exponent of ||S||_{L^2} against the area gap.
    {
        std::vector<double> q, sl2;
        for (const auto& rec : series) {
            if (rec.t < config.fit_window_lo || rec.t > config.fit_window_hi)
                continue;
            if (rec.q > 0.0 && rec.energy > 0.0) {
                q.push_back(rec.q);
                sl2.push_back(std::sqrt(rec.energy));
            }
        }
        try {
            if (q.size() >= 8)
                s.theta = diag::lojasiewicz_probe(q, sl2).theta;
        } catch (const NumericError&) {
            // degenerate gap range: no exponent reported
        }
    }

    // Fixed-point flag: the graph amplitude never left the drift tolerance.
    {
        bool any_graph = false;
        double drift = 0.0;
        for (const auto& rec : series)
            if (rec.v_c0) {
                any_graph = true;
                drift = std::max(drift, *rec.v_c0);
            }
        s.fixed_point = any_graph && drift < 1e-6;
    }

    // Strict decrease of the weighted area between consecutive records, away
    // from the stationary regime (both energies at rounding level).
    if (config.mode == flow::Mode::mcf) {
        s.omega_monotone = true;
    } else {
        s.omega_monotone = true;
        for (std::size_t j = 0; j + 1 < series.size(); ++j) {
            const double scale = std::max(1.0, series[j].omega);
            if (std::max(series[j].energy, series[j + 1].energy) <= 1e-12 * scale)
                continue;
            if (!(series[j + 1].omega < series[j].omega)) {
                s.omega_monotone = false;
                break;
            }
        }
    }

    // Tail mass of the derivative sup-norms past t = 8.
    if (result.t_final > 8.0 && result.t_start < 8.0 && series.size() >= 3) {
        auto tail_fraction = [&](auto field) -> std::optional<double> {
            double total = 0.0, tail = 0.0;
            for (std::size_t j = 0; j + 1 < series.size(); ++j) {
                const double ta = series[j].t, tb = series[j + 1].t;
                const double fa = field(series[j]), fb = field(series[j + 1]);
                const double piece = 0.5 * (fa + fb) * (tb - ta);
                total += piece;
                if (ta >= 8.0) {
                    tail += piece;
                } else if (tb > 8.0) {
                    const double lambda = (8.0 - ta) / (tb - ta);
                    const double f8 = fa + lambda * (fb - fa);
                    tail += 0.5 * (f8 + fb) * (tb - 8.0);
                }
            }
            if (!(total > 0.0))
                return std::nullopt;
            return tail / total;
        };
        s.tail_fraction_S = tail_fraction([](const diag::DiagnosticsRecord& r) { return r.sup_S; });
        s.tail_fraction_dS = tail_fraction([](const diag::DiagnosticsRecord& r) { return r.sup_dS; });
        s.tail_fraction_d2S = tail_fraction([](const diag::DiagnosticsRecord& r) { return r.sup_d2S; });
    }

    // Distance of the prepared initial curve to the stationary circle.
    {
        const Prepared prep = prepare_initial(config, config.n_points);
        s.initial_hausdorff = geom::hausdorff_distance(
            prep.curve, geom::make_circle(std::sqrt(2.0), config.n_points));
    }

    return s;
}

void execute_run(const RunConfig& config) {
    const RunResult result = run_scenario(config);
    const Summary summary = summarize(config, result);
    write_run_artifacts(config, result, summary);
}

std::vector<diag::IdentityReport> execute_verify(const RunConfig& config,
                                                 const std::vector<std::string>& names) {
    const std::vector<std::string>& use = names.empty() ? diag::identity_names() : names;
    const Prepared coarse = prepare_initial(config, config.n_points);
    const Prepared fine = prepare_initial(config, config.n_points * 2);
    std::vector<diag::IdentityReport> reports =
        diag::identity_suite(coarse.curve, fine.curve, config.dt, use);
    std::filesystem::create_directories(config.output_dir);
    write_text_file(config.output_dir + "/identities.json", identities_json(reports));
    return reports;
}

std::vector<SweepRow> execute_sweep(const RunConfig& config) {
    std::set<std::pair<int, double>> grid;
    for (int k : config.sweep_modes)
        for (double a : config.sweep_amplitudes)
            grid.insert({k, a});
    if (grid.empty())
        throw ConfigError("sweep: empty mode/amplitude grid");

    const std::vector<std::pair<int, double>> points(grid.begin(), grid.end());
    std::vector<SweepRow> rows(points.size());

    auto run_one = [&](std::size_t idx) {
        const auto [k, amp] = points[idx];
        SweepRow& row = rows[idx];
        row.k = k;
        row.amplitude = amp;
        row.m_expected = 0.5 * k * k - 1.0;
        try {
            RunConfig rc = config;
            rc.initial = "fourier:" + std::to_string(k) + ":" + format_double(amp);
            rc.output_dir = config.output_dir + "/sweep_k" + std::to_string(k) + "_a" +
                            format_double(amp);
            const RunResult result = run_scenario(rc);

            std::vector<double> t, v;
            double v_min = std::numeric_limits<double>::infinity();
            for (const auto& rec : result.series)
                if (rec.v_c0) {
                    t.push_back(rec.t);
                    v.push_back(*rec.v_c0);
                    if (*rec.v_c0 > 0.0)
                        v_min = std::min(v_min, *rec.v_c0);
                }
            // Fit window: past the initial transient, ending where the
            // amplitude approaches either the absolute or the relative floor.
            const double lo = result.t_start + 0.75;
            const double y_floor = std::max(1e-5, 20.0 * v_min);
            double hi = lo;
            for (std::size_t j = 0; j < t.size(); ++j)
                if (v[j] >= y_floor)
                    hi = std::max(hi, t[j]);
            if (hi - lo < 1.0)
                throw NumericError("sweep: decay window shorter than one time unit");
            const shrinker::RateFit fit = shrinker::fit_rate(t, v, lo, hi);
            row.m = fit.m;
            row.C = fit.C;
            row.rms = fit.rms_residual;
            row.pass = std::abs(fit.m - row.m_expected) <= 0.15 * row.m_expected;

            write_run_artifacts(rc, result, summarize(rc, result));
        } catch (const std::exception& e) {
            row.pass = false;
            row.error = e.what();
        }
    };

    std::size_t workers = config.threads ? config.threads
                                         : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, points.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < points.size(); ++i)
            run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < points.size();
                     i = next.fetch_add(1))
                    run_one(i);
            });
        for (auto& th : pool)
            th.join();
    }

    std::ostringstream csv;
    csv << "k,amplitude,m,C,rms,m_expected,pass,error\n";
    for (const auto& row : rows) {
        csv << row.k << ',' << format_double(row.amplitude) << ','
            << (row.m ? format_double(*row.m) : "nan") << ','
            << (row.C ? format_double(*row.C) : "nan") << ','
            << (row.rms ? format_double(*row.rms) : "nan") << ','
            << format_double(row.m_expected) << ',' << (row.pass ? "true" : "false") << ',';
        std::string err = row.error;
        std::replace(err.begin(), err.end(), ',', ';');
        csv << '"' << err << "\"\n";
    }
    std::filesystem::create_directories(config.output_dir);
    write_text_file(config.output_dir + "/rates.csv", csv.str());
    return rows;
}

void execute_sphere_ode(const RunConfig& config, int dim, double r0) {
    if (dim < 1)
        throw ConfigError("sphere-ode: dim must be a positive integer");
    if (!(r0 > 0.0))
        throw ConfigError("sphere-ode: r0 must be positive");
    const flow::SphereOdeResult result =
        flow::sphere_radius_ode(dim, r0, config.t_end, config.dt);
    std::ostringstream csv;
    csv << "t,r\n";
    for (std::size_t j = 0; j < result.t.size(); ++j)
        csv << format_double(result.t[j]) << ',' << format_double(result.r[j]) << '\n';
    std::filesystem::create_directories(config.output_dir);
    write_text_file(config.output_dir + "/radius.csv", csv.str());
}

void write_series_csv(const std::string& path,
                      const std::vector<diag::DiagnosticsRecord>& series) {
    std::ostringstream out;
    out << "t,omega,energy,N,sup_S,sup_dS,sup_d2S,q,v_c0,v_c1,v_c2\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string("nan");
    };
    for (const auto& rec : series) {
        out << format_double(rec.t) << ',' << format_double(rec.omega) << ','
            << format_double(rec.energy) << ',' << opt(rec.quotient) << ','
            << format_double(rec.sup_S) << ',' << format_double(rec.sup_dS) << ','
            << format_double(rec.sup_d2S) << ',' << format_double(rec.q) << ','
            << opt(rec.v_c0) << ',' << opt(rec.v_c1) << ',' << opt(rec.v_c2) << '\n';
    }
    write_text_file(path, out.str());
}

void write_curve_csv(const std::string& path, const ClosedCurve& curve) {
    std::ostringstream out;
    out << "x,y\n";
    for (const Vec2& p : curve.vertices())
        out << format_double(p.x) << ',' << format_double(p.y) << '\n';
    write_text_file(path, out.str());
}

ClosedCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("initial: cannot open curve file '" + path + "'");
    std::vector<Vec2> points;
    std::string line;
    std::size_t line_no = 0;
    auto parse = [&](const std::string& text) -> double {
        const char* begin = text.c_str();
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0')
            throw ConfigError("initial: " + path + ":" + std::to_string(line_no) +
                              ": cannot parse '" + text + "' as a number");
        return v;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.empty() || trimmed[0] == '#')
            continue;
        if (line_no == 1 && trimmed.rfind("x", 0) == 0)
            continue; // header row
        const std::size_t comma = trimmed.find(',');
        if (comma == std::string::npos)
            throw ConfigError("initial: " + path + ":" + std::to_string(line_no) +
                              ": expected 'x,y'");
        std::string sx = trimmed.substr(0, comma);
        std::string sy = trimmed.substr(comma + 1);
        while (!sx.empty() && (sx.back() == ' ' || sx.back() == '\t'))
            sx.pop_back();
        while (!sy.empty() && (sy.back() == ' ' || sy.back() == '\t'))
            sy.pop_back();
        points.push_back({parse(sx), parse(sy)});
    }
    if (points.size() >= 2 && points.front().x == points.back().x &&
        points.front().y == points.back().y)
        points.pop_back(); // explicitly closed polygon
    try {
        return ClosedCurve(std::move(points));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("initial: " + path + ": " + e.what());
    }
}

std::string summary_json(const RunConfig& config, const RunResult& result,
                         const Summary& summary) {
    using json = nlohmann::ordered_json;
    auto opt = [](const std::optional<double>& v) {
        return v ? json(*v) : json(nullptr);
    };
    json j;
    j["schema"] = 1;
    j["config"] = json::object();
    for (const auto& [key, value] : config.as_key_values())
        j["config"][key] = value;
    j["run"] = {
        {"t_start", result.t_start},
        {"t_final", result.t_final},
        {"frames", result.frames},
        {"substeps", result.substeps},
        {"records", result.series.size()},
        {"tau_area_hit", opt(result.tau_area_hit)},
    };
    j["results"] = {
        {"m", opt(summary.m)},
        {"C", opt(summary.m_intercept)},
        {"m_rms", opt(summary.m_rms)},
        {"K", opt(summary.K)},
        {"K_prime", opt(summary.K_prime)},
        {"C_tilde", opt(summary.C_tilde)},
        {"theta", opt(summary.theta)},
        {"initial_hausdorff", opt(summary.initial_hausdorff)},
        {"tail_fraction_S", opt(summary.tail_fraction_S)},
        {"tail_fraction_dS", opt(summary.tail_fraction_dS)},
        {"tail_fraction_d2S", opt(summary.tail_fraction_d2S)},
    };
    j["flags"] = {
        {"fixed_point", summary.fixed_point},
        {"omega_monotone",
         config.mode == flow::Mode::mcf ? json(nullptr) : json(summary.omega_monotone)},
        {"pinching_upper_ok", summary.pinching_upper_ok},
        {"q_envelope_ok", summary.q_envelope_ok},
        {"ndot_bound_ok", summary.ndot_bound_ok},
        {"rate_lemma_ok", summary.rate_lemma_ok},
    };
    return j.dump(2) + "\n";
}

std::string identities_json(const std::vector<diag::IdentityReport>& reports) {
    using json = nlohmann::ordered_json;
    json arr = json::array();
    for (const auto& rep : reports) {
        json j;
        j["name"] = rep.name;
        j["n"] = rep.n;
        j["dt"] = rep.dt;
        j["residual"] = rep.residual;
        j["order"] = rep.order ? json(*rep.order) : json(nullptr);
        j["scale"] = rep.scale;
        j["defined"] = rep.defined;
        j["note"] = rep.note;
        arr.push_back(std::move(j));
    }
    json root;
    root["schema"] = 1;
    root["identities"] = std::move(arr);
    return root.dump(2) + "\n";
}

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    char buf[64];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v)
            return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace curveflow::app
