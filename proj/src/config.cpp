#include "curveflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "curveflow/geometry.hpp"

namespace curveflow::app {

// Runner IO (run.cpp); used for file-backed initial curves.
ClosedCurve read_curve_csv(const std::string& path);

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + ": expected a number, got '" + value + "'");
    }
}

std::size_t parse_size(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size() || v < 0) throw std::invalid_argument("bad count");
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + ": expected a nonnegative integer, got '" +
                          value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config: " + key + ": expected a boolean, got '" + value + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "initial") initial = value;
    else if (key == "mode") {
        try {
            mode = flow::parse_mode(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    else if (key == "n_points") n_points = parse_size(key, value);
    else if (key == "dt") dt = parse_double(key, value);
    else if (key == "t_end") t_end = parse_double(key, value);
    else if (key == "resample_every") resample_every = parse_size(key, value);
    else if (key == "record_every") record_every = parse_size(key, value);
    else if (key == "burn_in") burn_in = parse_double(key, value);
    else if (key == "output_dir") output_dir = value;
    else if (key == "fit_window_lo") fit_window_lo = parse_double(key, value);
    else if (key == "fit_window_hi") fit_window_hi = parse_double(key, value);
    else if (key == "singular_time") singular_time = parse_double(key, value);
    else if (key == "recenter") recenter = parse_bool(key, value);
    else if (key == "cfl") cfl = parse_double(key, value);
    else if (key == "graph_points") graph_points = parse_size(key, value);
    else if (key == "resample_skip_spread") resample_skip_spread = parse_double(key, value);
    else if (key == "quotient_floor_factor") quotient_floor_factor = parse_double(key, value);
    else if (key == "ndot_slack") ndot_slack = parse_double(key, value);
    else if (key == "threads") threads = parse_size(key, value);
    else if (key == "sweep_modes") {
        sweep_modes.clear();
        for (const std::string& item : split(value, ',')) {
            const std::size_t k = parse_size(key, item);
            sweep_modes.push_back(static_cast<int>(k));
        }
    }
    else if (key == "sweep_amplitudes") {
        sweep_amplitudes.clear();
        for (const std::string& item : split(value, ','))
            sweep_amplitudes.push_back(parse_double(key, item));
    }
    else throw ConfigError("config: unknown key '" + key + "'");
}

void RunConfig::validate() const {
    if (n_points < geom::ClosedCurve::min_vertices)
        throw ConfigError("config: n_points: need at least 16");
    if (!(dt > 0.0)) throw ConfigError("config: dt must be positive");
    if (!(t_end > 0.0)) throw ConfigError("config: t_end must be positive");
    if (record_every == 0) throw ConfigError("config: record_every must be >= 1");
    if (resample_every == 0) throw ConfigError("config: resample_every must be >= 1");
    if (!(cfl > 0.0) || cfl > 1.0)
        throw ConfigError("config: cfl must lie in (0, 1]");
    if (!(fit_window_hi > fit_window_lo))
        throw ConfigError("config: fit window must satisfy lo < hi");
    if (graph_points < geom::ClosedCurve::min_vertices)
        throw ConfigError("config: graph_points: need at least 16");
    if (singular_time && !(*singular_time > 0.0))
        throw ConfigError("config: singular_time must be positive");
    if (!(resample_skip_spread >= 0.0))
        throw ConfigError("config: resample_skip_spread must be >= 0");
    if (!(quotient_floor_factor > 0.0))
        throw ConfigError("config: quotient_floor_factor must be positive");
    if (!(ndot_slack >= 0.0)) throw ConfigError("config: ndot_slack must be >= 0");
    if (!(burn_in >= 0.0)) throw ConfigError("config: burn_in must be >= 0");
    for (int k : sweep_modes)
        if (k < 2) throw ConfigError("config: sweep_modes: modes must be >= 2");
    for (double a : sweep_amplitudes)
        if (!(a > 0.0) || a >= 1.0)
            throw ConfigError("config: sweep_amplitudes: need 0 < amplitude < 1");
}

std::map<std::string, std::string> RunConfig::as_key_values() const {
    auto fmt = [](double v) {
        std::ostringstream out;
        out.precision(17);
        out << v;
        return out.str();
    };
    std::map<std::string, std::string> kv;
    kv["initial"] = initial;
    kv["mode"] = flow::mode_name(mode);
    kv["n_points"] = std::to_string(n_points);
    kv["dt"] = fmt(dt);
    kv["t_end"] = fmt(t_end);
    kv["resample_every"] = std::to_string(resample_every);
    kv["record_every"] = std::to_string(record_every);
    kv["burn_in"] = fmt(burn_in);
    kv["output_dir"] = output_dir;
    kv["fit_window_lo"] = fmt(fit_window_lo);
    kv["fit_window_hi"] = fmt(fit_window_hi);
    if (singular_time) kv["singular_time"] = fmt(*singular_time);
    kv["recenter"] = recenter ? "true" : "false";
    kv["cfl"] = fmt(cfl);
    kv["graph_points"] = std::to_string(graph_points);
    kv["resample_skip_spread"] = fmt(resample_skip_spread);
    kv["quotient_floor_factor"] = fmt(quotient_floor_factor);
    kv["ndot_slack"] = fmt(ndot_slack);
    kv["threads"] = std::to_string(threads);
    {
        std::ostringstream out;
        for (std::size_t i = 0; i < sweep_modes.size(); ++i)
            out << (i ? "," : "") << sweep_modes[i];
        kv["sweep_modes"] = out.str();
    }
    {
        std::ostringstream out;
        for (std::size_t i = 0; i < sweep_amplitudes.size(); ++i)
            out << (i ? "," : "") << fmt(sweep_amplitudes[i]);
        kv["sweep_amplitudes"] = out.str();
    }
    return kv;
}

RunConfig load_config(const std::optional<std::string>& config_path,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
    RunConfig config;
    if (config_path) {
        std::ifstream in(*config_path);
        if (!in) throw ConfigError("config: cannot open '" + *config_path + "'");
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string stripped = trim(line);
            if (stripped.empty() || stripped[0] == '#') continue;
            const auto eq = stripped.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config: " + *config_path + ":" +
                                  std::to_string(lineno) + ": expected key=value");
            config.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
        }
    }
    for (const auto& [key, value] : overrides) config.set(key, value);
    config.validate();
    return config;
}

namespace {

// Curves sampled at uniform angle are not uniform in arclength; oversample
// then resample so the vertex set lands within spline accuracy of the shape.
ClosedCurve resampled_shape(const ClosedCurve& dense, std::size_t n) {
    return geom::resample_uniform(dense, n);
}

} // namespace

ClosedCurve build_initial_curve(const std::string& spec, std::size_t n) {
    if (n < geom::ClosedCurve::min_vertices)
        throw ConfigError("initial: n_points must be at least 16");
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw ConfigError("initial: expected 'kind:params', got '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);

    try {
        if (kind == "circle") {
            const double r = parse_double("initial.circle", rest);
            if (!(r > 0.0)) throw ConfigError("initial: circle radius must be positive");
            return geom::make_circle(r, n);
        }
        if (kind == "ellipse") {
            const std::vector<std::string> parts = split(rest, ',');
            if (parts.size() != 2)
                throw ConfigError("initial: ellipse needs 'a,b', got '" + rest + "'");
            const double a = parse_double("initial.ellipse.a", parts[0]);
            const double b = parse_double("initial.ellipse.b", parts[1]);
            if (!(a > 0.0) || !(b > 0.0))
                throw ConfigError("initial: ellipse semi-axes must be positive");
            return resampled_shape(geom::make_ellipse(a, b, 4 * n), n);
        }
        if (kind == "fourier") {
            std::vector<std::pair<int, double>> modes;
            double total = 0.0;
            for (const std::string& item : split(rest, ',')) {
                const std::vector<std::string> kv = split(item, ':');
                if (kv.size() != 2)
                    throw ConfigError("initial: fourier needs 'k:amp[,k:amp..]', got '" +
                                      rest + "'");
                const int k = static_cast<int>(parse_size("initial.fourier.mode", kv[0]));
                const double amp = parse_double("initial.fourier.amplitude", kv[1]);
                modes.emplace_back(k, amp);
                total += std::abs(amp);
            }
            if (modes.empty())
                throw ConfigError("initial: fourier needs at least one mode");
            if (total >= std::sqrt(2.0) - 0.05)
                throw ConfigError("initial: fourier amplitudes too large "
                                  "(radial profile would pinch)");
            return resampled_shape(geom::make_fourier_perturbed(modes, 4 * n), n);
        }
        if (kind == "file") {
            if (rest.empty()) throw ConfigError("initial: file needs a path");
            return resampled_shape(read_curve_csv(rest), n);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("initial: ") + e.what());
    }
    throw ConfigError("initial: unknown kind '" + kind +
                      "' (expected circle, ellipse, fourier or file)");
}

} // namespace curveflow::app
