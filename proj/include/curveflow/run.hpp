#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curveflow/config.hpp"
#include "curveflow/diagnostics.hpp"
#include "curveflow/shrinker.hpp"

namespace curveflow::app {

/// Extra per-record quantities kept out of the CSV schema.
struct RecordExtras {
    double sup_kappa = 0.0;
    double ndot_c = 0.0; // assembled constant C of the quotient-rate bound
    std::optional<double> v_norm_c2a; // full C^{2,1/2} norm
};

struct Summary; // below

struct RunResult {
    std::vector<diag::DiagnosticsRecord> series;
    std::vector<RecordExtras> extras;
    ClosedCurve final_curve;
    double t_start = 0.0;
    double t_final = 0.0;
    std::size_t frames = 0;
    std::size_t substeps = 0;
    std::optional<double> tau_area_hit; // mcf: first tau with area < 0.01 A0
    double wall_seconds = 0.0;

    RunResult() : final_curve(geom::make_circle(1.0, 16)) {}
};

struct Summary {
    std::optional<double> m, m_intercept, m_rms; // decay fit of v_c0
    std::optional<double> K;        // max over records of 2 (sup kappa^2 + 1/2)
    std::optional<double> K_prime;  // -min over records of N
    std::optional<double> C_tilde;  // rate-lemma ratio bound
    std::optional<double> theta;    // Lojasiewicz exponent
    bool fixed_point = false;       // max v_c0 stayed below 1e-6
    bool omega_monotone = false;
    bool pinching_upper_ok = false; // N <= K (2% slack) wherever defined
    bool q_envelope_ok = false;     // Q >= (E(T0)/K') exp(-K'(t-T0)), 10% slack
    bool ndot_bound_ok = false;     // differenced Ndot >= bound with slack
    bool rate_lemma_ok = false;
    std::optional<double> initial_hausdorff; // distance of M0 to the shrinker
    std::optional<double> tail_fraction_S, tail_fraction_dS, tail_fraction_d2S;
};

/// Run one scenario in memory (no file output).
RunResult run_scenario(const RunConfig& config);

/// Derived summary of a finished run.
Summary summarize(const RunConfig& config, const RunResult& result);

/// run subcommand: series.csv, summary.json, final_curve.csv in output_dir.
void execute_run(const RunConfig& config);

/// verify subcommand: identity suite at (n, dt) and (2n, dt/2);
/// writes identities.json, returns the reports.
std::vector<diag::IdentityReport> execute_verify(const RunConfig& config,
                                                 const std::vector<std::string>& names);

/// sweep subcommand: one run per (mode k, amplitude), aggregated rates.csv.
struct SweepRow {
    int k = 0;
    double amplitude = 0.0;
    std::optional<double> m, C, rms;
    double m_expected = 0.0;
    bool pass = false;
    std::string error; // nonempty when the run failed
};

std::vector<SweepRow> execute_sweep(const RunConfig& config);

/// sphere-ode subcommand: writes radius.csv.
void execute_sphere_ode(const RunConfig& config, int dim, double r0);

// IO helpers (deterministic formatting).
void write_series_csv(const std::string& path, const std::vector<diag::DiagnosticsRecord>& series);
void write_curve_csv(const std::string& path, const ClosedCurve& curve);
ClosedCurve read_curve_csv(const std::string& path);
std::string summary_json(const RunConfig& config, const RunResult& result, const Summary& summary);
std::string identities_json(const std::vector<diag::IdentityReport>& reports);
std::string format_double(double v);

} // namespace curveflow::app
