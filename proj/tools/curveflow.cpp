// curveflow: batch driver for the rescaled curve-shortening laboratory.
//
// Subcommands: run, verify, sweep, sphere-ode.  Configuration is resolved
// from defaults, an optional flat key=value file (--config), generic --set
// KEY=VALUE overrides, and dedicated flags; later layers win.
// Exit codes: 0 ok, 1 numerical failure, 2 usage or config error.

#include <deque>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curveflow/run.hpp"

namespace {

struct CommonFlags {
    std::optional<std::string> config_path;
    std::vector<std::string> sets;

    struct Named {
        std::string key;
        std::string value;
        CLI::Option* opt = nullptr;
    };
    std::deque<Named> named;

    void add_named(CLI::App* cmd, const std::string& flag, const std::string& key,
                   const std::string& help) {
        named.push_back({key, "", nullptr});
        named.back().opt = cmd->add_option(flag, named.back().value, help);
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "flat key=value config file");
        cmd->add_option("--set", sets, "override KEY=VALUE (repeatable)")
            ->take_all();
        add_named(cmd, "--initial", "initial",
                  "initial curve: circle:r | ellipse:a,b | fourier:k:amp[,k:amp..] | file:path");
        add_named(cmd, "--mode", "mode", "flow mode: mcf | rescaled | normal_rescaled");
        add_named(cmd, "--n", "n_points", "number of vertices");
        add_named(cmd, "--dt", "dt", "frame timestep");
        add_named(cmd, "--t-end", "t_end", "run duration");
        add_named(cmd, "--out", "output_dir", "output directory");
    }

    curveflow::app::RunConfig resolve() const {
        std::vector<std::pair<std::string, std::string>> overrides;
        for (const std::string& item : sets) {
            const std::size_t eq = item.find('=');
            if (eq == std::string::npos || eq == 0)
                throw curveflow::app::ConfigError("--set: expected KEY=VALUE, got '" +
                                                  item + "'");
            overrides.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        }
        for (const Named& flag : named)
            if (flag.opt->count() > 0)
                overrides.emplace_back(flag.key, flag.value);
        return curveflow::app::load_config(config_path, overrides);
    }
};

std::string yesno(bool v) { return v ? "pass" : "FAIL"; }

} // namespace

int main(int argc, char** argv) {
    using curveflow::app::format_double;

    CLI::App app{"curveflow: numerical laboratory for rescaled curve shortening"};
    app.require_subcommand(1);

    CommonFlags run_flags, verify_flags, sweep_flags, sphere_flags;

    CLI::App* run_cmd = app.add_subcommand("run", "evolve one scenario and emit artifacts");
    run_flags.attach(run_cmd);

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "evolution-identity residuals at two resolutions");
    verify_flags.attach(verify_cmd);
    std::vector<std::string> identity_names;
    verify_cmd->add_option("--identity", identity_names,
                           "check only the named identities (repeatable)");

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "decay-rate fits over a mode/amplitude grid");
    sweep_flags.attach(sweep_cmd);

    CLI::App* sphere_cmd =
        app.add_subcommand("sphere-ode", "radius ODE of the round n-sphere");
    sphere_flags.attach(sphere_cmd);
    int dim = 1;
    double r0 = -1.0;
    sphere_cmd->add_option("--dim", dim, "sphere dimension n");
    sphere_cmd->add_option("--r0", r0, "initial radius (default sqrt(2 n))");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (run_cmd->parsed()) {
            const curveflow::app::RunConfig config = run_flags.resolve();
            curveflow::app::execute_run(config);
            std::cout << "wrote " << config.output_dir
                      << "/{series.csv, summary.json, final_curve.csv}\n";
        } else if (verify_cmd->parsed()) {
            const curveflow::app::RunConfig config = verify_flags.resolve();
            for (const std::string& name : identity_names) {
                const auto& known = curveflow::diag::identity_names();
                if (std::find(known.begin(), known.end(), name) == known.end())
                    throw curveflow::app::ConfigError("--identity: unknown identity '" +
                                                      name + "'");
            }
            const auto reports = curveflow::app::execute_verify(config, identity_names);
            for (const auto& rep : reports) {
                std::cout << rep.name << ": residual " << format_double(rep.residual);
                if (rep.order)
                    std::cout << ", order " << format_double(*rep.order);
                if (!rep.defined)
                    std::cout << " (undefined: " << rep.note << ")";
                std::cout << "\n";
            }
            std::cout << "wrote " << config.output_dir << "/identities.json\n";
        } else if (sweep_cmd->parsed()) {
            const curveflow::app::RunConfig config = sweep_flags.resolve();
            const auto rows = curveflow::app::execute_sweep(config);
            for (const auto& row : rows) {
                std::cout << "k=" << row.k << " amp=" << format_double(row.amplitude);
                if (row.m)
                    std::cout << ": m " << format_double(*row.m) << " (expected "
                              << format_double(row.m_expected) << ") " << yesno(row.pass);
                else
                    std::cout << ": failed (" << row.error << ")";
                std::cout << "\n";
            }
            std::cout << "wrote " << config.output_dir << "/rates.csv\n";
        } else if (sphere_cmd->parsed()) {
            const curveflow::app::RunConfig config = sphere_flags.resolve();
            if (sphere_cmd->count("--r0") == 0)
                r0 = std::sqrt(2.0 * dim);
            curveflow::app::execute_sphere_ode(config, dim, r0);
            std::cout << "wrote " << config.output_dir << "/radius.csv\n";
        }
    } catch (const curveflow::app::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
