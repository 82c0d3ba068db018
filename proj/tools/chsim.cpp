#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "chsim/harness.hpp"
#include "chsim/scenario.hpp"
#include "chsim/suites.hpp"

namespace {

enum Exit { ok = 0, config_error = 1, internal_error = 2 };

void print_manifest(const chsim::RunManifest& man) {
    std::cout << "run " << man.run_id << ": " << man.outcome << " at t=" << man.t_reached << " ("
              << man.snapshots << " snapshots, " << man.wall_time << " s)\n";
    if (man.blowup) {
        std::cout << "  blow-up at t=" << man.blowup->time << ", max|u_x|=" << man.blowup->max_abs_ux << "\n";
    }
    for (const auto& d : man.diagnostics) {
        std::cout << "  " << chsim::to_string(d.id) << ": " << chsim::to_string(d.status);
        if (d.status != chsim::DiagnosticStatus::skipped) {
            std::cout << " (measured " << chsim::format_number(d.measured) << ", tolerance "
                      << chsim::format_number(d.tolerance) << ")";
        }
        if (!d.detail.empty()) {
            std::cout << " " << d.detail;
        }
        std::cout << "\n";
    }
    std::cout << "  output: " << man.directory.string() << "\n";
}

void print_suite(const chsim::SuiteReport& rep, const std::filesystem::path& dir) {
    std::cout << "suite " << rep.name << ": " << (rep.passed() ? "pass" : "fail") << " (" << rep.wall_time << " s)\n";
    for (const auto& c : rep.checks) {
        std::cout << "  " << (c.pass ? "PASS " : "FAIL ") << c.name << ": measured " << chsim::format_number(c.measured)
                  << ", tolerance " << chsim::format_number(c.tolerance) << " " << c.detail << "\n";
    }
    std::cout << "  output: " << dir.string() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral simulator for two-component Camassa-Holm type systems"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Integrate a scenario and evaluate its diagnostics");
    std::string config;
    std::string out_dir = "out";
    chsim::Overrides ov;
    std::optional<std::string> preset;
    std::optional<std::size_t> n;
    std::optional<double> half_length;
    std::optional<double> t_final;
    std::optional<double> cfl;
    std::optional<std::string> formulation;
    std::optional<int> workers;
    run->add_option("--config", config, "INI scenario file");
    run->add_option("--preset", preset, "Base preset: zero, 2cch, 2cdp, chb, hkmetric, highorder");
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    run->add_option("--n", n, "Grid points");
    run->add_option("--L", half_length, "Domain half-length");
    run->add_option("--tfinal", t_final, "Final time");
    run->add_option("--cfl", cfl, "CFL number");
    run->add_option("--formulation", formulation, "m or nonlocal");
    run->add_option("--workers", workers, "Worker threads (CHSIM_WORKERS overrides)");

    auto* suite = app.add_subcommand("suite", "Run a named experiment suite");
    std::string suite_name;
    std::string suite_out = "out";
    int suite_workers = 1;
    suite->add_option("name", suite_name, "convergence, stability, persistence, friedrichs or support")->required();
    suite->add_option("--out", suite_out, "Output directory")->capture_default_str();
    suite->add_option("--workers", suite_workers, "Worker threads (CHSIM_WORKERS overrides)");

    auto* check = app.add_subcommand("check", "Validate a scenario file without running it");
    std::string check_file;
    check->add_option("file", check_file, "INI scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (*run) {
            ov = {preset, n, half_length, t_final, cfl, formulation, workers};
            const chsim::Scenario sc =
                config.empty() ? chsim::scenario_from_overrides(ov) : chsim::load_scenario(config, ov);
            print_manifest(chsim::run_scenario(sc, out_dir));
        } else if (*suite) {
            const chsim::SuiteReport rep = chsim::run_suite(suite_name, suite_workers);
            chsim::write_suite(rep, suite_out);
            print_suite(rep, suite_out);
        } else if (*check) {
            const chsim::Scenario sc = chsim::load_scenario(check_file);
            std::cout << check_file << ": ok (" << sc.name << ", n=" << sc.n << ", L=" << sc.half_length
                      << ", t_final=" << sc.ctrl.t_final << ")\n";
        }
    } catch (const chsim::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return config_error;
    } catch (const chsim::DomainError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return config_error;
    } catch (const chsim::HypothesisError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return internal_error;
    }
    return ok;
}
