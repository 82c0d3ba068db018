#include "chsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "chsim/characteristics.hpp"

#ifndef CHSIM_VERSION
#define CHSIM_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace chsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string csv_line(const std::vector<double>& values) {
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        line += (i ? "," : "") + format_number(values[i]);
    }
    return line + "\n";
}

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, x);
    }
    return m;
}

DiagnosticResult threshold(Diagnostic id, double measured, double tol, std::string detail = {}) {
    DiagnosticResult r{id, measured < tol ? DiagnosticStatus::pass : DiagnosticStatus::fail, measured, tol,
                       std::move(detail)};
    if (!std::isfinite(measured)) {
        r.status = DiagnosticStatus::fail;
    }
    return r;
}

DiagnosticResult skipped(Diagnostic id, std::string why) {
    return {id, DiagnosticStatus::skipped, kNaN, kNaN, std::move(why)};
}

/// Per-snapshot columns of the identity table.
struct IdentityColumns {
    std::vector<double> transport;
    std::vector<double> m_flow;
    std::vector<double> casimir;
    std::vector<double> supp_left;
    std::vector<double> supp_right;
    std::vector<double> phi_beta;
    std::vector<double> phi_gamma;

    explicit IdentityColumns(std::size_t n)
        : transport(n, kNaN), m_flow(n, kNaN), casimir(n, kNaN), supp_left(n, kNaN), supp_right(n, kNaN),
          phi_beta(n, kNaN), phi_gamma(n, kNaN) {}
};

struct DecayRow {
    double t;
    DecayFit fit;
};

class RunContext {
public:
    RunContext(const Scenario& sc, const Trajectory& traj)
        : sc_(sc), traj_(traj), ids_(traj.snapshots.size()) {}

    bool wants(Diagnostic d) const {
        return std::find(sc_.diagnostics.begin(), sc_.diagnostics.end(), d) != sc_.diagnostics.end();
    }

    std::vector<DiagnosticResult> flow_group() {
        std::vector<DiagnosticResult> out;
        const bool any = wants(Diagnostic::transport) || wants(Diagnostic::representation) ||
                         wants(Diagnostic::m_flow) || wants(Diagnostic::sup_bound);
        if (!any) {
            return out;
        }
        const Params& params = traj_.params;
        std::optional<FlowSeries> flow;
        std::string flow_error;
        try {
            flow = evolve_flow(traj_, traj_.grid().points());
        } catch (const FlowDegeneracyError& e) {
            flow_error = e.what();
        }
        const auto failed = [&](Diagnostic id) {
            return DiagnosticResult{id, DiagnosticStatus::error, kNaN, kNaN, flow_error};
        };
        if (wants(Diagnostic::transport)) {
            if (!flow) {
                out.push_back(failed(Diagnostic::transport));
            } else {
                ids_.transport = check_transport_identity(*flow, traj_, params.b);
                out.push_back(threshold(Diagnostic::transport, max_of(ids_.transport), 1e-4));
            }
        }
        if (wants(Diagnostic::representation)) {
            if (!flow) {
                out.push_back(failed(Diagnostic::representation));
            } else {
                const auto rebuilt = reconstruct_rho(*flow, traj_, params.b);
                double worst = 0.0;
                for (std::size_t j = 0; j < rebuilt.size(); ++j) {
                    worst = std::max(worst, (rebuilt[j] - traj_.snapshots[j].rho).max_abs());
                }
                out.push_back(threshold(Diagnostic::representation, worst, 1e-4, "along_characteristic"));
            }
        }
        if (wants(Diagnostic::m_flow)) {
            if (!params.alpha_vanishes()) {
                out.push_back(skipped(Diagnostic::m_flow, "requires alpha = 0"));
            } else if (!flow) {
                out.push_back(failed(Diagnostic::m_flow));
            } else {
                ids_.m_flow = check_m_flow_identity(*flow, traj_);
                out.push_back(threshold(Diagnostic::m_flow, max_of(ids_.m_flow), 1e-4));
            }
        }
        if (wants(Diagnostic::sup_bound)) {
            if (!flow) {
                out.push_back(failed(Diagnostic::sup_bound));
            } else {
                const SupBoundReport rep = check_sup_bound(*flow, traj_, params.b);
                DiagnosticResult r{Diagnostic::sup_bound, rep.holds ? DiagnosticStatus::pass : DiagnosticStatus::fail,
                                   rep.worst_ratio, 1.0, "m1=" + format_number(rep.m1)};
                out.push_back(r);
            }
        }
        return out;
    }

    DiagnosticResult formulation() const {
        const Params& params = traj_.params;
        if (params.r != 1.0 || !params.alpha_is_constant()) {
            return skipped(Diagnostic::formulation, "requires r = 1 and constant alpha");
        }
        double worst = 0.0;
        for (const auto& s : traj_.snapshots) {
            const Tendency a = rhs_m_form(s, params, traj_.dealias);
            const Tendency b = rhs_nonlocal(s, params, traj_.dealias);
            const double scale = std::max(a.du.max_abs(), a.drho.max_abs());
            const double diff = std::max((a.du - b.du).max_abs(), (a.drho - b.drho).max_abs());
            if (scale > 0.0) {
                worst = std::max(worst, diff / scale);
            }
        }
        return threshold(Diagnostic::formulation, worst, 1e-10, "relative sup difference of the two right-hand sides");
    }

    DiagnosticResult casimir_drift() {
        const double b = traj_.params.b;
        const double c0 = casimir(traj_.initial().rho, b);
        double worst = 0.0;
        for (std::size_t j = 0; j < traj_.snapshots.size(); ++j) {
            ids_.casimir[j] = casimir(traj_.snapshots[j].rho, b);
            const double d = std::abs(ids_.casimir[j] - c0);
            worst = std::max(worst, c0 > 0.0 ? d / c0 : d);
        }
        return threshold(Diagnostic::casimir, worst, 1e-6, c0 > 0.0 ? "relative drift" : "absolute drift, zero invariant");
    }

    DiagnosticResult support() {
        SupportReport rep;
        try {
            rep = check_support_containment(traj_, sc_.support_eps, sc_.analytic_supports());
        } catch (const FlowDegeneracyError& e) {
            return {Diagnostic::support, DiagnosticStatus::error, kNaN, 0.0, e.what()};
        }
        const double dx = traj_.grid().dx();
        double overshoot = 0.0;
        for (std::size_t j = 0; j < rep.rows.size(); ++j) {
            const SupportRow& row = rep.rows[j];
            if (row.rho_support) {
                ids_.supp_left[j] = row.rho_support->beta;
                ids_.supp_right[j] = row.rho_support->gamma;
                ids_.phi_beta[j] = row.rho_left + 2 * dx;
                ids_.phi_gamma[j] = row.rho_right - 2 * dx;
                overshoot = std::max({overshoot, row.rho_left - row.rho_support->beta,
                                      row.rho_support->gamma - row.rho_right});
            }
            if (row.m_support) {
                overshoot =
                    std::max({overshoot, row.m_left - row.m_support->beta, row.m_support->gamma - row.m_right});
            }
        }
        DiagnosticResult r{Diagnostic::support, rep.all_contained() ? DiagnosticStatus::pass : DiagnosticStatus::fail,
                           overshoot, 0.0, traj_.params.alpha_vanishes() ? "rho and m" : "rho only (alpha != 0)"};
        return r;
    }

    DiagnosticResult persistence(std::vector<PersistenceEntry>& entries, std::vector<std::string>& tables) const {
        const PersistenceSpec& spec = sc_.persistence;
        const double hw = sc_.half_length;
        std::optional<Trajectory> doubled;
        std::string detail;
        if (spec.l_doubling) {
            Scenario big = sc_;
            big.half_length *= 2.0;
            big.n *= 2;
            try {
                doubled = integrate(big.initial_state(), big.resolved_params(), big.ctrl, big.formulation);
            } catch (const BlowUpError& e) {
                detail = std::string("doubled-domain rerun failed: ") + e.what();
            }
            if (doubled && doubled->snapshots.size() != traj_.snapshots.size()) {
                detail = "doubled-domain rerun has a different snapshot count";
                doubled.reset();
            }
        }
        bool pass = true;
        double worst_residual = 0.0;
        double worst_l = 0.0;
        for (std::size_t wi = 0; wi < spec.weights.size(); ++wi) {
            const StandardWeight& w = spec.weights[wi];
            const std::string file = "persistence_" + std::to_string(wi) + ".csv";
            const bool admissible = admissibility_check(w, traj_.grid()).admissible;
            std::vector<PersistenceReport> reps;
            for (double p : spec.exponents) {
                PersistenceReport rep = persistence_monitor(traj_, w, p, hw);
                PersistenceEntry e{w, p, admissible, condition_lp(w, p), rep.c_hat, rep.max_residual, kNaN, true, file};
                if (doubled) {
                    e.l_discrepancy = relative_discrepancy(rep, persistence_monitor(*doubled, w, p, hw));
                    worst_l = std::max(worst_l, e.l_discrepancy);
                }
                e.pass = rep.finite && rep.max_residual < spec.residual_tol &&
                         (!doubled || e.l_discrepancy < spec.l_tol);
                worst_residual = std::max(worst_residual, rep.max_residual);
                pass = pass && e.pass;
                entries.push_back(e);
                reps.push_back(std::move(rep));
            }
            std::string table = "t";
            for (double p : spec.exponents) {
                table += ",W_" + format_number(p);
            }
            table += ",M_running,fit_residual\n";
            for (std::size_t j = 0; j < traj_.snapshots.size(); ++j) {
                std::vector<double> row{traj_.snapshots[j].t};
                double residual = 0.0;
                for (const auto& rep : reps) {
                    row.push_back(rep.w[j]);
                    residual = std::max(residual, rep.fit_residual[j]);
                }
                row.push_back(reps.front().m_running[j]);
                row.push_back(residual);
                table += csv_line(row);
            }
            tables.push_back(std::move(table));
        }
        if (detail.empty()) {
            detail = doubled ? "max L-doubling discrepancy " + format_number(worst_l) : "no L-doubling rerun";
        }
        return {Diagnostic::persistence, pass ? DiagnosticStatus::pass : DiagnosticStatus::fail, worst_residual,
                spec.residual_tol, detail};
    }

    DiagnosticResult decay(std::vector<DecayRow>& rows, DecayWindow& window) const {
        window = sc_.decay.window.value_or(default_decay_window(traj_.grid()));
        bool pass = true;
        double worst = kInfinity;
        std::size_t resolved = 0;
        for (const auto& s : traj_.snapshots) {
            RealField f = derivative(s.u, 1);
            for (std::size_t j = 0; j < f.size(); ++j) {
                f[j] = std::abs(s.u[j]) + std::abs(f[j]) + std::abs(s.rho[j]);
            }
            DecayFit fit;
            try {
                fit = decay_profile(f, window);
            } catch (const FitError&) {
                // Identically zero in the window.
            }
            if (fit.resolved) {
                ++resolved;
                worst = std::min(worst, fit.exp_rate);
                pass = pass && fit.exp_rate >= sc_.decay.min_rate;
            }
            rows.push_back({s.t, fit});
        }
        return {Diagnostic::decay, pass ? DiagnosticStatus::pass : DiagnosticStatus::fail,
                resolved ? worst : kNaN, sc_.decay.min_rate,
                std::to_string(resolved) + " of " + std::to_string(rows.size()) + " snapshots resolved above the floor"};
    }

    const IdentityColumns& identities() const { return ids_; }

private:
    const Scenario& sc_;
    const Trajectory& traj_;
    IdentityColumns ids_;
};

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,x,u,rho,m\n";
    const Params& params = traj.params;
    const Grid& g = traj.grid();
    for (const auto& s : traj.snapshots) {
        const RealField m = apply_inertia(s.u, params.r, params.inertia_range);
        for (std::size_t j = 0; j < g.size(); ++j) {
            out += csv_line({s.t, g.x(j), s.u[j], s.rho[j], m[j]});
        }
    }
    return out;
}

std::string identity_csv(const Trajectory& traj, const IdentityColumns& c) {
    std::string out = "t,transport_dev,m_flow_dev,casimir,supp_left,supp_right,phi_beta,phi_gamma\n";
    for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
        out += csv_line({traj.snapshots[j].t, c.transport[j], c.m_flow[j], c.casimir[j], c.supp_left[j],
                         c.supp_right[j], c.phi_beta[j], c.phi_gamma[j]});
    }
    return out;
}

std::string decay_csv(const std::vector<DecayRow>& rows, const DecayWindow& w) {
    std::string out = "t,a_hat,c_hat,window,residual\n";
    const std::string window = format_number(w.lo) + ":" + format_number(w.hi);
    for (const auto& r : rows) {
        const bool ok = r.fit.resolved;
        out += format_number(r.t) + "," + format_number(ok ? r.fit.exp_rate : kNaN) + "," +
               format_number(ok ? r.fit.alg_rate : kNaN) + "," + window + "," +
               format_number(ok ? r.fit.exp_residual : kNaN) + "\n";
    }
    return out;
}

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_number(v)); }

} // namespace

const char* code_version() { return CHSIM_VERSION; }

void atomic_write(const fs::path& path, const std::string& contents) {
    static std::atomic<unsigned long> counter{0};
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << contents;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("failed to write " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    const std::size_t threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(workers, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex guard;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(guard);
                    if (!first) {
                        first = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (first) {
        std::rethrow_exception(first);
    }
}

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string to_string(DiagnosticStatus s) {
    switch (s) {
    case DiagnosticStatus::pass:
        return "pass";
    case DiagnosticStatus::fail:
        return "fail";
    case DiagnosticStatus::skipped:
        return "skipped";
    case DiagnosticStatus::error:
        return "error";
    }
    return "error";
}

const DiagnosticResult& RunManifest::diagnostic(Diagnostic id) const {
    for (const auto& d : diagnostics) {
        if (d.id == id) {
            return d;
        }
    }
    throw std::out_of_range("diagnostic " + to_string(id) + " was not requested");
}

bool RunManifest::all_passed() const {
    return std::none_of(diagnostics.begin(), diagnostics.end(), [](const DiagnosticResult& d) {
        return d.status == DiagnosticStatus::fail || d.status == DiagnosticStatus::error;
    });
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["code_version"] = code_version();
    j["run_id"] = run_id;
    j["scenario"] = scenario;
    j["outcome"] = outcome;
    j["blowup"] = blowup ? nlohmann::json{{"time", number(blowup->time)}, {"max_abs_ux", number(blowup->max_abs_ux)}}
                         : nlohmann::json(nullptr);
    j["snapshots"] = snapshots;
    j["t_reached"] = t_reached;
    j["wall_time_s"] = wall_time;
    j["all_passed"] = all_passed();
    auto& diags = j["diagnostics"] = nlohmann::json::array();
    for (const auto& d : diagnostics) {
        diags.push_back({{"name", to_string(d.id)},
                         {"status", to_string(d.status)},
                         {"measured", number(d.measured)},
                         {"tolerance", number(d.tolerance)},
                         {"detail", d.detail}});
    }
    auto& pers = j["persistence"] = nlohmann::json::array();
    for (const auto& e : persistence) {
        pers.push_back({{"weight", e.weight.describe()},
                        {"p", number(e.p)},
                        {"admissible", e.admissible},
                        {"condition_lp", e.condition_lp},
                        {"c_hat", number(e.c_hat)},
                        {"max_residual", number(e.max_residual)},
                        {"l_discrepancy", number(e.l_discrepancy)},
                        {"pass", e.pass},
                        {"file", e.file}});
    }
    j["files"] = files;
    return j;
}

std::string run_id(const Scenario& scenario) {
    // FNV-1a over the canonical echo; the worker count does not change results.
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& [k, v] : scenario.echo()) {
        if (k == "run.workers") {
            continue;
        }
        for (const char c : k + "=" + v + "\n") {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
    }
    std::ostringstream out;
    out << scenario.name << "-" << std::hex;
    out.width(16);
    out.fill('0');
    out << h;
    std::string id = out.str();
    for (char& c : id) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) {
            c = '_';
        }
    }
    return id;
}

RunManifest run_scenario(const Scenario& sc, const fs::path& out_dir) {
    sc.validate();
    const auto start = std::chrono::steady_clock::now();
    const int workers = effective_workers(sc.workers);
    const Params params = sc.resolved_params();
    const State init = sc.initial_state();

    RunManifest man;
    man.run_id = run_id(sc);
    man.directory = out_dir / man.run_id;
    man.scenario = sc.echo();

    Trajectory traj;
    try {
        traj = integrate(init, params, sc.ctrl, sc.formulation);
    } catch (const BlowUpError& e) {
        traj = e.partial;
        if (traj.snapshots.empty()) {
            traj.params = params;
            traj.formulation = sc.formulation;
            traj.dealias = sc.ctrl.dealias;
            traj.snapshots.push_back(init);
        }
        man.outcome = "blowup";
        man.blowup = BlowUpInfo{e.time, e.max_abs_ux};
    }
    man.snapshots = traj.snapshots.size();
    man.t_reached = traj.final().t;

    RunContext ctx(sc, traj);
    std::vector<DiagnosticResult> flow_results;
    std::optional<DiagnosticResult> formulation, casimir_result, support, persistence, decay;
    std::vector<std::string> persistence_tables;
    std::vector<DecayRow> decay_rows;
    DecayWindow window{0.0, 0.0};

    std::vector<std::function<void()>> tasks;
    tasks.emplace_back([&] { flow_results = ctx.flow_group(); });
    if (ctx.wants(Diagnostic::formulation)) {
        tasks.emplace_back([&] { formulation = ctx.formulation(); });
    }
    if (ctx.wants(Diagnostic::casimir)) {
        tasks.emplace_back([&] { casimir_result = ctx.casimir_drift(); });
    }
    if (ctx.wants(Diagnostic::support)) {
        tasks.emplace_back([&] { support = ctx.support(); });
    }
    if (ctx.wants(Diagnostic::persistence)) {
        tasks.emplace_back([&] { persistence = ctx.persistence(man.persistence, persistence_tables); });
    }
    if (ctx.wants(Diagnostic::decay)) {
        tasks.emplace_back([&] { decay = ctx.decay(decay_rows, window); });
    }
    parallel_for(tasks.size(), workers, [&](std::size_t i) { tasks[i](); });

    for (Diagnostic d : sc.diagnostics) {
        const auto from_flow = std::find_if(flow_results.begin(), flow_results.end(),
                                            [d](const DiagnosticResult& r) { return r.id == d; });
        if (from_flow != flow_results.end()) {
            man.diagnostics.push_back(*from_flow);
        } else if (d == Diagnostic::formulation) {
            man.diagnostics.push_back(*formulation);
        } else if (d == Diagnostic::casimir) {
            man.diagnostics.push_back(*casimir_result);
        } else if (d == Diagnostic::support) {
            man.diagnostics.push_back(*support);
        } else if (d == Diagnostic::persistence) {
            man.diagnostics.push_back(*persistence);
        } else if (d == Diagnostic::decay) {
            man.diagnostics.push_back(*decay);
        }
    }

    const auto emit = [&](const std::string& name, const std::string& contents) {
        atomic_write(man.directory / name, contents);
        man.files.push_back(name);
    };
    emit("trajectory.csv", trajectory_csv(traj));
    emit("identities.csv", identity_csv(traj, ctx.identities()));
    for (std::size_t i = 0; i < persistence_tables.size(); ++i) {
        emit("persistence_" + std::to_string(i) + ".csv", persistence_tables[i]);
    }
    if (decay) {
        emit("decay.csv", decay_csv(decay_rows, window));
    }
    man.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    man.files.push_back("manifest.json");
    atomic_write(man.directory / "manifest.json", man.to_json().dump(2) + "\n");
    return man;
}

} // namespace chsim
