#include "chsim/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "chsim/characteristics.hpp"
#include "chsim/harness.hpp"
#include "chsim/profiles.hpp"
#include "chsim/weights.hpp"

namespace chsim {

namespace {

std::string num(double v) { return format_number(v); }

State gaussian_state(const Grid& g, double ua = 0.8) {
    return State(0.0, Profile::gaussian(ua, 1.5).sample(g), Profile::gaussian(0.5, 2.0, 1.0).sample(g));
}

StepControl control(double t_final, double dt, double output_dt) {
    StepControl c;
    c.t_final = t_final;
    c.dt_max = dt;
    c.output_dt = output_dt;
    return c;
}

/// Sup difference of u and rho on the coarse grid against a finer run sampled at the same points.
double coarse_error(const State& coarse, const State& fine) {
    const std::size_t stride = fine.u.size() / coarse.u.size();
    double e = 0.0;
    for (std::size_t j = 0; j < coarse.u.size(); ++j) {
        e = std::max({e, std::abs(coarse.u[j] - fine.u[j * stride]), std::abs(coarse.rho[j] - fine.rho[j * stride])});
    }
    return e;
}

State fixed_run(const Grid& g, double dt, double t_final, bool oracle) {
    try {
        return integrate_fixed(gaussian_state(g), Params{}, dt, t_final, t_final).final();
    } catch (const BlowUpError& e) {
        if (oracle) {
            throw OrchestrationError(std::string("convergence oracle run failed: ") + e.what());
        }
        throw;
    }
}

SuiteReport convergence(int workers) {
    SuiteReport rep;
    const double t_final = 0.5;
    const double floor = 1e-11;

    const std::vector<std::size_t> sizes{128, 256, 512, 1024};
    const std::size_t oracle_n = 2048;
    const double space_dt = 0.005;
    const std::vector<int> steps{25, 50, 100, 200};
    const int oracle_steps = 800;
    const std::size_t time_n = 256;

    // Slot 0 and 1 hold the oracles.
    std::vector<std::optional<State>> space(sizes.size() + 1);
    std::vector<std::optional<State>> time(steps.size() + 1);
    parallel_for(space.size() + time.size(), workers, [&](std::size_t i) {
        if (i < space.size()) {
            const bool oracle = i == 0;
            const Grid g(20.0, oracle ? oracle_n : sizes[i - 1]);
            space[i] = fixed_run(g, space_dt, t_final, oracle);
        } else {
            const std::size_t k = i - space.size();
            const bool oracle = k == 0;
            const Grid g(20.0, time_n);
            time[k] = fixed_run(g, t_final / (oracle ? oracle_steps : steps[k - 1]), t_final, oracle);
        }
    });

    SuiteTable spatial{"spatial", {"n", "error", "ratio"}, {}};
    double worst_ratio = kInfinity;
    std::vector<double> errs;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        errs.push_back(coarse_error(*space[i + 1], *space[0]));
        double ratio = std::nan("");
        if (i > 0) {
            ratio = errs[i - 1] / errs[i];
            if (errs[i - 1] > floor && errs[i] > floor) {
                worst_ratio = std::min(worst_ratio, ratio);
            } else if (errs[i - 1] > floor) {
                // Reached the floor within one doubling.
                worst_ratio = std::min(worst_ratio, std::max(ratio, 10.0));
            }
        }
        spatial.rows.push_back({std::to_string(sizes[i]), num(errs[i]), num(ratio)});
    }
    rep.checks.push_back({"spatial error drop per doubling", worst_ratio >= 10.0, worst_ratio, 10.0,
                          "n up to the 1e-11 floor against n=" + std::to_string(oracle_n)});

    SuiteTable temporal{"temporal", {"steps", "dt", "error", "order"}, {}};
    double min_order = kInfinity;
    double max_order = -kInfinity;
    double prev = 0.0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const double e = coarse_error(*time[k + 1], *time[0]);
        double order = std::nan("");
        if (k > 0) {
            order = std::log2(prev / e);
            min_order = std::min(min_order, order);
            max_order = std::max(max_order, order);
        }
        temporal.rows.push_back({std::to_string(steps[k]), num(t_final / steps[k]), num(e), num(order)});
        prev = e;
    }
    const double spread = std::max(std::abs(min_order - 4.0), std::abs(max_order - 4.0));
    rep.checks.push_back({"temporal order deviation from 4", spread <= 0.3, spread, 0.3,
                          "observed orders in [" + num(min_order) + ", " + num(max_order) + "]"});
    rep.tables = {spatial, temporal};
    return rep;
}

struct StabilityData {
    double ua, uw, uc, ra, rw, rc, pert_center;
};

SuiteReport stability(int workers) {
    SuiteReport rep;
    const Grid g(20.0, 256);
    const double s = 3.0;
    const std::vector<double> eps{1e-2, 1e-3, 1e-4};
    // The first set trains the growth constant; the others are held out.
    const std::vector<StabilityData> sets{
        {0.8, 1.5, 0.0, 0.5, 2.0, 1.0, 1.5},
        {0.5, 1.0, -1.0, 0.8, 1.5, 0.0, 1.5},
        {0.6, 2.0, 2.0, 0.3, 1.0, -2.0, 3.5},
    };
    std::vector<StabilityTable> tables(sets.size());
    parallel_for(sets.size(), workers, [&](std::size_t i) {
        const StabilityData& d = sets[i];
        RealField pert = Profile::gaussian(1.0, 1.0, d.pert_center).sample(g);
        pert *= 1.0 / besov_norm(pert, BesovIndex(s - 1, 2, 2));
        tables[i] = stability_pair(Profile::gaussian(d.ua, d.uw, d.uc).sample(g),
                                   Profile::gaussian(d.ra, d.rw, d.rc).sample(g), pert, eps, Params{},
                                   control(1.0, 0.01, 0.05), s);
    });

    double c_hat = 0.0;
    for (const auto& series : tables[0].series) {
        c_hat = std::max(c_hat, fit_growth_constant(series));
    }
    SuiteTable table{"pairs", {"set", "role", "eps", "sup_du", "sup_drho", "sup_du_over_eps", "fitted_c", "excess"}, {}};
    double worst_linearity = 0.0;
    double worst_excess = -kInfinity;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        double lo = kInfinity;
        double hi = 0.0;
        for (std::size_t k = 0; k < eps.size(); ++k) {
            const StabilityRow& row = tables[i].rows[k];
            const StabilitySeries& series = tables[i].series[k];
            const double ratio = row.sup_du / row.eps;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            const double excess = growth_bound_excess(series, c_hat);
            if (i > 0) {
                worst_excess = std::max(worst_excess, excess);
            }
            table.rows.push_back({std::to_string(i), i == 0 ? "train" : "held_out", num(row.eps), num(row.sup_du),
                                  num(row.sup_drho), num(ratio), num(fit_growth_constant(series)), num(excess)});
        }
        worst_linearity = std::max(worst_linearity, hi / lo - 1.0);
    }
    rep.tables = {table};
    rep.checks.push_back({"difference linear in eps", worst_linearity <= 0.2, worst_linearity, 0.2,
                          "max spread of sup_du/eps over eps, all sets"});
    rep.checks.push_back({"fitted constant validates on held-out data", worst_excess <= 1e-9, worst_excess, 1e-9,
                          "C_hat=" + num(c_hat) + " fitted on set 0"});
    return rep;
}

std::vector<StandardWeight> battery() {
    return {
        {0, 0, 1, 0},
        {0, 0, 2, 0},
        {0, 0, 3, 0},
        {0.25, 1, 0, 0, WeightSide::right_only},
        {0.5, 1, 0, 0, WeightSide::right_only},
        {0.9, 1, 0, 0, WeightSide::right_only},
    };
}

Trajectory adaptive_run(const State& s, const StepControl& ctrl, const char* what) {
    try {
        return integrate(s, Params{}, ctrl);
    } catch (const BlowUpError& e) {
        throw OrchestrationError(std::string(what) + " run failed: " + e.what());
    }
}

SuiteReport persistence(int workers) {
    SuiteReport rep;
    const double l_base = 20.0;
    const StepControl ctrl = control(1.0, 0.01, 0.05);
    std::vector<Trajectory> runs(3);
    parallel_for(runs.size(), workers, [&](std::size_t i) {
        if (i == 0) {
            runs[0] = adaptive_run(gaussian_state(Grid(l_base, 512), 0.5), ctrl, "base");
        } else if (i == 1) {
            runs[1] = adaptive_run(gaussian_state(Grid(2 * l_base, 1024), 0.5), ctrl, "doubled-domain");
        } else {
            runs[2] = adaptive_run(gaussian_state(Grid(40.0, 2048), 0.8), ctrl, "decay");
        }
    });

    const std::vector<double> exponents{1.0, 2.0, kInfinity};
    const auto weights = battery();
    struct Entry {
        PersistenceReport base;
        double discrepancy;
    };
    std::vector<Entry> entries(weights.size() * exponents.size());
    parallel_for(entries.size(), workers, [&](std::size_t i) {
        const StandardWeight& w = weights[i / exponents.size()];
        const double p = exponents[i % exponents.size()];
        PersistenceReport base = persistence_monitor(runs[0], w, p, l_base);
        const double disc = relative_discrepancy(base, persistence_monitor(runs[1], w, p, l_base));
        entries[i] = {std::move(base), disc};
    });

    SuiteTable table{"battery",
                     {"weight", "p", "admissible", "c_hat", "intercept", "max_residual", "l_discrepancy", "finite"},
                     {}};
    double worst_residual = 0.0;
    double worst_disc = 0.0;
    bool finite = true;
    for (const auto& e : entries) {
        worst_residual = std::max(worst_residual, e.base.max_residual);
        worst_disc = std::max(worst_disc, e.discrepancy);
        finite = finite && e.base.finite;
        table.rows.push_back({e.base.weight.describe(), num(e.base.p),
                              admissibility_check(e.base.weight, runs[0].grid()).admissible ? "true" : "false",
                              num(e.base.c_hat), num(e.base.intercept), num(e.base.max_residual), num(e.discrepancy),
                              e.base.finite ? "true" : "false"});
    }
    rep.checks.push_back({"affine log-growth fit residual", finite && worst_residual < 0.05, worst_residual, 0.05,
                          "weight battery, p in {1, 2, inf}"});
    rep.checks.push_back({"L-doubling stability", worst_disc < 0.01, worst_disc, 0.01,
                          "L=" + num(l_base) + " against L=" + num(2 * l_base) + " on |x| <= " + num(l_base)});

    // phi_{1,1,0,0} only satisfies the integrability condition for p = infinity.
    const StandardWeight critical{1, 1, 0, 0};
    const PersistenceReport sup = persistence_monitor(runs[0], critical, kInfinity);
    const PersistenceReport half = persistence_monitor(runs[0], critical.sqrt(), 2.0);
    double largest = 0.0;
    for (const auto* r : {&sup, &half}) {
        for (double v : r->w) {
            largest = std::max(largest, v);
        }
    }
    rep.checks.push_back({"exponential-weight quantities finite", sup.finite && half.finite, largest, kInfinity,
                          "W_inf with e^{|x|} and the L^2 norm with e^{|x|/2}"});

    const Trajectory& wide = runs[2];
    const DecayWindow window = default_decay_window(wide.grid());
    SuiteTable decay{"decay", {"t", "a_hat", "c_hat", "window", "residual", "exp_bound"}, {}};
    double min_rate = kInfinity;
    std::size_t resolved = 0;
    for (const auto& s : wide.snapshots) {
        RealField f = derivative(s.u, 1);
        for (std::size_t j = 0; j < f.size(); ++j) {
            f[j] = std::abs(s.u[j]) + std::abs(f[j]) + std::abs(s.rho[j]);
        }
        const DecayFit fit = decay_profile(f, window);
        if (fit.resolved) {
            ++resolved;
            min_rate = std::min(min_rate, fit.exp_rate);
        }
        const double nan = std::nan("");
        decay.rows.push_back({num(s.t), num(fit.resolved ? fit.exp_rate : nan), num(fit.resolved ? fit.alg_rate : nan),
                              num(window.lo) + ":" + num(window.hi), num(fit.resolved ? fit.exp_residual : nan),
                              num(exp_bound_constant(f, 0.7 * wide.grid().half_length()))});
    }
    rep.checks.push_back({"exponential tail rate", resolved > 0 && min_rate >= 0.9, min_rate, 0.9,
                          std::to_string(resolved) + " of " + std::to_string(wide.snapshots.size()) +
                              " snapshots resolved above the noise floor at L=40"});
    rep.tables = {table, decay};
    return rep;
}

SuiteReport friedrichs(int workers) {
    (void)workers;
    SuiteReport rep;
    const Grid g(20.0, 256);
    const StepControl ctrl = control(0.1, 0.005, 0.0);
    const double s = 3.0;
    const int k_max = 6;
    const State init = gaussian_state(g);
    const auto iters = friedrichs_iterate(init.u, init.rho, Params{}, k_max, ctrl);
    const State direct = integrate_fixed(init, Params{}, ctrl.dt_max, ctrl.t_final, 0.0).final();
    SuiteTable table{"iterates", {"k", "error", "ratio"}, {}};
    double worst = 0.0;
    double prev = 0.0;
    for (int k = 0; k <= k_max; ++k) {
        const double e = besov_norm(iters[static_cast<std::size_t>(k)].final().u - direct.u, BesovIndex(s - 1, 2, 2));
        double ratio = std::nan("");
        if (k >= 1) {
            ratio = e / prev;
        }
        if (k >= 2) {
            worst = std::max(worst, ratio);
        }
        table.rows.push_back({std::to_string(k), num(e), num(ratio)});
        prev = e;
    }
    rep.tables = {table};
    rep.checks.push_back({"contraction ratio for k=2..6", worst < 0.8, worst, 0.8, "B^{s-1}_{2,2} error, s=3, T=0.1"});
    return rep;
}

SuiteReport support(int workers) {
    (void)workers;
    SuiteReport rep;
    const Grid g(10.0, 2048);
    const double w = 3.0;
    const RealField m0 = Profile::bump(1.0, w, -1.0).sample(g);
    const State init(0.0, invert_inertia(m0, 1.0), Profile::bump(1.0, w, 1.0).sample(g));
    const Trajectory traj = adaptive_run(init, control(1.0, 0.01, 0.05), "support");
    InitialSupports initial;
    initial.rho = SupportInterval{1.0 - w, 1.0 + w, 0.0};
    initial.m = SupportInterval{-1.0 - w, -1.0 + w, 0.0};
    const SupportReport sr = check_support_containment(traj, 1e-10, initial);
    SuiteTable table{"containment",
                     {"t", "rho_beta", "rho_gamma", "rho_left", "rho_right", "m_beta", "m_gamma", "m_left", "m_right",
                      "contained"},
                     {}};
    double overshoot = 0.0;
    const double nan = std::nan("");
    for (const auto& row : sr.rows) {
        const auto& rs = row.rho_support;
        const auto& ms = row.m_support;
        if (rs) {
            overshoot = std::max({overshoot, row.rho_left - rs->beta, rs->gamma - row.rho_right});
        }
        if (ms) {
            overshoot = std::max({overshoot, row.m_left - ms->beta, ms->gamma - row.m_right});
        }
        table.rows.push_back({num(row.t), num(rs ? rs->beta : nan), num(rs ? rs->gamma : nan), num(row.rho_left),
                              num(row.rho_right), num(ms ? ms->beta : nan), num(ms ? ms->gamma : nan),
                              num(row.m_left), num(row.m_right),
                              row.rho_contained && row.m_contained ? "true" : "false"});
    }
    rep.tables = {table};
    rep.checks.push_back({"supports of rho and m contained", sr.all_contained(), overshoot, 0.0,
                          "bump data, threshold 1e-10, every snapshot to t=1"});
    return rep;
}

} // namespace

std::string SuiteTable::csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out += (i ? "," : "") + columns[i];
    }
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += (i ? "," : "") + row[i];
        }
        out += "\n";
    }
    return out;
}

bool SuiteReport::passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.pass; });
}

const SuiteCheck& SuiteReport::check(const std::string& check_name) const {
    for (const auto& c : checks) {
        if (c.name == check_name) {
            return c;
        }
    }
    throw std::out_of_range("suite " + name + " has no check '" + check_name + "'");
}

nlohmann::json SuiteReport::to_json() const {
    const auto number = [](double v) {
        return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_number(v));
    };
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["code_version"] = code_version();
    j["suite"] = name;
    j["passed"] = passed();
    j["wall_time_s"] = wall_time;
    auto& cs = j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        cs.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"measured", number(c.measured)},
                      {"tolerance", number(c.tolerance)},
                      {"detail", c.detail}});
    }
    auto& ts = j["tables"] = nlohmann::json::array();
    for (const auto& t : tables) {
        ts.push_back({{"name", t.name}, {"file", "suite_" + name + "_" + t.name + ".csv"}, {"columns", t.columns}});
    }
    return j;
}

std::vector<std::string> suite_names() { return {"convergence", "stability", "persistence", "friedrichs", "support"}; }

SuiteReport run_suite(const std::string& name, int workers) {
    static const std::map<std::string, SuiteReport (*)(int)> suites{
        {"convergence", convergence}, {"stability", stability}, {"persistence", persistence},
        {"friedrichs", friedrichs},   {"support", support},
    };
    const auto it = suites.find(name);
    if (it == suites.end()) {
        throw ConfigError("unknown suite '" + name +
                          "' (expected convergence, stability, persistence, friedrichs or support)");
    }
    const auto start = std::chrono::steady_clock::now();
    SuiteReport rep = it->second(effective_workers(workers));
    rep.name = name;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

std::vector<std::filesystem::path> write_suite(const SuiteReport& report, const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> written;
    for (const auto& t : report.tables) {
        const auto path = dir / ("suite_" + report.name + "_" + t.name + ".csv");
        atomic_write(path, t.csv());
        written.push_back(path);
    }
    const auto manifest = dir / ("suite_" + report.name + ".json");
    atomic_write(manifest, report.to_json().dump(2) + "\n");
    written.push_back(manifest);
    return written;
}

} // namespace chsim
