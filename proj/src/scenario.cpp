#include "chsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace chsim {

namespace {

const std::vector<std::pair<Diagnostic, std::string>>& diagnostic_names() {
    static const std::vector<std::pair<Diagnostic, std::string>> names{
        {Diagnostic::formulation, "formulation"},   {Diagnostic::casimir, "casimir"},
        {Diagnostic::transport, "transport"},       {Diagnostic::representation, "representation"},
        {Diagnostic::m_flow, "m_flow"},             {Diagnostic::sup_bound, "sup_bound"},
        {Diagnostic::support, "support"},           {Diagnostic::persistence, "persistence"},
        {Diagnostic::decay, "decay"},
    };
    return names;
}

std::string fmt(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

double parse_double(const std::string& raw) {
    const std::string s = boost::algorithm::trim_copy(raw);
    if (s == "inf" || s == "infinity") {
        return kInfinity;
    }
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
        throw ConfigError("'" + s + "' is not a number");
    }
    return v;
}

long parse_integer(const std::string& raw) {
    const std::string s = boost::algorithm::trim_copy(raw);
    long v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
        throw ConfigError("'" + s + "' is not an integer");
    }
    return v;
}

bool parse_bool(const std::string& raw) {
    const std::string s = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(raw));
    if (s == "true" || s == "yes" || s == "on" || s == "1") {
        return true;
    }
    if (s == "false" || s == "no" || s == "off" || s == "0") {
        return false;
    }
    throw ConfigError("'" + raw + "' is not a boolean");
}

std::vector<std::string> split(const std::string& s, const char* sep) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, s, boost::algorithm::is_any_of(sep));
    std::vector<std::string> out;
    for (auto& p : parts) {
        boost::algorithm::trim(p);
        if (!p.empty()) {
            out.push_back(p);
        }
    }
    return out;
}

StandardWeight parse_weight(const std::string& s) {
    const auto parts = split(s, " \t,");
    if (parts.size() != 4 && parts.size() != 5) {
        throw ConfigError("weight '" + s + "' needs 'a b c d [both|right_only]'");
    }
    StandardWeight w{parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2]), parse_double(parts[3])};
    if (parts.size() == 5) {
        w.side = weight_side_from_string(parts[4]);
    }
    return w;
}

std::string weight_text(const StandardWeight& w) {
    return fmt(w.a) + " " + fmt(w.b) + " " + fmt(w.c) + " " + fmt(w.d) + " " + to_string(w.side);
}

using Setter = std::function<void(Scenario&, const std::string&)>;
using SectionTable = std::map<std::string, Setter>;

SectionTable profile_keys(const std::function<Profile&(Scenario&)>& get) {
    return {
        {"profile", [get](Scenario& s, const std::string& v) { get(s).kind = profile_kind_from_string(v); }},
        {"amp", [get](Scenario& s, const std::string& v) { get(s).amp = parse_double(v); }},
        {"width", [get](Scenario& s, const std::string& v) { get(s).width = parse_double(v); }},
        {"center", [get](Scenario& s, const std::string& v) { get(s).center = parse_double(v); }},
        {"k", [get](Scenario& s, const std::string& v) { get(s).k = parse_integer(v); }},
        {"offset", [get](Scenario& s, const std::string& v) { get(s).offset = parse_double(v); }},
    };
}

const std::map<std::string, SectionTable>& schema() {
    static const std::map<std::string, SectionTable> table = [] {
        std::map<std::string, SectionTable> t;
        t["scenario"] = {
            {"name", [](Scenario& s, const std::string& v) { s.name = v; }},
            {"preset", [](Scenario&, const std::string&) {}},
        };
        t["model"] = {
            {"b", [](Scenario& s, const std::string& v) { s.params.b = parse_double(v); }},
            {"kappa", [](Scenario& s, const std::string& v) { s.params.kappa = parse_double(v); }},
            {"alpha", [](Scenario& s, const std::string& v) { s.params.alpha = parse_double(v); }},
            {"r", [](Scenario& s, const std::string& v) { s.params.r = parse_double(v); }},
            {"inertia_range",
             [](Scenario& s, const std::string& v) {
                 if (v == "standard") {
                     s.params.inertia_range = InertiaRange::standard;
                 } else if (v == "exploratory") {
                     s.params.inertia_range = InertiaRange::exploratory;
                 } else {
                     throw ConfigError("'" + v + "' is not standard or exploratory");
                 }
             }},
        };
        t["alpha"] = profile_keys([](Scenario& s) -> Profile& {
            if (!s.alpha_profile) {
                s.alpha_profile = Profile{};
            }
            return *s.alpha_profile;
        });
        t["grid"] = {
            {"L", [](Scenario& s, const std::string& v) { s.half_length = parse_double(v); }},
            {"n",
             [](Scenario& s, const std::string& v) {
                 const long n = parse_integer(v);
                 if (n <= 0) {
                     throw ConfigError("must be positive");
                 }
                 s.n = static_cast<std::size_t>(n);
             }},
        };
        t["time"] = {
            {"t_final", [](Scenario& s, const std::string& v) { s.ctrl.t_final = parse_double(v); }},
            {"cfl", [](Scenario& s, const std::string& v) { s.ctrl.cfl = parse_double(v); }},
            {"dt_max", [](Scenario& s, const std::string& v) { s.ctrl.dt_max = parse_double(v); }},
            {"output_dt", [](Scenario& s, const std::string& v) { s.ctrl.output_dt = parse_double(v); }},
            {"dealias", [](Scenario& s, const std::string& v) { s.ctrl.dealias = parse_bool(v); }},
            {"blowup_ceiling", [](Scenario& s, const std::string& v) { s.ctrl.blowup_ceiling = parse_double(v); }},
            {"formulation", [](Scenario& s, const std::string& v) { s.formulation = formulation_from_string(v); }},
        };
        t["u0"] = profile_keys([](Scenario& s) -> Profile& { return s.u0.profile; });
        t["u0"]["target"] = [](Scenario& s, const std::string& v) {
            if (v == "velocity") {
                s.u0.target = ProfileTarget::velocity;
            } else if (v == "momentum") {
                s.u0.target = ProfileTarget::momentum;
            } else {
                throw ConfigError("'" + v + "' is not velocity or momentum");
            }
        };
        t["rho0"] = profile_keys([](Scenario& s) -> Profile& { return s.rho0.profile; });
        t["diagnostics"] = {
            {"enabled",
             [](Scenario& s, const std::string& v) {
                 const std::string lower = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(v));
                 s.diagnostics.clear();
                 if (lower == "all") {
                     s.diagnostics = all_diagnostics();
                     return;
                 }
                 if (lower == "none") {
                     return;
                 }
                 for (const auto& name : split(v, ", \t")) {
                     const Diagnostic d = diagnostic_from_string(name);
                     if (std::find(s.diagnostics.begin(), s.diagnostics.end(), d) == s.diagnostics.end()) {
                         s.diagnostics.push_back(d);
                     }
                 }
             }},
            {"support_eps", [](Scenario& s, const std::string& v) { s.support_eps = parse_double(v); }},
        };
        t["persistence"] = {
            {"weights",
             [](Scenario& s, const std::string& v) {
                 s.persistence.weights.clear();
                 for (const auto& item : split(v, ";")) {
                     s.persistence.weights.push_back(parse_weight(item));
                 }
             }},
            {"exponents",
             [](Scenario& s, const std::string& v) {
                 s.persistence.exponents.clear();
                 for (const auto& item : split(v, ", \t")) {
                     s.persistence.exponents.push_back(parse_double(item));
                 }
             }},
            {"l_doubling", [](Scenario& s, const std::string& v) { s.persistence.l_doubling = parse_bool(v); }},
            {"residual_tol", [](Scenario& s, const std::string& v) { s.persistence.residual_tol = parse_double(v); }},
            {"l_tol", [](Scenario& s, const std::string& v) { s.persistence.l_tol = parse_double(v); }},
        };
        t["decay"] = {
            {"window_lo",
             [](Scenario& s, const std::string& v) {
                 DecayWindow w = s.decay.window.value_or(DecayWindow{0.0, 0.0});
                 w.lo = parse_double(v);
                 s.decay.window = w;
             }},
            {"window_hi",
             [](Scenario& s, const std::string& v) {
                 DecayWindow w = s.decay.window.value_or(DecayWindow{0.0, 0.0});
                 w.hi = parse_double(v);
                 s.decay.window = w;
             }},
            {"min_rate", [](Scenario& s, const std::string& v) { s.decay.min_rate = parse_double(v); }},
        };
        t["run"] = {
            {"workers",
             [](Scenario& s, const std::string& v) { s.workers = static_cast<int>(parse_integer(v)); }},
        };
        return t;
    }();
    return table;
}

std::vector<StandardWeight> default_battery() {
    return {
        {0, 0, 1, 0},
        {0, 0, 2, 0},
        {0, 0, 3, 0},
        {0.25, 1, 0, 0, WeightSide::right_only},
        {0.5, 1, 0, 0, WeightSide::right_only},
        {0.9, 1, 0, 0, WeightSide::right_only},
    };
}

Scenario base_scenario() {
    Scenario s;
    s.ctrl.t_final = 1.0;
    s.ctrl.dt_max = 0.01;
    s.ctrl.output_dt = 0.05;
    s.persistence.weights = default_battery();
    return s;
}

void validate_profile(const std::string& where, const Profile& p, std::vector<std::string>& errors) {
    if ((p.kind == Profile::Kind::gaussian || p.kind == Profile::Kind::bump) && !(p.width > 0.0)) {
        errors.push_back(where + ".width must be positive");
    }
    if (p.kind == Profile::Kind::mode && p.k < 1) {
        errors.push_back(where + ".k must be at least 1");
    }
    for (double v : {p.amp, p.width, p.center, p.offset}) {
        if (!std::isfinite(v)) {
            errors.push_back(where + " has a non-finite parameter");
            break;
        }
    }
}

void echo_profile(std::map<std::string, std::string>& out, const std::string& sec, const Profile& p) {
    out[sec + ".profile"] = to_string(p.kind);
    out[sec + ".amp"] = fmt(p.amp);
    out[sec + ".width"] = fmt(p.width);
    out[sec + ".center"] = fmt(p.center);
    out[sec + ".k"] = std::to_string(p.k);
    out[sec + ".offset"] = fmt(p.offset);
}

} // namespace

std::string to_string(Diagnostic d) {
    for (const auto& [k, name] : diagnostic_names()) {
        if (k == d) {
            return name;
        }
    }
    return "unknown";
}

Diagnostic diagnostic_from_string(const std::string& s) {
    for (const auto& [k, name] : diagnostic_names()) {
        if (name == s) {
            return k;
        }
    }
    throw ConfigError("unknown diagnostic '" + s + "'");
}

const std::vector<Diagnostic>& all_diagnostics() {
    static const std::vector<Diagnostic> all = [] {
        std::vector<Diagnostic> v;
        for (const auto& [k, name] : diagnostic_names()) {
            v.push_back(k);
        }
        return v;
    }();
    return all;
}

Grid Scenario::grid() const { return Grid(half_length, n); }

Params Scenario::resolved_params() const {
    Params p = params;
    if (alpha_profile) {
        p.alpha = alpha_profile->sample(grid());
    }
    return p;
}

State Scenario::initial_state() const {
    const Grid g = grid();
    RealField u = u0.profile.sample(g);
    if (u0.target == ProfileTarget::momentum) {
        u = invert_inertia(u, params.r, params.inertia_range);
    }
    return State(0.0, std::move(u), rho0.profile.sample(g));
}

InitialSupports Scenario::analytic_supports() const {
    const auto vanishes = [](const Profile& p) {
        return p.offset == 0.0 && (p.kind == Profile::Kind::zero || p.amp == 0.0);
    };
    const auto exact = [](const Profile& p) -> std::optional<SupportInterval> {
        if (p.kind == Profile::Kind::bump && p.offset == 0.0 && p.amp != 0.0) {
            return SupportInterval{p.center - p.width, p.center + p.width, 0.0};
        }
        return std::nullopt;
    };
    InitialSupports out;
    out.rho = exact(rho0.profile);
    // A velocity bump has momentum on the same interval only when A is a local operator.
    if (u0.target == ProfileTarget::momentum || params.r == 1.0) {
        out.m = exact(u0.profile);
    }
    const bool rho_known = out.rho || vanishes(rho0.profile);
    const bool m_known = out.m || vanishes(u0.profile);
    // Mixing exact and thresholded endpoints is not meaningful.
    if (!rho_known || !m_known) {
        return {};
    }
    return out;
}

void Scenario::validate() const {
    std::vector<std::string> errors;
    if (!(half_length > 0.0) || !std::isfinite(half_length)) {
        errors.push_back("grid.L must be positive and finite");
    }
    if (n < 16 || (n & (n - 1)) != 0) {
        errors.push_back("grid.n=" + std::to_string(n) + " must be a power of two and at least 16");
    }
    try {
        ctrl.validate();
    } catch (const ConfigError& e) {
        errors.push_back(std::string("time: ") + e.what());
    }
    if (!std::isfinite(params.b)) {
        errors.push_back("model.b must be finite");
    }
    if (!std::isfinite(params.kappa)) {
        errors.push_back("model.kappa must be finite");
    }
    if (params.alpha_is_constant() && !std::isfinite(std::get<double>(params.alpha))) {
        errors.push_back("model.alpha must be finite");
    }
    if (params.inertia_range == InertiaRange::standard && !(params.r >= 1.0)) {
        errors.push_back("model.r must be at least 1 (set inertia_range = exploratory for r > 0)");
    } else if (!(params.r > 0.0) || !std::isfinite(params.r)) {
        errors.push_back("model.r must be positive and finite");
    }
    if (formulation == Formulation::nonlocal && (params.r != 1.0 || alpha_profile)) {
        errors.push_back("time.formulation = nonlocal needs r = 1 and a constant alpha");
    }
    validate_profile("u0", u0.profile, errors);
    validate_profile("rho0", rho0.profile, errors);
    if (alpha_profile) {
        validate_profile("alpha", *alpha_profile, errors);
    }
    const auto enabled = [this](Diagnostic d) {
        return std::find(diagnostics.begin(), diagnostics.end(), d) != diagnostics.end();
    };
    if (enabled(Diagnostic::casimir) && params.b == 1.0) {
        errors.push_back("diagnostics: casimir is undefined for b = 1");
    }
    if (!(support_eps > 0.0 && support_eps < 1.0)) {
        errors.push_back("diagnostics.support_eps must lie in (0, 1)");
    }
    if (enabled(Diagnostic::persistence)) {
        if (persistence.weights.empty()) {
            errors.push_back("persistence.weights is empty");
        }
        for (double p : persistence.exponents) {
            if (!(p >= 1.0)) {
                errors.push_back("persistence.exponents entry " + fmt(p) + " is below 1");
            }
        }
        if (persistence.exponents.empty()) {
            errors.push_back("persistence.exponents is empty");
        }
        if (!(persistence.residual_tol > 0.0) || !(persistence.l_tol > 0.0)) {
            errors.push_back("persistence tolerances must be positive");
        }
    }
    if (decay.window) {
        const DecayWindow& w = *decay.window;
        if (!(w.lo >= 0.0 && w.lo < w.hi && w.hi <= 0.75 * half_length)) {
            errors.push_back("decay window [" + fmt(w.lo) + ", " + fmt(w.hi) + "] must satisfy 0 <= lo < hi <= 0.75 L");
        }
    }
    if (workers < 1) {
        errors.push_back("run.workers must be at least 1");
    }
    if (!errors.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& e : errors) {
            msg += "\n  " + e;
        }
        throw ConfigError(msg);
    }
}

std::map<std::string, std::string> Scenario::echo() const {
    std::map<std::string, std::string> out;
    out["scenario.name"] = name;
    out["scenario.preset"] = preset;
    out["model.b"] = fmt(params.b);
    out["model.kappa"] = fmt(params.kappa);
    out["model.alpha"] = params.alpha_is_constant() ? fmt(std::get<double>(params.alpha)) : "field";
    out["model.r"] = fmt(params.r);
    out["model.inertia_range"] = params.inertia_range == InertiaRange::standard ? "standard" : "exploratory";
    if (alpha_profile) {
        echo_profile(out, "alpha", *alpha_profile);
    }
    out["grid.L"] = fmt(half_length);
    out["grid.n"] = std::to_string(n);
    out["time.t_final"] = fmt(ctrl.t_final);
    out["time.cfl"] = fmt(ctrl.cfl);
    out["time.dt_max"] = fmt(ctrl.dt_max);
    out["time.output_dt"] = fmt(ctrl.output_dt);
    out["time.dealias"] = ctrl.dealias ? "true" : "false";
    out["time.blowup_ceiling"] = fmt(ctrl.blowup_ceiling);
    out["time.formulation"] = to_string(formulation);
    echo_profile(out, "u0", u0.profile);
    out["u0.target"] = u0.target == ProfileTarget::velocity ? "velocity" : "momentum";
    echo_profile(out, "rho0", rho0.profile);
    std::string diags;
    for (Diagnostic d : diagnostics) {
        diags += (diags.empty() ? "" : ", ") + to_string(d);
    }
    out["diagnostics.enabled"] = diags.empty() ? "none" : diags;
    out["diagnostics.support_eps"] = fmt(support_eps);
    std::string ws;
    for (const auto& w : persistence.weights) {
        ws += (ws.empty() ? "" : "; ") + weight_text(w);
    }
    out["persistence.weights"] = ws;
    std::string ps;
    for (double p : persistence.exponents) {
        ps += (ps.empty() ? "" : ", ") + fmt(p);
    }
    out["persistence.exponents"] = ps;
    out["persistence.l_doubling"] = persistence.l_doubling ? "true" : "false";
    out["persistence.residual_tol"] = fmt(persistence.residual_tol);
    out["persistence.l_tol"] = fmt(persistence.l_tol);
    if (decay.window) {
        out["decay.window_lo"] = fmt(decay.window->lo);
        out["decay.window_hi"] = fmt(decay.window->hi);
    }
    out["decay.min_rate"] = fmt(decay.min_rate);
    out["run.workers"] = std::to_string(workers);
    return out;
}

std::vector<std::string> preset_names() { return {"zero", "2cch", "2cdp", "chb", "hkmetric", "highorder"}; }

Scenario preset(const std::string& name) {
    Scenario s = base_scenario();
    s.name = name;
    s.preset = name;
    const auto gaussian_data = [&s](double ua) {
        s.u0.profile = Profile::gaussian(ua, 1.5);
        s.rho0.profile = Profile::gaussian(0.5, 2.0, 1.0);
    };
    if (name == "zero") {
        s.n = 256;
        s.ctrl.output_dt = 0.1;
        s.diagnostics = all_diagnostics();
    } else if (name == "2cch") {
        gaussian_data(0.5);
        s.diagnostics = all_diagnostics();
    } else if (name == "2cdp") {
        s.params.b = 3.0;
        s.n = 1024;
        gaussian_data(0.8);
        // A positive background keeps |rho|^{1/2} away from the roundoff floor.
        s.rho0.profile.offset = 0.2;
        s.ctrl.output_dt = 0.01;
        s.diagnostics = {Diagnostic::formulation, Diagnostic::casimir, Diagnostic::transport,
                         Diagnostic::representation, Diagnostic::m_flow, Diagnostic::sup_bound};
    } else if (name == "chb") {
        s.params.b = 2.5;
        s.half_length = 10.0;
        s.n = 2048;
        s.u0 = {Profile::bump(1.0, 3.0), ProfileTarget::momentum};
        s.diagnostics = {Diagnostic::formulation, Diagnostic::casimir, Diagnostic::transport,
                         Diagnostic::m_flow,      Diagnostic::sup_bound, Diagnostic::support};
    } else if (name == "hkmetric") {
        s.params.r = 2.0;
        s.half_length = 10.0;
        s.n = 1024;
        // Recovering m = A^2 u amplifies roundoff by about xi_max^4.
        s.support_eps = 1e-5;
        s.u0 = {Profile::bump(1.0, 3.0), ProfileTarget::momentum};
        s.diagnostics = {Diagnostic::formulation, Diagnostic::casimir, Diagnostic::transport, Diagnostic::m_flow,
                         Diagnostic::support};
    } else if (name == "highorder") {
        s.params.r = 2.0;
        gaussian_data(0.5);
        s.diagnostics = {Diagnostic::formulation, Diagnostic::casimir, Diagnostic::transport,
                         Diagnostic::representation, Diagnostic::m_flow, Diagnostic::sup_bound};
    } else {
        std::string known;
        for (const auto& p : preset_names()) {
            known += " " + p;
        }
        throw ConfigError("unknown preset '" + name + "' (known:" + known + ")");
    }
    return s;
}

namespace {

void apply_overrides(Scenario& s, const Overrides& o, std::vector<std::string>& errors) {
    if (o.n) {
        s.n = *o.n;
    }
    if (o.half_length) {
        s.half_length = *o.half_length;
    }
    if (o.t_final) {
        s.ctrl.t_final = *o.t_final;
    }
    if (o.cfl) {
        s.ctrl.cfl = *o.cfl;
    }
    if (o.formulation) {
        try {
            s.formulation = formulation_from_string(*o.formulation);
        } catch (const ConfigError& e) {
            errors.push_back(std::string("--formulation: ") + e.what());
        }
    }
    if (o.workers) {
        s.workers = *o.workers;
    }
}

void finish(Scenario& s, const Overrides& o, std::vector<std::string>& errors) {
    apply_overrides(s, o, errors);
    try {
        s.validate();
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        const std::string head = "invalid scenario:\n  ";
        if (msg.rfind(head, 0) == 0) {
            msg = msg.substr(head.size());
        }
        boost::algorithm::replace_all(msg, "\n  ", "\n");
        for (const auto& line : split(msg, "\n")) {
            errors.push_back(line);
        }
    }
    if (!errors.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& e : errors) {
            msg += "\n  " + e;
        }
        throw ConfigError(msg);
    }
}

} // namespace

Scenario parse_scenario(const std::string& text, const Overrides& overrides) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("malformed config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    std::vector<std::string> errors;
    for (const auto& [key, value] : tree) {
        if (value.empty()) {
            errors.push_back("key '" + key + "' must live inside a [section]");
        }
    }
    std::string preset_name = overrides.preset.value_or(tree.get<std::string>("scenario.preset", ""));
    Scenario s;
    if (preset_name.empty()) {
        s = base_scenario();
    } else {
        try {
            s = preset(preset_name);
        } catch (const ConfigError& e) {
            errors.push_back(e.what());
            s = base_scenario();
        }
    }
    const auto& table = schema();
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            continue;
        }
        const auto sec = table.find(section);
        if (sec == table.end()) {
            errors.push_back("unknown section [" + section + "]");
            continue;
        }
        for (const auto& [key, node] : body) {
            const auto setter = sec->second.find(key);
            if (setter == sec->second.end()) {
                errors.push_back("unknown key " + section + "." + key);
                continue;
            }
            try {
                setter->second(s, node.data());
            } catch (const ConfigError& e) {
                errors.push_back(section + "." + key + ": " + e.what());
            }
        }
    }
    finish(s, overrides, errors);
    return s;
}

Scenario load_scenario(const std::string& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), overrides);
}

Scenario scenario_from_overrides(const Overrides& overrides) {
    if (!overrides.preset) {
        throw ConfigError("either --config or --preset is required");
    }
    std::vector<std::string> errors;
    Scenario s = preset(*overrides.preset);
    finish(s, overrides, errors);
    return s;
}

int effective_workers(int configured) {
    if (const char* env = std::getenv("CHSIM_WORKERS")) {
        int v = 0;
        const std::string s = env;
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || end != s.data() + s.size() || v < 1) {
            throw ConfigError("CHSIM_WORKERS='" + s + "' must be a positive integer");
        }
        return v;
    }
    return std::max(configured, 1);
}

} // namespace chsim
