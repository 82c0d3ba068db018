#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chsim/characteristics.hpp"
#include "chsim/dynamics.hpp"
#include "chsim/profiles.hpp"
#include "chsim/weights.hpp"

namespace chsim {

enum class Diagnostic { formulation, casimir, transport, representation, m_flow, sup_bound, support, persistence, decay };

std::string to_string(Diagnostic d);
Diagnostic diagnostic_from_string(const std::string& s);
const std::vector<Diagnostic>& all_diagnostics();

/// Which variable an initial profile prescribes. For momentum, u0 = (1 - d_xx)^{-r} m0.
enum class ProfileTarget { velocity, momentum };

struct InitialProfile {
    Profile profile;
    ProfileTarget target = ProfileTarget::velocity;
};

struct PersistenceSpec {
    std::vector<StandardWeight> weights;
    std::vector<double> exponents{1.0, 2.0, kInfinity};
    /// Rerun at (2L, 2n) and compare on |x| <= L.
    bool l_doubling = true;
    double residual_tol = 0.05;
    double l_tol = 0.01;
};

struct DecaySpec {
    /// Empty means the default window for the grid.
    std::optional<DecayWindow> window;
    double min_rate = 0.9;
};

struct Scenario {
    std::string name = "scenario";
    std::string preset;
    Params params;
    /// Constant alpha unless this is set, in which case alpha is the sampled profile.
    std::optional<Profile> alpha_profile;
    double half_length = 20.0;
    std::size_t n = 512;
    StepControl ctrl;
    Formulation formulation = Formulation::m_form;
    InitialProfile u0;
    InitialProfile rho0;
    std::vector<Diagnostic> diagnostics;
    double support_eps = 1e-10;
    PersistenceSpec persistence;
    DecaySpec decay;
    int workers = 1;

    Grid grid() const;
    Params resolved_params() const;
    State initial_state() const;
    /// Exact supports when the data are unshifted bumps; empty otherwise.
    InitialSupports analytic_supports() const;
    /// Every offending field in one message; throws ConfigError.
    void validate() const;
    /// Canonical key = value listing, sorted by section and key.
    std::map<std::string, std::string> echo() const;
};

std::vector<std::string> preset_names();
Scenario preset(const std::string& name);

/// Command-line overrides applied after the file.
struct Overrides {
    std::optional<std::string> preset;
    std::optional<std::size_t> n;
    std::optional<double> half_length;
    std::optional<double> t_final;
    std::optional<double> cfl;
    std::optional<std::string> formulation;
    std::optional<int> workers;
};

/// Parses INI text. A [scenario] preset key selects the base; file values
/// override it and overrides win last. Unknown sections or keys and invalid
/// values are all reported together.
Scenario parse_scenario(const std::string& text, const Overrides& overrides = {});
Scenario load_scenario(const std::string& path, const Overrides& overrides = {});
Scenario scenario_from_overrides(const Overrides& overrides);

/// Worker count after the CHSIM_WORKERS environment override.
int effective_workers(int configured);

} // namespace chsim
