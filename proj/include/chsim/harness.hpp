#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "chsim/scenario.hpp"

namespace chsim {

inline constexpr const char* kSchemaVersion = "1.0";
const char* code_version();

/// A suite member could not produce its reference data.
class OrchestrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Writes through a temporary file in the same directory and renames it into place.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

/// Runs fn(0..count-1) on up to `workers` threads. The first exception is rethrown
/// after every started task finishes.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

/// Shortest text that round-trips the double; nan and inf spelled out.
std::string format_number(double v);

enum class DiagnosticStatus { pass, fail, skipped, error };
std::string to_string(DiagnosticStatus s);

struct DiagnosticResult {
    Diagnostic id;
    DiagnosticStatus status = DiagnosticStatus::skipped;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct PersistenceEntry {
    StandardWeight weight;
    double p;
    bool admissible;
    bool condition_lp;
    double c_hat;
    double max_residual;
    /// NaN when no doubled-domain rerun was made.
    double l_discrepancy;
    bool pass;
    std::string file;
};

struct BlowUpInfo {
    double time;
    double max_abs_ux;
};

struct RunManifest {
    std::string run_id;
    std::filesystem::path directory;
    std::map<std::string, std::string> scenario;
    /// "completed" or "blowup".
    std::string outcome = "completed";
    std::optional<BlowUpInfo> blowup;
    std::size_t snapshots = 0;
    double t_reached = 0.0;
    double wall_time = 0.0;
    std::vector<DiagnosticResult> diagnostics;
    std::vector<PersistenceEntry> persistence;
    std::vector<std::string> files;

    const DiagnosticResult& diagnostic(Diagnostic id) const;
    /// No diagnostic failed or errored.
    bool all_passed() const;
    nlohmann::json to_json() const;
};

/// Stable across runs of the same scenario; different scenarios get different ids.
std::string run_id(const Scenario& scenario);

/// Integrates, evaluates every requested diagnostic and writes the trajectory,
/// identity, persistence and decay CSVs plus manifest.json under out_dir/run_id.
/// Blow-up is recorded in the manifest, not thrown.
RunManifest run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir);

} // namespace chsim
