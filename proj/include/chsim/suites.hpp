#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace chsim {

struct SuiteCheck {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct SuiteTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string csv() const;
};

struct SuiteReport {
    std::string name;
    std::vector<SuiteTable> tables;
    std::vector<SuiteCheck> checks;
    double wall_time = 0.0;

    bool passed() const;
    const SuiteCheck& check(const std::string& name) const;
    nlohmann::json to_json() const;
};

std::vector<std::string> suite_names();

/// convergence, stability, persistence, friedrichs or support. Independent
/// members run on up to `workers` threads. Throws ConfigError for an unknown
/// name and OrchestrationError when a reference run cannot be produced.
SuiteReport run_suite(const std::string& name, int workers = 1);

/// suite_<name>.json plus suite_<name>_<table>.csv per table, written atomically.
std::vector<std::filesystem::path> write_suite(const SuiteReport& report, const std::filesystem::path& dir);

} // namespace chsim
