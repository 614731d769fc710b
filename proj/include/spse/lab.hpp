#pragma once

#include <map>
#include <string>
#include <vector>

#include "spse/config.hpp"
#include "spse/csv.hpp"

namespace spse {

/// Outcome of one named experiment: the emitted table, scalar metrics, and
/// pass/fail against the thresholds declared for that scenario.
struct ScenarioResult {
    std::string name;
    CsvTable table;
    std::map<std::string, double> metrics;
    std::vector<std::string> failures;  // empty means pass
    double wall_seconds = 0.0;

    bool pass() const { return failures.empty(); }
};

/// Known scenarios: groundstate-table, scaling-check, mass-match,
/// pohozaev-decay, concentration-rate, uniqueness-probe, asymptotics-sweep.
ScenarioResult run_scenario(const std::string& name, const LabConfig& config);

std::vector<std::string> scenario_names();

/// Writes result.table to `path`, prefixing provenance comments (tool
/// version, config hash); every row additionally carries the hash column.
void write_scenario_csv(const ScenarioResult& result, const LabConfig& config,
                        const std::string& path);

}  // namespace spse
