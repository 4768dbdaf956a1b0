#pragma once

// The four scenario-level commands behind the command-line tool. Each returns
// a JSON report and an overall pass flag; configuration problems surface as
// ConfigError, everything else as the library's other exceptions.

#include "poroph/scenario.hpp"

#include <filesystem>
#include <string>

namespace poroph {

struct CommandResult {
    std::string report;  ///< JSON text
    bool pass = false;
};

/// Structure, index and (for networks) ellipticity report.
CommandResult cmd_check(const Scenario& sc);

/// Runs the scenario and writes the trajectory CSV to `csv_path`.
CommandResult cmd_simulate(const Scenario& sc, const std::filesystem::path& csv_path);

/// Compares `formulation` against `compare_with`. Supported pairs:
/// full/sqrt, quasi_static/schur_parabolic, quasi_static/alt_qs, any
/// formulation with a subsystem coupling against "coupled", and the
/// full-versus-quasi_static limit study when `rho_sweep` is given.
CommandResult cmd_compare(const Scenario& sc);

/// Writes E, J, R, G, the assembled operator blocks, the mesh and a manifest.
CommandResult cmd_export(const Scenario& sc, const std::filesystem::path& dir);

}  // namespace poroph
