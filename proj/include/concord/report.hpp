#pragma once

#include <string>
#include <string_view>

#include "concord/simulation.hpp"

namespace concord {

/// Shortest round-tripping decimal rendering of a double (to_chars).
std::string format_double(double value);

/// Comma-separated report, one row per cell, Table-6 column order first
/// (K, n, kappa, V_E_hat, V stand-in, V_A, mean V, mean V_A), then the
/// relative columns and the degenerate accounting. Numeric fields use
/// shortest round-trip formatting; undefined relatives are written as "na".
std::string report_to_csv(const SimulationReport& report);

/// Inverse of report_to_csv; reproduces every numeric field exactly and
/// recomputes the summary from the parsed cells.
SimulationReport report_from_csv(std::string_view csv);

/// JSON object with "cells" (field names mirroring SimulationCell) and
/// "summary"; undefined relatives serialize as null.
std::string report_to_json(const SimulationReport& report);

/// Fixed-width table for humans; variances shown with 4 decimals.
std::string report_to_text(const SimulationReport& report);

}  // namespace concord
