#pragma once

// Persistence of sweep results: CSV rows, a JSON summary of the fitted
// quantities, and log-log SVG panels.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "xtalk/config.hpp"
#include "xtalk/sweeps.hpp"

namespace xtalk {

/// First line of every CSV file; bump the version when columns change.
inline constexpr const char* kCsvSchemaLine = "# xtalk sweep csv v1";
inline constexpr const char* kCsvHeader =
    "epsilon,v12,v13,v23,protocol,initial_state,infidelity,infidelity_corrected,perturb_prediction";

enum class SweepKind { Epsilon, Vdw, Correction };

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records);

/// JSON summary: fitted slopes, suppression factors, crossover and regime data.
std::string summary_json(const std::vector<SweepRecord>& records, const ExperimentConfig& cfg,
                         SweepKind kind);

/// Log-log plot panels (four for an epsilon sweep, one otherwise).
std::string render_svg(const std::vector<SweepRecord>& records, SweepKind kind);

/// Writes <stem>.csv / .json / .svg into cfg.output.directory according to
/// the format flags and returns the paths written. I/O errors name the path.
std::vector<std::filesystem::path> emit_outputs(const std::vector<SweepRecord>& records,
                                                const ExperimentConfig& cfg, SweepKind kind,
                                                const std::string& stem);

}  // namespace xtalk
