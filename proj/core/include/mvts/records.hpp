#pragma once

// On-disk outputs of a run.
//
//   records.csv    one row per logged pull, header
//                  replication,round,policy,chosen_arm,optimal_arm,reward,regret,cum_regret
//                  reals written with 17 significant digits
//   regret.dat     whitespace-separated plot data: round, then one mean
//                  cumulative-regret column per policy
//   metadata.cfg   the full config in parse_config form plus '#' provenance lines

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mvts/config.hpp"
#include "mvts/harness.hpp"

namespace mvts {

inline constexpr const char* kCsvHeader = "replication,round,policy,chosen_arm,optimal_arm,reward,regret,cum_regret";

void write_csv_header(std::ostream& out);
void write_csv_rows(std::ostream& out, std::span<const RoundRecord> records);
void write_csv(std::ostream& out, std::span<const RoundRecord> records);
/// All kept records, ordered by replication, then policy (config order), then round.
void write_csv(std::ostream& out, const ExperimentResult& result);
void write_csv(const std::filesystem::path& path, const ExperimentResult& result);

/// Parses a file produced by write_csv. Throws IoError with the line number on malformed input.
std::vector<RoundRecord> read_csv(std::istream& in);
std::vector<RoundRecord> read_csv(const std::filesystem::path& path);

/// Rebuilds per-replication cumulative curves (rounds >= 1) from stored records.
std::vector<ReplicationResult> replications_from_records(std::span<const RoundRecord> records,
                                                         std::span<const PolicyKind> policies);

void emit_plot_data(std::ostream& out, const AggregateCurves& curves);
void emit_plot_data(const std::filesystem::path& path, const AggregateCurves& curves);

void write_metadata(std::ostream& out, const ExperimentConfig& config);
void write_metadata(const std::filesystem::path& path, const ExperimentConfig& config);

/// Minimal SVG line chart of mean cumulative regret per policy.
void render_svg(std::ostream& out, const AggregateCurves& curves, const std::string& title);

/// Writes records.csv (when records were kept), regret.dat and metadata.cfg into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const ExperimentResult& result);

}  // namespace mvts
