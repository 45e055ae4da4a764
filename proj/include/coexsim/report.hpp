#pragma once

#include "coexsim/engine.hpp"
#include "coexsim/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace coexsim {

enum class ReportFormat : std::uint8_t
{
    Csv,
    Json,
};

/// Column order of the CSV report. Link rows leave the run-level columns
/// empty and the summary row leaves the link columns empty.
const std::vector<std::string>& csv_columns();

std::string to_csv(const RunResult& result);
std::string to_json(const RunResult& result);
std::string render(const RunResult& result, ReportFormat format);

/// Writes through a sibling temporary file and a rename, so a failed run
/// never leaves a partial report behind.
void write_atomic(const std::string& path, const std::string& content);

enum class Toggle : std::uint8_t
{
    Afr,
    Clc,
};

struct MetricDelta
{
    std::string metric;
    double off = 0.0;
    double on = 0.0;
    double delta() const { return on - off; }
};

struct Comparison
{
    std::string scenario;
    Toggle toggle = Toggle::Afr;
    std::vector<std::uint64_t> seeds;
    std::vector<RunResult> off_runs;
    std::vector<RunResult> on_runs;
    std::vector<MetricDelta> metrics;

    const MetricDelta* metric(std::string_view name) const;
};

/// Runs `scenario` with the mechanism forced off and on for every seed.
/// Runs execute concurrently; each is independent and deterministic.
Comparison compare(const ScenarioConfig& scenario, Toggle toggle, const std::vector<std::uint64_t>& seeds);

std::string to_csv(const Comparison& comparison);
std::string to_json(const Comparison& comparison);
std::string render(const Comparison& comparison, ReportFormat format);

struct RunCommand
{
    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    std::optional<Micros> duration_us;
    std::string out_path;
    ReportFormat format = ReportFormat::Csv;
    std::string trace_path;
};

struct CompareCommand
{
    std::string scenario_path;
    Toggle toggle = Toggle::Afr;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::optional<Micros> duration_us;
    std::string out_path;
    ReportFormat format = ReportFormat::Csv;
};

/// Exit codes shared by the command front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

/// Executes a command, writing the report to `out_path` (or `out` when the
/// path is empty) and diagnostics to `err`. Returns an exit code.
int run_command(const RunCommand& cmd, std::ostream& out, std::ostream& err);
int compare_command(const CompareCommand& cmd, std::ostream& out, std::ostream& err);

}  // namespace coexsim
