#pragma once

#include "coexsim/scenario.hpp"
#include "coexsim/types.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace coexsim {

/// One line of the event trace: `time type actor detail`.
struct TraceEvent
{
    Micros time = 0;
    std::string type;
    std::string actor;
    std::string detail;
    /// Structured copies of the numbers in `detail`, for observers.
    NodeIndex node = kNoNode;
    int link = -1;
    Micros begin = 0;
    Micros end = 0;
    std::int64_t value = 0;
};

struct LinkResult
{
    std::string id;
    std::string source;
    std::string dest;
    /// System the link's airtime is accounted to ("wimax" or the link id).
    std::string system;
    LinkStats stats;
    /// Bytes still queued or on air when the run stopped.
    std::uint64_t backlog_bytes = 0;
    /// Delivered bytes per second over the measurement window.
    double throughput_Bps = 0.0;
    /// Airtime share over the measurement window.
    double share = 0.0;
    /// Delivered bytes per timeline bin (empty when the timeline is off).
    std::vector<std::uint64_t> timeline;

    bool operator==(const LinkResult&) const = default;
};

struct SystemShare
{
    std::string system;
    double share = 0.0;

    bool operator==(const SystemShare&) const = default;
};

struct RunResult
{
    std::string scenario;
    std::uint64_t seed = 0;
    Micros duration_us = 0;
    Micros measured_us = 0;
    std::vector<LinkResult> links;
    std::vector<SystemShare> system_shares;
    double fairness_index = 0.0;
    double wimax_share = 0.0;
    Micros colocated_conflict_us = 0;
    std::uint64_t cts_count = 0;
    Micros cts_airtime_us = 0;
    Micros timeline_bin_us = 0;
    std::uint64_t events = 0;
    std::uint64_t trace_hash = 0;

    const LinkResult* link(std::string_view id) const;
    bool operator==(const RunResult&) const = default;
};

struct RunOptions
{
    /// Optional line-oriented trace sink.
    std::ostream* trace = nullptr;
    /// Optional structured observer of every trace event.
    std::function<void(const TraceEvent&)> observer;
};

/// Runs `scenario` with `seed` until its duration. Validates first; an
/// invalid scenario throws ValidationError before any event executes.
RunResult run(const ScenarioConfig& scenario, std::uint64_t seed, const RunOptions& options = {});

/// (Σx)² / (n·Σx²). Throws std::domain_error for an empty or all-zero input
/// or a negative share.
double jain_index(std::span<const double> shares);

}  // namespace coexsim
