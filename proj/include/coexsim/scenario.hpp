#pragma once

#include "coexsim/afr.hpp"
#include "coexsim/medium.hpp"
#include "coexsim/types.hpp"
#include "coexsim/wifi_mac.hpp"
#include "coexsim/wimax_mac.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace coexsim {

struct TrafficSpec
{
    enum class Type : std::uint8_t
    {
        None,
        Saturated,
        Cbr,
    };

    Type type = Type::None;
    /// WiFi: addressee node id.
    std::string dest;
    std::size_t frame_bytes = 1500;
    std::size_t queue_limit = 50;
    /// WiFi constant bit rate.
    double rate_bps = 0.0;
    /// WiMAX subscriber constant bit rates.
    double dl_rate_bps = 0.0;
    double ul_rate_bps = 0.0;
    /// First arrival (cbr) or first queued frame (saturated).
    Micros start_us = 0;

    bool operator==(const TrafficSpec&) const = default;
};

std::string_view to_string(TrafficSpec::Type type);

struct CtsInjection
{
    Micros at_us = 0;
    Micros reservation_us = 0;

    bool operator==(const CtsInjection&) const = default;
};

struct NodeConfig
{
    std::string id;
    RadioKind kind = RadioKind::Wifi;
    Position position;
    double tx_power_dbm = 20.0;
    double channel_mhz = 2412.0;
    TrafficSpec traffic;
    /// Id of the node sharing this node's platform; empty when standalone.
    std::string collocated_with;
    /// WiMAX subscribers: serving base station id.
    std::string base_station;
    int priority = 0;
    /// Coordinators: scheduled reservations.
    std::vector<CtsInjection> cts_schedule;

    bool operator==(const NodeConfig&) const = default;
};

struct AfrConfig
{
    bool enabled = false;
    bool dma = true;
    bool acp = true;
    bool dpe = true;
    afr::AfrParams params;

    bool operator==(const AfrConfig&) const = default;
};

struct ClcConfig
{
    bool enabled = false;
    bool schedule_aware = false;
    bool priority = false;
    Micros retry_us = 500;

    bool operator==(const ClcConfig&) const = default;
};

struct ScenarioConfig
{
    std::string name = "scenario";
    Micros duration_us = 30'000'000;
    Micros warmup_us = 1'000'000;
    std::uint64_t seed = 1;
    /// "default" or "intel"; selects the spillage table unless one is given.
    std::string calibration = "default";
    medium::MediumConfig medium;
    wifi::DcfParams dcf;
    wimax::WimaxParams wimax;
    std::vector<NodeConfig> nodes;
    AfrConfig afr;
    ClcConfig clc;
    /// Width of the per-link delivery timeline bins; 0 disables the timeline.
    Micros timeline_bin_us = 0;

    const NodeConfig* find(std::string_view id) const;
    bool operator==(const ScenarioConfig&) const = default;
};

struct ValidationIssue
{
    std::string path;
    std::string message;
};

/// Scenario text that failed to parse or validate. Every issue names the
/// offending field path.
class ValidationError : public std::runtime_error
{
public:
    explicit ValidationError(std::vector<ValidationIssue> issues);
    const std::vector<ValidationIssue>& issues() const { return issues_; }

private:
    std::vector<ValidationIssue> issues_;
};

/// Parses the JSON scenario schema (see README) and validates it. Unknown
/// keys are errors.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::string& path);

/// Canonical JSON text of a config; parse_scenario(emit_scenario(c)) == c.
std::string emit_scenario(const ScenarioConfig& config);

/// Throws ValidationError listing every violated invariant.
void validate(const ScenarioConfig& config);

}  // namespace coexsim
