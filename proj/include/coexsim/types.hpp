#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coexsim {

/// Virtual time in integer microseconds.
using Micros = std::int64_t;

/// Index of a radio interface inside a scenario.
using NodeIndex = std::size_t;

inline constexpr NodeIndex kNoNode = static_cast<NodeIndex>(-1);

struct Position
{
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Position&) const = default;
};

double distance(const Position& a, const Position& b);

enum class RadioKind : std::uint8_t
{
    Wifi,
    Coordinator,  // WiFi interface that only injects CTS frames
    WimaxBs,
    WimaxSs,
};

bool is_wifi(RadioKind kind);
bool is_wimax(RadioKind kind);
std::string_view to_string(RadioKind kind);
std::optional<RadioKind> radio_kind_from_string(std::string_view text);

enum class FrameKind : std::uint8_t
{
    Data,
    Cts,
    Ack,
    WimaxBurst,
};

std::string_view to_string(FrameKind kind);

enum class Direction : std::uint8_t
{
    Downlink,
    Uplink,
};

std::string_view to_string(Direction dir);

/// A positioned transceiver.
struct RadioInterface
{
    NodeIndex index = 0;
    std::string id;
    RadioKind kind = RadioKind::Wifi;
    Position position;
    double channel_mhz = 2412.0;
    double tx_power_dbm = 20.0;
    /// Interfaces sharing a platform id are co-located (same device).
    std::size_t platform = 0;
};

/// An on-air emission.
struct Transmission
{
    std::uint64_t id = 0;
    NodeIndex source = kNoNode;
    /// Addressee; kNoNode for broadcast frames such as CTS-to-self.
    NodeIndex dest = kNoNode;
    FrameKind kind = FrameKind::Data;
    Micros start = 0;
    Micros airtime = 0;
    double power_dbm = 0.0;
    double channel_mhz = 2412.0;
    /// NAV duration field, meaningful for CTS only.
    Micros nav_duration = 0;
    std::size_t bytes = 0;

    Micros end() const { return start + airtime; }
    bool broadcast() const { return dest == kNoNode; }
};

/// Per-link counters.
struct LinkStats
{
    std::uint64_t offered_bytes = 0;
    std::uint64_t delivered_bytes = 0;
    std::uint64_t corrupted_frames = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t dropped_frames = 0;
    std::uint64_t dropped_bytes = 0;
    Micros airtime_us = 0;
    std::vector<Micros> delay_samples;

    double mean_delay_us() const;
    bool operator==(const LinkStats&) const = default;
};

}  // namespace coexsim
