#pragma once

#include "coexsim/types.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace coexsim::medium {

/// Raised for arguments outside an operation's domain (e.g. a non-positive distance).
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

enum class PathLossKind : std::uint8_t
{
    FreeSpace,
    LogDistance,
};

struct PathLossModel
{
    PathLossKind kind = PathLossKind::LogDistance;
    double exponent = 3.0;
    double reference_loss_db = 40.05;
    double frequency_mhz = 2400.0;

    static PathLossModel free_space(double frequency_mhz);
    static PathLossModel log_distance(double exponent, double reference_loss_db);

    /// Throws DomainError when the invariants do not hold.
    void validate() const;
    bool operator==(const PathLossModel&) const = default;
};

struct SpillageEntry
{
    double separation_mhz = 0.0;
    double rejection_db = 0.0;

    bool operator==(const SpillageEntry&) const = default;
};

/// Adjacent-channel rejection versus channel separation. Linear between
/// entries, clamped outside them, 0 dB for co-channel.
class SpillageTable
{
public:
    SpillageTable() = default;
    explicit SpillageTable(std::vector<SpillageEntry> entries);

    /// 41 dB at 32 MHz, 55 dB at 114 MHz: a 20 dBm transmitter 1 m away
    /// lands at -61 dBm and -75 dBm respectively.
    static SpillageTable default_calibration();
    /// Stiffer WiFi-to-WiMAX figure (60 dB isolation at the -118 dBm tolerance).
    static SpillageTable intel_calibration();

    double rejection_db(double separation_mhz) const;
    const std::vector<SpillageEntry>& entries() const { return entries_; }

    bool operator==(const SpillageTable&) const = default;

private:
    std::vector<SpillageEntry> entries_;
};

/// Everything the medium needs to turn geometry into outcomes.
struct MediumConfig
{
    PathLossModel path_loss;
    SpillageTable spillage = SpillageTable::default_calibration();
    double sinr_threshold_db = 10.0;
    double wifi_sensitivity_dbm = -85.0;
    double wimax_sensitivity_dbm = -90.0;
    double cca_threshold_dbm = -82.0;
    double colocated_coupling_db = 20.0;
    double victim_tolerance_dbm = -118.0;

    double sensitivity_for(FrameKind kind) const;
    bool operator==(const MediumConfig&) const = default;
};

double path_loss(double distance_m, const PathLossModel& model);

/// Inverse of path_loss for distances of at least 1 m; losses at or below
/// the 1 m value map to 1 m.
double distance_for_loss(double loss_db, const PathLossModel& model);

double received_power(double tx_power_dbm,
                      const Position& src,
                      const Position& dst,
                      double tx_channel_mhz,
                      double rx_channel_mhz,
                      const PathLossModel& model,
                      const SpillageTable& spillage);

/// Same-platform variant: a fixed coupling loss replaces the path loss.
double received_power_colocated(double tx_power_dbm,
                                double coupling_loss_db,
                                double tx_channel_mhz,
                                double rx_channel_mhz,
                                const SpillageTable& spillage);

double required_isolation(double spillage_level_dbm, double victim_tolerance_dbm);

/// Power of `tx` as seen by `rx`, choosing coupling or path loss by platform.
double rx_power_at(const Transmission& tx,
                   const RadioInterface& source,
                   const RadioInterface& rx,
                   const MediumConfig& config);

enum class DeliveryResult : std::uint8_t
{
    Decoded,
    Corrupted,
    BelowSensitivity,
};

std::string_view to_string(DeliveryResult result);

struct DeliveryOutcome
{
    std::uint64_t transmission = 0;
    NodeIndex receiver = kNoNode;
    DeliveryResult result = DeliveryResult::Decoded;
    double rx_power_dbm = 0.0;

    bool operator==(const DeliveryOutcome&) const = default;
};

/// Receivers a frame is addressed to: its destination, or every other WiFi
/// interface for broadcast control frames.
std::vector<NodeIndex> addressed_receivers(const Transmission& tx,
                                           std::span<const RadioInterface> interfaces);

/// One outcome per (transmission, addressed receiver) pair in `active`,
/// judged only against the other members of `active`. A receiver that is
/// itself transmitting at any overlapping instant cannot decode.
std::vector<DeliveryOutcome> resolve_deliveries(std::span<const Transmission> active,
                                                std::span<const RadioInterface> interfaces,
                                                const MediumConfig& config);

}  // namespace coexsim::medium
