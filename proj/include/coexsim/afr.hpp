#pragma once

#include "coexsim/medium.hpp"
#include "coexsim/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace coexsim::afr {

struct QosTarget
{
    double min_throughput_Bps = 0.0;
    double max_mean_delay_us = 0.0;

    bool operator==(const QosTarget&) const = default;
};

enum class DpeMetric : std::uint8_t
{
    WimaxOnly,
    Aggregate,
};

/// Tunables for frame reservation and its three adaptation loops.
struct AfrParams
{
    // Reservation
    Micros th_dur = 2000;
    Micros guard = 200;
    /// How early the emitter starts contending for the reservation, so a
    /// frame already on air can finish before the burst.
    Micros lead = 2030;

    // Medium acquisition pacing
    double delta = 0.02;
    Micros interval_min = 1000;
    Micros interval_max = 64000;
    Micros dma_window = 1'000'000;

    // CTS power
    double acp_margin_db = 3.0;
    double acp_floor_dbm = -30.0;
    double acp_ceiling_dbm = 20.0;
    double assumed_interferer_power_dbm = 20.0;

    // Performance evaluation
    int retx_on = 3;
    Micros retx_window = 100'000;
    Micros eval_window = 1'000'000;
    Micros hold = 2'000'000;
    std::optional<QosTarget> qos;
    double qos_growth_step = 0.25;
    double qos_growth_max = 2.0;
    DpeMetric metric = DpeMetric::WimaxOnly;

    bool operator==(const AfrParams&) const = default;
};

/// Who sends the reservation and how.
struct FrsContext
{
    NodeIndex source = kNoNode;
    double channel_mhz = 2412.0;
    Micros cts_airtime = 44;
    Micros th_dur = 2000;
    /// When false the threshold gate is bypassed (plain injectors).
    bool allow_skip = true;
};

/// Splits a reservation into NAV-capped chunks.
std::vector<Micros> chunk_reservation(Micros reservation);

/// CTS-to-self frames covering `reservation` µs of NAV that start when the
/// first frame ends. Later chunks are timed so each ends exactly when the
/// previous NAV expires, which keeps the union of NAV intervals gapless.
std::vector<Transmission> emit_frs(Micros reservation, double power_dbm, Micros now, const FrsContext& ctx);

struct OverheardFrame
{
    NodeIndex source = kNoNode;
    double rx_power_dbm = 0.0;
    Micros at = 0;
};

struct InterfererEstimate
{
    std::size_t active_systems = 0;
    double max_distance_m = 0.0;

    bool operator==(const InterfererEstimate&) const = default;
};

InterfererEstimate estimate_interferers(std::span<const OverheardFrame> overheard,
                                        Micros window,
                                        Micros now,
                                        std::span<const NodeIndex> self,
                                        double assumed_tx_power_dbm,
                                        const medium::PathLossModel& model);

struct DmaState
{
    double utilization_goal = 1.0;
    double achieved = 0.0;
    Micros claim_interval = 1000;
    Micros window = 1'000'000;
};

DmaState dma_update(const DmaState& state,
                    const InterfererEstimate& estimate,
                    double measured_share,
                    Micros now,
                    const AfrParams& params);

double acp_power(double reach_m,
                 double cca_threshold_dbm,
                 const medium::PathLossModel& model,
                 double margin_db,
                 double floor_dbm = -30.0,
                 double ceiling_dbm = 20.0);

struct DpeState
{
    bool cts_enabled = false;
    Micros th_dur = 2000;
    std::uint64_t retx_window_count = 0;
    double throughput_before = 0.0;
    double throughput_after = 0.0;
    std::optional<QosTarget> qos;
    Micros hold_until = 0;
    Micros eval_start = 0;
    bool evaluated = false;
    bool qos_violated = false;
    double reservation_growth = 1.0;
    std::uint64_t toggles = 0;
};

/// What the evaluator sees once per retransmission window.
struct DpeInputs
{
    std::uint64_t retransmissions_in_window = 0;
    /// Delivered bytes per second over the most recent evaluation window.
    double throughput_Bps = 0.0;
    double mean_delay_us = 0.0;
};

DpeState dpe_tick(const DpeState& state, const DpeInputs& inputs, Micros now, const AfrParams& params);

}  // namespace coexsim::afr
