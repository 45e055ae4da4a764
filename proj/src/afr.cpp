#include "coexsim/afr.hpp"

#include "coexsim/wifi_mac.hpp"

#include <algorithm>
#include <stdexcept>

namespace coexsim::afr {

std::vector<Micros> chunk_reservation(Micros reservation)
{
    std::vector<Micros> chunks;
    while (reservation > 0)
    {
        const Micros piece = std::min(reservation, wifi::kNavFieldCap);
        chunks.push_back(piece);
        reservation -= piece;
    }
    return chunks;
}

std::vector<Transmission> emit_frs(Micros reservation, double power_dbm, Micros now, const FrsContext& ctx)
{
    if (reservation <= 0)
        throw std::domain_error("reservation must be positive");
    if (ctx.allow_skip && reservation < ctx.th_dur)
        return {};

    std::vector<Transmission> frames;
    const Micros nav_start = now + ctx.cts_airtime;
    Micros covered = 0;
    for (Micros piece : chunk_reservation(reservation))
    {
        Transmission cts;
        cts.source = ctx.source;
        cts.kind = FrameKind::Cts;
        cts.start = nav_start + covered - ctx.cts_airtime;
        cts.airtime = ctx.cts_airtime;
        cts.power_dbm = power_dbm;
        cts.channel_mhz = ctx.channel_mhz;
        cts.nav_duration = piece;
        frames.push_back(cts);
        covered += piece;
    }
    return frames;
}

InterfererEstimate estimate_interferers(std::span<const OverheardFrame> overheard,
                                        Micros window,
                                        Micros now,
                                        std::span<const NodeIndex> self,
                                        double assumed_tx_power_dbm,
                                        const medium::PathLossModel& model)
{
    std::vector<NodeIndex> sources;
    std::optional<double> weakest;
    for (const auto& f : overheard)
    {
        if (f.at < now - window || f.at > now)
            continue;
        if (std::find(self.begin(), self.end(), f.source) != self.end())
            continue;
        if (std::find(sources.begin(), sources.end(), f.source) == sources.end())
            sources.push_back(f.source);
        weakest = weakest ? std::min(*weakest, f.rx_power_dbm) : f.rx_power_dbm;
    }

    InterfererEstimate estimate;
    estimate.active_systems = sources.size();
    if (weakest)
        estimate.max_distance_m = medium::distance_for_loss(assumed_tx_power_dbm - *weakest, model);
    return estimate;
}

DmaState dma_update(const DmaState& state,
                    const InterfererEstimate& estimate,
                    double measured_share,
                    Micros /*now*/,
                    const AfrParams& params)
{
    if (!(measured_share >= 0.0 && measured_share <= 1.0))
        throw std::domain_error("measured share must lie in [0, 1]");

    DmaState next = state;
    next.utilization_goal = 1.0 / (1.0 + static_cast<double>(estimate.active_systems));
    next.achieved = measured_share;
    if (measured_share < next.utilization_goal - params.delta)
        next.claim_interval = std::max(params.interval_min, state.claim_interval / 2);
    else if (measured_share > next.utilization_goal + params.delta)
        next.claim_interval = std::min(params.interval_max, state.claim_interval * 2);
    next.claim_interval = std::clamp(next.claim_interval, params.interval_min, params.interval_max);
    return next;
}

double acp_power(double reach_m,
                 double cca_threshold_dbm,
                 const medium::PathLossModel& model,
                 double margin_db,
                 double floor_dbm,
                 double ceiling_dbm)
{
    if (reach_m < 0.0)
        throw std::domain_error("reach must be non-negative");
    if (reach_m == 0.0)
        return floor_dbm;
    const double power = cca_threshold_dbm + medium::path_loss(std::max(reach_m, 1.0), model) + margin_db;
    return std::clamp(power, floor_dbm, ceiling_dbm);
}

DpeState dpe_tick(const DpeState& state, const DpeInputs& inputs, Micros now, const AfrParams& params)
{
    DpeState next = state;
    next.retx_window_count = inputs.retransmissions_in_window;

    if (!state.cts_enabled)
    {
        if (now >= state.hold_until && inputs.retransmissions_in_window >= static_cast<std::uint64_t>(params.retx_on))
        {
            next.cts_enabled = true;
            next.throughput_before = inputs.throughput_Bps;
            next.eval_start = now;
            next.evaluated = false;
            ++next.toggles;
        }
    }
    else if (!state.evaluated && now - state.eval_start >= params.eval_window)
    {
        next.throughput_after = inputs.throughput_Bps;
        if (next.throughput_after <= state.throughput_before)
        {
            next.cts_enabled = false;
            next.hold_until = now + params.hold;
            ++next.toggles;
        }
        else
        {
            next.evaluated = true;
        }
    }

    if (state.qos)
    {
        next.qos_violated = inputs.throughput_Bps < state.qos->min_throughput_Bps
                            || inputs.mean_delay_us > state.qos->max_mean_delay_us;
        if (next.qos_violated)
            next.reservation_growth = std::min(params.qos_growth_max, next.reservation_growth + params.qos_growth_step);
    }
    return next;
}

}  // namespace coexsim::afr
