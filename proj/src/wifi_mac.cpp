#include "coexsim/wifi_mac.hpp"

#include <algorithm>
#include <cmath>

namespace coexsim::wifi {

Micros DcfParams::data_airtime(std::size_t bytes) const
{
    const double payload_us = static_cast<double>(bytes) * 8.0 / phy_rate_mbps;
    return preamble + static_cast<Micros>(std::ceil(payload_us));
}

bool NavState::extend_to(Micros new_expiry)
{
    if (new_expiry <= expiry)
        return false;
    expiry = new_expiry;
    return true;
}

DcfStation::DcfStation(DcfParams params, Micros now)
    : params_(params), idle_since_(now)
{
    backoff_.contention_window = params_.cw_min;
}

bool DcfStation::counting_down(Micros now) const
{
    return !phys_busy_ && !nav_.blocks(now);
}

Micros DcfStation::effective_idle_start() const
{
    return std::max(idle_since_, nav_.expiry);
}

void DcfStation::freeze(Micros now)
{
    const Micros countdown_start = effective_idle_start() + params_.difs;
    if (now <= countdown_start)
        return;
    const auto elapsed = static_cast<int>((now - countdown_start) / params_.slot);
    backoff_.pending_slots = std::max(0, backoff_.pending_slots - elapsed);
}

bool DcfStation::on_overheard(const Transmission& frame, double rx_power_dbm, double sensitivity_dbm, Micros now)
{
    if (rx_power_dbm < sensitivity_dbm || frame.kind != FrameKind::Cts)
        return false;
    const Micros expiry = frame.end() + frame.nav_duration;
    if (expiry <= nav_.expiry)
        return false;
    if (counting_down(now))
        freeze(now);
    return nav_.extend_to(expiry);
}

void DcfStation::on_medium_busy(Micros now)
{
    if (phys_busy_)
        return;
    if (counting_down(now))
        freeze(now);
    phys_busy_ = true;
}

void DcfStation::on_medium_idle(Micros now)
{
    if (!phys_busy_)
        return;
    phys_busy_ = false;
    idle_since_ = now;
}

AccessDecision DcfStation::try_access(Micros now) const
{
    if (phys_busy_)
        return {AccessDecision::Kind::Defer, std::nullopt};
    if (nav_.blocks(now))
        return {AccessDecision::Kind::Defer, nav_.expiry};
    const Micros ready = effective_idle_start() + params_.difs
                         + static_cast<Micros>(backoff_.pending_slots) * params_.slot;
    return {AccessDecision::Kind::Start, std::max(now, ready)};
}

void DcfStation::begin_transmit()
{
    backoff_.pending_slots = 0;
}

void DcfStation::resume_after_tx(Micros now)
{
    if (!phys_busy_)
        idle_since_ = now;
}

TxVerdict DcfStation::on_tx_outcome(bool acked, Rng& rng)
{
    TxVerdict verdict;
    if (acked)
    {
        backoff_.contention_window = params_.cw_min;
        backoff_.retry_count = 0;
        verdict = TxVerdict::Delivered;
    }
    else if (backoff_.retry_count >= params_.retry_limit)
    {
        backoff_.contention_window = params_.cw_min;
        backoff_.retry_count = 0;
        verdict = TxVerdict::Dropped;
    }
    else
    {
        ++backoff_.retry_count;
        backoff_.contention_window = std::min(2 * backoff_.contention_window + 1, params_.cw_max);
        verdict = TxVerdict::Retry;
    }
    draw_backoff(rng);
    return verdict;
}

void DcfStation::draw_backoff(Rng& rng)
{
    backoff_.pending_slots = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(backoff_.contention_window)));
}

}  // namespace coexsim::wifi
