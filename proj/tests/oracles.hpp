#pragma once

// Reference computations written independently of the library, used as
// expected values by the tests.

#include "coexsim/medium.hpp"
#include "coexsim/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Friis loss from first principles: 20·log10(4π d f / c).
inline double friis_loss_db(double distance_m, double freq_mhz)
{
    const double f_hz = freq_mhz * 1e6;
    return 20.0 * std::log10(4.0 * std::numbers::pi * std::max(distance_m, 1.0) * f_hz / kSpeedOfLight);
}

inline double log_distance_db(double distance_m, double ref_db, double exponent)
{
    // Same law written as a power ratio instead of a dB sum.
    const double ratio = std::pow(std::max(distance_m, 1.0), exponent);
    return ref_db + 10.0 * std::log10(ratio);
}

inline double loss_db(double distance_m, const coexsim::medium::PathLossModel& m)
{
    if (m.kind == coexsim::medium::PathLossKind::FreeSpace)
        return friis_loss_db(distance_m, m.frequency_mhz);
    return log_distance_db(distance_m, m.reference_loss_db, m.exponent);
}

/// Piecewise-linear rejection lookup over (separation, dB) knots.
inline double rejection_db(const std::vector<std::pair<double, double>>& knots, double separation_mhz)
{
    const double s = std::abs(separation_mhz);
    if (s == 0.0)
        return 0.0;
    if (s <= knots.front().first)
        return knots.front().second;
    if (s >= knots.back().first)
        return knots.back().second;
    for (std::size_t i = 1; i < knots.size(); ++i)
    {
        if (s <= knots[i].first)
        {
            const auto [x0, y0] = knots[i - 1];
            const auto [x1, y1] = knots[i];
            return y0 + (y1 - y0) * (s - x0) / (x1 - x0);
        }
    }
    return knots.back().second;
}

inline std::vector<std::pair<double, double>> knots_of(const coexsim::medium::SpillageTable& t)
{
    std::vector<std::pair<double, double>> out;
    for (const auto& e : t.entries())
        out.emplace_back(e.separation_mhz, e.rejection_db);
    return out;
}

inline double power_at(const coexsim::Transmission& tx,
                       const coexsim::RadioInterface& src,
                       const coexsim::RadioInterface& rx,
                       const coexsim::medium::MediumConfig& cfg)
{
    const double rej = rejection_db(knots_of(cfg.spillage), tx.channel_mhz - rx.channel_mhz);
    if (src.platform == rx.platform)
        return tx.power_dbm - cfg.colocated_coupling_db - rej;
    const double d = std::hypot(src.position.x - rx.position.x, src.position.y - rx.position.y);
    return tx.power_dbm - loss_db(d, cfg.path_loss) - rej;
}

struct Outcome
{
    std::uint64_t tx = 0;
    coexsim::NodeIndex receiver = coexsim::kNoNode;
    coexsim::medium::DeliveryResult result{};
};

/// Walks every microsecond of every addressed frame and evaluates the
/// SINR and half-duplex conditions at that instant.
inline std::vector<Outcome> brute_force_deliveries(const std::vector<coexsim::Transmission>& active,
                                                   const std::vector<coexsim::RadioInterface>& ifaces,
                                                   const coexsim::medium::MediumConfig& cfg)
{
    using coexsim::medium::DeliveryResult;
    std::vector<Outcome> out;
    for (const auto& tx : active)
    {
        std::vector<coexsim::NodeIndex> receivers;
        if (tx.dest != coexsim::kNoNode)
            receivers.push_back(tx.dest);
        else
            for (const auto& i : ifaces)
                if (i.index != tx.source && coexsim::is_wifi(i.kind))
                    receivers.push_back(i.index);

        for (auto r : receivers)
        {
            const auto& rx = ifaces[r];
            const double signal = power_at(tx, ifaces[tx.source], rx, cfg);
            const double sens = tx.kind == coexsim::FrameKind::WimaxBurst ? cfg.wimax_sensitivity_dbm
                                                                          : cfg.wifi_sensitivity_dbm;
            Outcome o{tx.id, r, DeliveryResult::Decoded};
            if (signal < sens)
            {
                o.result = DeliveryResult::BelowSensitivity;
                out.push_back(o);
                continue;
            }
            for (coexsim::Micros t = tx.start; t < tx.start + tx.airtime && o.result == DeliveryResult::Decoded; ++t)
            {
                double worst = -std::numeric_limits<double>::infinity();
                for (const auto& other : active)
                {
                    if (other.id == tx.id || t < other.start || t >= other.start + other.airtime)
                        continue;
                    if (other.source == r)
                    {
                        o.result = DeliveryResult::Corrupted;
                        break;
                    }
                    worst = std::max(worst, power_at(other, ifaces[other.source], rx, cfg));
                }
                if (o.result == DeliveryResult::Decoded && signal - worst < cfg.sinr_threshold_db)
                    o.result = DeliveryResult::Corrupted;
            }
            out.push_back(o);
        }
    }
    return out;
}

/// Jain's index as mean² / mean-of-squares.
inline double jain(const std::vector<double>& x)
{
    double m = 0.0;
    double m2 = 0.0;
    for (double v : x)
    {
        m += v;
        m2 += v * v;
    }
    m /= static_cast<double>(x.size());
    m2 /= static_cast<double>(x.size());
    return m * m / m2;
}

}  // namespace oracle
