#include "coexsim/medium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coexsim::medium {

namespace {

bool overlaps(const Transmission& a, const Transmission& b)
{
    return a.start < b.end() && b.start < a.end();
}

const RadioInterface& lookup(std::span<const RadioInterface> interfaces, NodeIndex index)
{
    if (index >= interfaces.size())
        throw DomainError("transmission references unknown interface " + std::to_string(index));
    return interfaces[index];
}

}  // namespace

PathLossModel PathLossModel::free_space(double frequency_mhz)
{
    PathLossModel model;
    model.kind = PathLossKind::FreeSpace;
    model.exponent = 2.0;
    model.frequency_mhz = frequency_mhz;
    model.reference_loss_db = 20.0 * std::log10(frequency_mhz) - 27.55;
    return model;
}

PathLossModel PathLossModel::log_distance(double exponent, double reference_loss_db)
{
    PathLossModel model;
    model.kind = PathLossKind::LogDistance;
    model.exponent = exponent;
    model.reference_loss_db = reference_loss_db;
    return model;
}

void PathLossModel::validate() const
{
    if (!(exponent >= 2.0) || !std::isfinite(exponent))
        throw DomainError("path loss exponent must be >= 2.0");
    if (kind == PathLossKind::FreeSpace && exponent != 2.0)
        throw DomainError("free-space path loss has a fixed exponent of 2.0");
    if (!(reference_loss_db > 0.0) || !std::isfinite(reference_loss_db))
        throw DomainError("reference loss must be positive");
    if (!(frequency_mhz > 0.0) || !std::isfinite(frequency_mhz))
        throw DomainError("frequency must be positive");
}

SpillageTable::SpillageTable(std::vector<SpillageEntry> entries)
    : entries_(std::move(entries))
{
    if (entries_.empty())
        throw DomainError("spillage table needs at least one entry");
    std::sort(entries_.begin(), entries_.end(),
              [](const SpillageEntry& a, const SpillageEntry& b) { return a.separation_mhz < b.separation_mhz; });
    for (std::size_t i = 0; i < entries_.size(); ++i)
    {
        const auto& e = entries_[i];
        if (!std::isfinite(e.separation_mhz) || !std::isfinite(e.rejection_db) || e.separation_mhz < 0.0)
            throw DomainError("spillage entry must be finite with non-negative separation");
        if (e.rejection_db < 0.0)
            throw DomainError("spillage rejection must be >= 0 dB");
        if (i > 0 && e.rejection_db < entries_[i - 1].rejection_db)
            throw DomainError("spillage rejection must be non-decreasing in channel separation");
        if (i > 0 && e.separation_mhz == entries_[i - 1].separation_mhz)
            throw DomainError("duplicate spillage separation");
    }
}

SpillageTable SpillageTable::default_calibration()
{
    return SpillageTable({{32.0, 41.0}, {114.0, 55.0}});
}

SpillageTable SpillageTable::intel_calibration()
{
    return SpillageTable({{32.0, 37.95}, {114.0, 55.0}});
}

double SpillageTable::rejection_db(double separation_mhz) const
{
    const double sep = std::abs(separation_mhz);
    if (sep == 0.0 || entries_.empty())
        return 0.0;
    if (sep <= entries_.front().separation_mhz)
        return entries_.front().rejection_db;
    if (sep >= entries_.back().separation_mhz)
        return entries_.back().rejection_db;
    auto hi = std::upper_bound(entries_.begin(), entries_.end(), sep,
                               [](double s, const SpillageEntry& e) { return s < e.separation_mhz; });
    auto lo = std::prev(hi);
    const double t = (sep - lo->separation_mhz) / (hi->separation_mhz - lo->separation_mhz);
    return lo->rejection_db + t * (hi->rejection_db - lo->rejection_db);
}

double MediumConfig::sensitivity_for(FrameKind kind) const
{
    return kind == FrameKind::WimaxBurst ? wimax_sensitivity_dbm : wifi_sensitivity_dbm;
}

double path_loss(double distance_m, const PathLossModel& model)
{
    if (!(distance_m > 0.0) || !std::isfinite(distance_m))
        throw DomainError("path loss needs a positive finite distance");
    const double d = std::max(distance_m, 1.0);
    if (model.kind == PathLossKind::FreeSpace)
        return 20.0 * std::log10(d) + 20.0 * std::log10(model.frequency_mhz) - 27.55;
    return model.reference_loss_db + 10.0 * model.exponent * std::log10(d);
}

double distance_for_loss(double loss_db, const PathLossModel& model)
{
    const double at_one_meter = path_loss(1.0, model);
    if (loss_db <= at_one_meter)
        return 1.0;
    const double exponent = model.kind == PathLossKind::FreeSpace ? 2.0 : model.exponent;
    return std::pow(10.0, (loss_db - at_one_meter) / (10.0 * exponent));
}

double received_power(double tx_power_dbm,
                      const Position& src,
                      const Position& dst,
                      double tx_channel_mhz,
                      double rx_channel_mhz,
                      const PathLossModel& model,
                      const SpillageTable& spillage)
{
    return tx_power_dbm - path_loss(distance(src, dst), model)
           - spillage.rejection_db(tx_channel_mhz - rx_channel_mhz);
}

double received_power_colocated(double tx_power_dbm,
                                double coupling_loss_db,
                                double tx_channel_mhz,
                                double rx_channel_mhz,
                                const SpillageTable& spillage)
{
    return tx_power_dbm - coupling_loss_db - spillage.rejection_db(tx_channel_mhz - rx_channel_mhz);
}

double required_isolation(double spillage_level_dbm, double victim_tolerance_dbm)
{
    return spillage_level_dbm - victim_tolerance_dbm;
}

double rx_power_at(const Transmission& tx,
                   const RadioInterface& source,
                   const RadioInterface& rx,
                   const MediumConfig& config)
{
    if (source.platform == rx.platform)
    {
        return received_power_colocated(tx.power_dbm, config.colocated_coupling_db, tx.channel_mhz,
                                        rx.channel_mhz, config.spillage);
    }
    return received_power(tx.power_dbm, source.position, rx.position, tx.channel_mhz, rx.channel_mhz,
                          config.path_loss, config.spillage);
}

std::string_view to_string(DeliveryResult result)
{
    switch (result)
    {
        case DeliveryResult::Decoded: return "decoded";
        case DeliveryResult::Corrupted: return "corrupted";
        case DeliveryResult::BelowSensitivity: return "below-sensitivity";
    }
    return "?";
}

std::vector<NodeIndex> addressed_receivers(const Transmission& tx,
                                           std::span<const RadioInterface> interfaces)
{
    std::vector<NodeIndex> out;
    if (!tx.broadcast())
    {
        out.push_back(tx.dest);
        return out;
    }
    for (const auto& iface : interfaces)
    {
        if (iface.index != tx.source && is_wifi(iface.kind))
            out.push_back(iface.index);
    }
    return out;
}

std::vector<DeliveryOutcome> resolve_deliveries(std::span<const Transmission> active,
                                                std::span<const RadioInterface> interfaces,
                                                const MediumConfig& config)
{
    std::vector<DeliveryOutcome> outcomes;
    for (const auto& tx : active)
    {
        const auto& source = lookup(interfaces, tx.source);
        for (NodeIndex r : addressed_receivers(tx, interfaces))
        {
            const auto& rx = lookup(interfaces, r);
            DeliveryOutcome outcome;
            outcome.transmission = tx.id;
            outcome.receiver = r;
            outcome.rx_power_dbm = rx_power_at(tx, source, rx, config);

            if (outcome.rx_power_dbm < config.sensitivity_for(tx.kind))
            {
                outcome.result = DeliveryResult::BelowSensitivity;
                outcomes.push_back(outcome);
                continue;
            }

            bool self_busy = false;
            double strongest = -std::numeric_limits<double>::infinity();
            for (const auto& other : active)
            {
                if (&other == &tx || !overlaps(tx, other))
                    continue;
                if (other.source == r)
                {
                    self_busy = true;
                    break;
                }
                strongest = std::max(strongest,
                                     rx_power_at(other, lookup(interfaces, other.source), rx, config));
            }
            const bool corrupted =
                self_busy || (outcome.rx_power_dbm - strongest) < config.sinr_threshold_db;
            outcome.result = corrupted ? DeliveryResult::Corrupted : DeliveryResult::Decoded;
            outcomes.push_back(outcome);
        }
    }
    return outcomes;
}

}  // namespace coexsim::medium
