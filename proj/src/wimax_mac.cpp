#include "coexsim/wimax_mac.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace coexsim::wimax {

std::vector<Grant> FrameMap::grants_for(NodeIndex ss) const
{
    std::vector<Grant> out;
    for (const auto& g : grants)
    {
        if (g.ss == ss)
            out.push_back(g);
    }
    return out;
}

bool FrameMap::well_formed() const
{
    if (frame_len <= 0 || dl_end < 0 || dl_end > frame_len)
        return false;
    Micros cursor = 0;
    for (const auto& g : grants)
    {
        if (g.length <= 0 || g.offset < cursor || g.end() > frame_len)
            return false;
        if (g.direction == Direction::Downlink && g.end() > dl_end)
            return false;
        if (g.direction == Direction::Uplink && g.offset < dl_end)
            return false;
        cursor = g.end();
    }
    return true;
}

Micros airtime_for(std::uint64_t bytes, double bytes_per_us)
{
    return static_cast<Micros>(std::ceil(static_cast<double>(bytes) / bytes_per_us));
}

std::uint64_t capacity_of(Micros length, double bytes_per_us)
{
    return static_cast<std::uint64_t>(std::floor(static_cast<double>(length) * bytes_per_us));
}

namespace {

std::vector<NodeIndex> subscriber_order(const std::map<NodeIndex, std::uint64_t>& demand,
                                        Direction dir,
                                        const FrameMap* previous)
{
    std::vector<NodeIndex> order;
    if (previous != nullptr)
    {
        for (const auto& g : previous->grants)
        {
            if (g.direction == dir && demand.contains(g.ss)
                && std::find(order.begin(), order.end(), g.ss) == order.end())
                order.push_back(g.ss);
        }
    }
    for (const auto& [ss, bytes] : demand)
    {
        if (std::find(order.begin(), order.end(), ss) == order.end())
            order.push_back(ss);
    }
    return order;
}

void allocate_subframe(const std::map<NodeIndex, std::uint64_t>& demand,
                       Direction dir,
                       Micros begin,
                       Micros length,
                       double bytes_per_us,
                       const FrameMap* previous,
                       std::vector<Grant>& out)
{
    if (demand.empty() || length <= 0)
        return;

    std::uint64_t total_bytes = 0;
    Micros total_need = 0;
    for (const auto& [ss, bytes] : demand)
    {
        total_bytes += bytes;
        total_need += airtime_for(bytes, bytes_per_us);
    }

    Micros cursor = begin;
    for (NodeIndex ss : subscriber_order(demand, dir, previous))
    {
        const std::uint64_t bytes = demand.at(ss);
        Micros len = 0;
        if (total_need <= length)
        {
            len = airtime_for(bytes, bytes_per_us);
        }
        else
        {
            len = static_cast<Micros>(std::floor(static_cast<double>(length) * static_cast<double>(bytes)
                                                 / static_cast<double>(total_bytes)));
        }
        if (len <= 0)
            continue;
        out.push_back({ss, dir, cursor, len});
        cursor += len;
    }
}

}  // namespace

FrameMap build_frame_map(std::span<const SsDemand> demands,
                         Micros frame_len,
                         double dl_ratio,
                         double bytes_per_us,
                         const FrameMap* previous)
{
    if (frame_len <= 0)
        throw std::invalid_argument("frame length must be positive");
    if (!(dl_ratio > 0.0 && dl_ratio < 1.0))
        throw std::invalid_argument("dl_ratio must lie in (0, 1)");
    if (!(bytes_per_us > 0.0))
        throw std::invalid_argument("slot capacity must be positive");

    FrameMap map;
    map.frame_len = frame_len;
    map.dl_end = static_cast<Micros>(std::llround(static_cast<double>(frame_len) * dl_ratio));

    std::map<NodeIndex, std::uint64_t> dl;
    std::map<NodeIndex, std::uint64_t> ul;
    for (const auto& d : demands)
    {
        if (d.queued_bytes == 0)
            continue;
        (d.direction == Direction::Downlink ? dl : ul)[d.ss] += d.queued_bytes;
    }

    allocate_subframe(dl, Direction::Downlink, 0, map.dl_end, bytes_per_us, previous, map.grants);
    allocate_subframe(ul, Direction::Uplink, map.dl_end, frame_len - map.dl_end, bytes_per_us, previous,
                      map.grants);
    return map;
}

std::vector<Transmission> ss_burst(const FrameMap& map,
                                   NodeIndex ss,
                                   Micros frame_start,
                                   std::span<const RadioInterface> interfaces,
                                   NodeIndex base_station)
{
    if (ss >= interfaces.size() || interfaces[ss].kind != RadioKind::WimaxSs)
        throw LookupError("unknown subscriber station " + std::to_string(ss));
    if (base_station >= interfaces.size() || interfaces[base_station].kind != RadioKind::WimaxBs)
        throw LookupError("unknown base station " + std::to_string(base_station));

    std::vector<Transmission> bursts;
    for (const auto& g : map.grants_for(ss))
    {
        const bool down = g.direction == Direction::Downlink;
        const auto& src = interfaces[down ? base_station : ss];
        Transmission tx;
        tx.source = src.index;
        tx.dest = down ? ss : base_station;
        tx.kind = FrameKind::WimaxBurst;
        tx.start = frame_start + g.offset;
        tx.airtime = g.length;
        tx.power_dbm = src.tx_power_dbm;
        tx.channel_mhz = src.channel_mhz;
        bursts.push_back(tx);
    }
    return bursts;
}

}  // namespace coexsim::wimax
