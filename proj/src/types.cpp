#include "coexsim/types.hpp"

#include <cmath>
#include <numeric>

namespace coexsim {

double distance(const Position& a, const Position& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

bool is_wifi(RadioKind kind)
{
    return kind == RadioKind::Wifi || kind == RadioKind::Coordinator;
}

bool is_wimax(RadioKind kind)
{
    return kind == RadioKind::WimaxBs || kind == RadioKind::WimaxSs;
}

std::string_view to_string(RadioKind kind)
{
    switch (kind)
    {
        case RadioKind::Wifi: return "wifi";
        case RadioKind::Coordinator: return "coordinator";
        case RadioKind::WimaxBs: return "wimax_bs";
        case RadioKind::WimaxSs: return "wimax_ss";
    }
    return "?";
}

std::optional<RadioKind> radio_kind_from_string(std::string_view text)
{
    for (auto kind : {RadioKind::Wifi, RadioKind::Coordinator, RadioKind::WimaxBs, RadioKind::WimaxSs})
    {
        if (to_string(kind) == text)
            return kind;
    }
    return std::nullopt;
}

std::string_view to_string(FrameKind kind)
{
    switch (kind)
    {
        case FrameKind::Data: return "DATA";
        case FrameKind::Cts: return "CTS";
        case FrameKind::Ack: return "ACK";
        case FrameKind::WimaxBurst: return "WIMAX-BURST";
    }
    return "?";
}

std::string_view to_string(Direction dir)
{
    return dir == Direction::Downlink ? "DL" : "UL";
}

double LinkStats::mean_delay_us() const
{
    if (delay_samples.empty())
        return 0.0;
    const double sum = std::accumulate(delay_samples.begin(), delay_samples.end(), 0.0);
    return sum / static_cast<double>(delay_samples.size());
}

}  // namespace coexsim
