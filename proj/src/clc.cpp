#include "coexsim/clc.hpp"

#include <algorithm>

namespace coexsim::clc {

std::string_view to_string(ClcState state)
{
    switch (state)
    {
        case ClcState::S: return "S";
        case ClcState::Rx: return "Rx";
        case ClcState::Tx: return "Tx";
    }
    return "?";
}

void GrantLedger::register_interface(NodeIndex iface)
{
    granted_.try_emplace(iface, ClcState::S);
}

ClcState GrantLedger::granted(NodeIndex iface) const
{
    auto it = granted_.find(iface);
    if (it == granted_.end())
        throw RegistrationError("interface " + std::to_string(iface) + " is not registered");
    return it->second;
}

ClcState GrantLedger::state() const
{
    if (tx_count_ > 0)
        return ClcState::Tx;
    if (rx_count_ > 0)
        return ClcState::Rx;
    return ClcState::S;
}

void GrantLedger::set(NodeIndex iface, ClcState state)
{
    auto it = granted_.find(iface);
    if (it == granted_.end())
        throw RegistrationError("interface " + std::to_string(iface) + " is not registered");
    if (it->second == ClcState::Rx)
        --rx_count_;
    else if (it->second == ClcState::Tx)
        --tx_count_;
    it->second = state;
    if (state == ClcState::Rx)
        ++rx_count_;
    else if (state == ClcState::Tx)
        ++tx_count_;
}

std::optional<ClcState> transition(ClcState current, ClcState requested)
{
    //          req S   req Rx  req Tx
    // S        S       Rx      Tx
    // Rx       S       Rx      X
    // Tx       S       X       Tx
    if (current == ClcState::Rx && requested == ClcState::Tx)
        return std::nullopt;
    if (current == ClcState::Tx && requested == ClcState::Rx)
        return std::nullopt;
    return requested;
}

RequestResult request(const GrantLedger& ledger, const InterfaceRequest& req)
{
    if (!ledger.registered(req.interface))
        throw RegistrationError("interface " + std::to_string(req.interface) + " is not registered");

    if (!transition(ledger.state(), req.desired))
        return {Decision::Deny, ledger};

    RequestResult result{Decision::Grant, ledger};
    result.ledger.set(req.interface, req.desired);
    return result;
}

ClcState release_all_check(const GrantLedger& ledger)
{
    return ledger.state();
}

Verdict schedule_aware_check(const InterfaceRequest& req,
                             const wimax::FrameMap& map,
                             Micros frame_start,
                             NodeIndex colocated_ss)
{
    if (!req.span || req.desired == ClcState::S)
        return Verdict::Allow;
    for (const auto& g : map.grants_for(colocated_ss))
    {
        const Micros begin = frame_start + g.offset;
        const Micros end = begin + g.length;
        if (!(req.span->begin < end && begin < req.span->end))
            continue;
        const bool wimax_receiving = g.direction == Direction::Downlink;
        if (req.desired == ClcState::Tx && wimax_receiving)
            return Verdict::Deny;
        if (req.desired == ClcState::Rx && !wimax_receiving)
            return Verdict::Deny;
    }
    return Verdict::Allow;
}

const InterfaceRequest& priority_resolve(std::span<const InterfaceRequest> contenders)
{
    if (contenders.empty())
        throw std::domain_error("priority_resolve needs at least one contender");
    auto better = [](const InterfaceRequest& a, const InterfaceRequest& b) {
        if (a.priority != b.priority)
            return a.priority > b.priority;
        const bool a_wimax = is_wimax(a.kind);
        const bool b_wimax = is_wimax(b.kind);
        if (a_wimax != b_wimax)
            return a_wimax;
        return a.interface < b.interface;
    };
    const InterfaceRequest* best = &contenders.front();
    for (const auto& c : contenders.subspan(1))
    {
        if (better(c, *best))
            best = &c;
    }
    return *best;
}

}  // namespace coexsim::clc
