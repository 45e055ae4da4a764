#pragma once

#include "coexsim/types.hpp"
#include "coexsim/wimax_mac.hpp"

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace coexsim::clc {

/// Controller state. The numeric values follow the usual 0/1/2 encoding.
enum class ClcState : std::uint8_t
{
    S = 0,
    Rx = 1,
    Tx = 2,
};

std::string_view to_string(ClcState state);

class RegistrationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct TimeSpan
{
    Micros begin = 0;
    Micros end = 0;
};

struct InterfaceRequest
{
    NodeIndex interface = kNoNode;
    ClcState desired = ClcState::S;
    int priority = 0;
    RadioKind kind = RadioKind::Wifi;
    std::optional<TimeSpan> span;
};

/// Per-interface grants with reference counts. The controller state is
/// derived: Tx while anyone holds Tx, Rx while anyone holds Rx, else S.
class GrantLedger
{
public:
    void register_interface(NodeIndex iface);
    bool registered(NodeIndex iface) const { return granted_.contains(iface); }

    ClcState granted(NodeIndex iface) const;
    std::size_t rx_count() const { return rx_count_; }
    std::size_t tx_count() const { return tx_count_; }
    ClcState state() const;

    /// Records `state` as the interface's hold. No policy checks.
    void set(NodeIndex iface, ClcState state);

    bool operator==(const GrantLedger&) const = default;

private:
    std::map<NodeIndex, ClcState> granted_;
    std::size_t rx_count_ = 0;
    std::size_t tx_count_ = 0;
};

enum class Decision : std::uint8_t
{
    Grant,
    Deny,
};

/// The bare state transition table: next controller state, or empty for a denial.
std::optional<ClcState> transition(ClcState current, ClcState requested);

struct RequestResult
{
    Decision decision = Decision::Deny;
    GrantLedger ledger;
};

/// Applies the transition table against the ledger's derived state. A
/// denial returns the ledger untouched. Throws RegistrationError for an
/// unknown interface.
RequestResult request(const GrantLedger& ledger, const InterfaceRequest& req);

ClcState release_all_check(const GrantLedger& ledger);

enum class Verdict : std::uint8_t
{
    Allow,
    Deny,
};

/// Keeps a co-located WiFi interface off the WiMAX subscriber's scheduled
/// slots in the opposite direction: WiFi Tx against a DL (WiMAX receiving)
/// grant, WiFi Rx against a UL (WiMAX transmitting) grant.
Verdict schedule_aware_check(const InterfaceRequest& req,
                             const wimax::FrameMap& map,
                             Micros frame_start,
                             NodeIndex colocated_ss);

/// Highest priority wins; ties go to WiMAX over WiFi, then to the lowest interface index.
const InterfaceRequest& priority_resolve(std::span<const InterfaceRequest> contenders);

}  // namespace coexsim::clc
