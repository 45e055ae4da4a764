#pragma once

#include "coexsim/types.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace coexsim::wimax {

class LookupError : public std::out_of_range
{
public:
    using std::out_of_range::out_of_range;
};

struct Grant
{
    NodeIndex ss = kNoNode;
    Direction direction = Direction::Downlink;
    Micros offset = 0;
    Micros length = 0;

    Micros end() const { return offset + length; }
    bool operator==(const Grant&) const = default;
};

/// TDM frame layout: DL subframe [0, dl_end), UL subframe [dl_end, frame_len).
struct FrameMap
{
    Micros frame_len = 0;
    Micros dl_end = 0;
    std::vector<Grant> grants;

    /// Grants of one subscriber, in frame order.
    std::vector<Grant> grants_for(NodeIndex ss) const;
    /// Checks the layout invariants (ordered, disjoint, in the right subframe).
    bool well_formed() const;

    bool operator==(const FrameMap&) const = default;
};

struct SsDemand
{
    NodeIndex ss = kNoNode;
    std::uint64_t queued_bytes = 0;
    Direction direction = Direction::Downlink;
};

struct WimaxParams
{
    Micros frame_len = 5000;
    double dl_ratio = 0.6;
    /// Slot capacity of the abstracted PHY.
    double bytes_per_us = 1.5;

    bool operator==(const WimaxParams&) const = default;
};

/// Time a subscriber needs to move `bytes`, rounded up to whole µs.
Micros airtime_for(std::uint64_t bytes, double bytes_per_us);
std::uint64_t capacity_of(Micros length, double bytes_per_us);

/// Allocates each subframe among the subscribers with demand in it. When
/// the demand fits, everyone gets what they need; otherwise the subframe
/// is split proportionally to queued bytes. Grants are packed from the
/// subframe start in ascending subscriber order, except that subscribers
/// holding grants in `previous` keep their relative order there.
FrameMap build_frame_map(std::span<const SsDemand> demands,
                         Micros frame_len,
                         double dl_ratio,
                         double bytes_per_us,
                         const FrameMap* previous = nullptr);

/// Bursts implied by `ss`'s grants in a frame starting at `frame_start`:
/// DL bursts leave the base station addressed to `ss`, UL bursts leave
/// `ss` addressed to the base station. Throws LookupError when `ss` is not
/// a subscriber interface.
std::vector<Transmission> ss_burst(const FrameMap& map,
                                   NodeIndex ss,
                                   Micros frame_start,
                                   std::span<const RadioInterface> interfaces,
                                   NodeIndex base_station);

}  // namespace coexsim::wimax
