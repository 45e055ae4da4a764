#pragma once

#include "coexsim/rng.hpp"
#include "coexsim/types.hpp"

#include <optional>

namespace coexsim::wifi {

struct DcfParams
{
    Micros slot = 20;
    Micros difs = 50;
    Micros sifs = 10;
    int cw_min = 15;
    int cw_max = 1023;
    int retry_limit = 7;
    Micros cts_airtime = 44;
    Micros preamble = 20;
    double phy_rate_mbps = 6.0;

    /// Preamble plus payload at the single PHY rate, rounded up to whole µs.
    Micros data_airtime(std::size_t bytes) const;

    bool operator==(const DcfParams&) const = default;
};

/// Largest value a NAV duration field can carry.
inline constexpr Micros kNavFieldCap = 32767;

struct NavState
{
    Micros expiry = 0;

    bool blocks(Micros now) const { return expiry > now; }

    /// Max rule: a NAV only ever moves forward. Returns true when it moved.
    bool extend_to(Micros new_expiry);
};

struct BackoffState
{
    int contention_window = 15;
    int pending_slots = 0;
    int retry_count = 0;
};

struct AccessDecision
{
    enum class Kind : std::uint8_t
    {
        Start,
        Defer,
    };

    Kind kind = Kind::Defer;
    /// Start: transmission start time. Defer: earliest instant worth
    /// re-checking (NAV expiry), or empty while the medium is physically busy.
    std::optional<Micros> at;

    bool starts() const { return kind == Kind::Start; }
};

enum class TxVerdict : std::uint8_t
{
    Delivered,
    Retry,
    Dropped,
};

/// Simplified 802.11 DCF state for one station: physical and virtual
/// carrier sense, slot-wise backoff with freezing, and CW/retry bookkeeping.
/// The frame queue itself belongs to the caller.
class DcfStation
{
public:
    explicit DcfStation(DcfParams params = {}, Micros now = 0);

    const DcfParams& params() const { return params_; }
    const NavState& nav() const { return nav_; }
    const BackoffState& backoff() const { return backoff_; }
    bool physically_busy() const { return phys_busy_; }

    /// Feed a frame this station decoded. Only CTS frames touch the NAV;
    /// frames below `sensitivity_dbm` are ignored. Returns true when the
    /// NAV moved.
    bool on_overheard(const Transmission& frame, double rx_power_dbm, double sensitivity_dbm, Micros now);

    void on_medium_busy(Micros now);
    void on_medium_idle(Micros now);

    /// Where the station stands at `now` given a queued frame.
    AccessDecision try_access(Micros now) const;

    /// Consumes the countdown; call when the station actually starts sending.
    void begin_transmit();

    /// After our own transmission ended: restart the idle clock if the medium is free.
    void resume_after_tx(Micros now);

    TxVerdict on_tx_outcome(bool acked, Rng& rng);

    void draw_backoff(Rng& rng);
    void set_pending_slots(int slots) { backoff_.pending_slots = slots; }

private:
    bool counting_down(Micros now) const;
    Micros effective_idle_start() const;
    void freeze(Micros now);

    DcfParams params_;
    NavState nav_;
    BackoffState backoff_;
    bool phys_busy_ = false;
    Micros idle_since_ = 0;
};

}  // namespace coexsim::wifi
