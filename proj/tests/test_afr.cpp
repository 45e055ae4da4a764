#include "coexsim/afr.hpp"
#include "coexsim/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace coexsim;
using namespace coexsim::afr;

namespace {

FrsContext context()
{
    FrsContext ctx;
    ctx.source = 4;
    ctx.channel_mhz = 2412.0;
    return ctx;
}

}  // namespace

TEST_CASE("single chunk below the NAV cap")
{
    const auto frames = emit_frs(10000, 5.0, 1000, context());
    REQUIRE(frames.size() == 1);
    CHECK(frames[0].nav_duration == 10000);
    CHECK(frames[0].start == 1000);
    CHECK(frames[0].kind == FrameKind::Cts);
    CHECK(frames[0].broadcast());
    CHECK(frames[0].power_dbm == 5.0);
    CHECK(frames[0].source == 4);
}

TEST_CASE("long reservations are chunked at the cap")
{
    CHECK(chunk_reservation(50000) == std::vector<Micros>{32767, 17233});
    const auto frames = emit_frs(50000, 0.0, 0, context());
    REQUIRE(frames.size() == 2);
    CHECK(frames[0].nav_duration == 32767);
    CHECK(frames[1].nav_duration == 17233);
    // The second chunk ends exactly when the first NAV runs out.
    CHECK(frames[1].end() == frames[0].end() + frames[0].nav_duration);
}

TEST_CASE("threshold gate")
{
    CHECK(emit_frs(1000, 0.0, 0, context()).empty());
    CHECK(emit_frs(2000, 0.0, 0, context()).size() == 1);
    auto forced = context();
    forced.allow_skip = false;
    CHECK(emit_frs(1000, 0.0, 0, forced).size() == 1);
    CHECK_THROWS_AS(emit_frs(0, 0.0, 0, context()), std::domain_error);
}

TEST_CASE("chunked NAV coverage is gapless and exact")
{
    Rng rng(77);
    for (int i = 0; i < 500; ++i)
    {
        const auto reservation = static_cast<Micros>(1 + rng.uniform(200000));
        const auto now = static_cast<Micros>(rng.uniform(1000000));
        const auto frames = emit_frs(reservation, 0.0, now, context());
        if (reservation < 2000)
        {
            CHECK(frames.empty());
            continue;
        }
        Micros sum = 0;
        Micros covered_until = now + 44;
        for (const auto& f : frames)
        {
            CHECK(f.nav_duration <= 32767);
            CHECK(f.nav_duration > 0);
            CHECK(f.end() <= covered_until);
            covered_until = f.end() + f.nav_duration;
            sum += f.nav_duration;
        }
        CHECK(sum == reservation);
        CHECK(covered_until == now + 44 + reservation);
    }
}

TEST_CASE("interferer estimate")
{
    const auto ld = medium::PathLossModel::log_distance(3.0, 40.05);
    const std::vector<NodeIndex> self{0, 1};

    CHECK(estimate_interferers({}, 1000000, 5000000, self, 20.0, ld) == InterfererEstimate{0, 0.0});

    const std::vector<OverheardFrame> heard{{5, -50.0, 4500000}, {6, -53.4, 4600000}, {5, -40.0, 4700000},
                                            {1, -99.0, 4800000}, {7, -90.0, 3000000}};
    const auto e = estimate_interferers(heard, 1000000, 5000000, self, 20.0, ld);
    CHECK(e.active_systems == 2);
    // 73.4 dB of loss under n = 3 from 40.05 dB at 1 m.
    const double expected = std::pow(10.0, (20.0 + 53.4 - 40.05) / 30.0);
    CHECK(e.max_distance_m == doctest::Approx(expected));
    CHECK(e.max_distance_m == doctest::Approx(12.9).epsilon(0.01));

    // -53.4 dBm corresponds to roughly 3 m for a 1 dBm transmitter.
    const auto low_power = estimate_interferers(heard, 1000000, 5000000, self, 1.0, ld);
    CHECK(low_power.max_distance_m == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("utilization goal and interval adaptation")
{
    AfrParams p;
    DmaState s;
    s.claim_interval = 8000;

    auto next = dma_update(s, {2, 3.0}, 0.20, 0, p);
    CHECK(next.utilization_goal == doctest::Approx(1.0 / 3.0));
    CHECK(next.claim_interval == 4000);

    next = dma_update(s, {2, 3.0}, 0.50, 0, p);
    CHECK(next.claim_interval == 16000);

    next = dma_update(s, {2, 3.0}, 0.34, 0, p);
    CHECK(next.claim_interval == 8000);

    next = dma_update(s, {0, 0.0}, 0.5, 0, p);
    CHECK(next.utilization_goal == 1.0);
    CHECK(next.claim_interval == 4000);

    CHECK_THROWS_AS(dma_update(s, {}, 1.5, 0, p), std::domain_error);
    CHECK_THROWS_AS(dma_update(s, {}, -0.1, 0, p), std::domain_error);
}

TEST_CASE("claim interval stays within its bounds for any input sequence")
{
    Rng rng(4);
    AfrParams p;
    DmaState s;
    for (int i = 0; i < 2000; ++i)
    {
        const InterfererEstimate e{rng.uniform(4), 1.0};
        s = dma_update(s, e, static_cast<double>(rng.uniform(1000)) / 1000.0, i, p);
        CHECK(s.claim_interval >= p.interval_min);
        CHECK(s.claim_interval <= p.interval_max);
        CHECK(s.utilization_goal > 0.0);
        CHECK(s.utilization_goal <= 1.0);
    }
}

TEST_CASE("CTS power sizing")
{
    const auto ld = medium::PathLossModel::log_distance(3.0, 40.05);
    CHECK(acp_power(3.0, -82.0, ld, 3.0) == doctest::Approx(-82.0 + 40.05 + 30.0 * std::log10(3.0) + 3.0));
    CHECK(acp_power(3.0, -82.0, ld, 3.0) == doctest::Approx(-24.6).epsilon(0.01));
    CHECK(acp_power(0.0, -82.0, ld, 3.0) == -30.0);
    CHECK(acp_power(1000.0, -82.0, ld, 3.0) == 20.0);
    CHECK_THROWS(acp_power(-1.0, -82.0, ld, 3.0));

    double prev = acp_power(0.0, -82.0, ld, 3.0);
    for (double r = 0.5; r < 500.0; r *= 1.3)
    {
        const double p = acp_power(r, -82.0, ld, 3.0);
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("performance evaluation turns CTS on and off")
{
    AfrParams p;
    DpeState s;

    SUBCASE("no retransmissions keep CTS off")
    {
        for (Micros t = 100000; t < 5000000; t += 100000)
        {
            s = dpe_tick(s, {0, 1000.0, 0.0}, t, p);
            CHECK_FALSE(s.cts_enabled);
        }
    }
    SUBCASE("enough retransmissions turn it on")
    {
        s = dpe_tick(s, {5, 1000000.0, 0.0}, 100000, p);
        CHECK(s.cts_enabled);
        CHECK(s.throughput_before == 1000000.0);
    }
    SUBCASE("no improvement turns it off and holds")
    {
        s = dpe_tick(s, {5, 1000000.0, 0.0}, 100000, p);
        s = dpe_tick(s, {0, 950000.0, 0.0}, 600000, p);
        CHECK(s.cts_enabled);  // evaluation window not over yet
        s = dpe_tick(s, {0, 900000.0, 0.0}, 1100000, p);
        CHECK_FALSE(s.cts_enabled);
        CHECK(s.hold_until == 3100000);
        s = dpe_tick(s, {9, 900000.0, 0.0}, 2000000, p);
        CHECK_FALSE(s.cts_enabled);
        s = dpe_tick(s, {9, 900000.0, 0.0}, 3100000, p);
        CHECK(s.cts_enabled);
    }
    SUBCASE("improvement keeps it on")
    {
        s = dpe_tick(s, {5, 100.0, 0.0}, 100000, p);
        s = dpe_tick(s, {0, 500.0, 0.0}, 1100000, p);
        CHECK(s.cts_enabled);
        s = dpe_tick(s, {0, 10.0, 0.0}, 2100000, p);
        CHECK(s.cts_enabled);
    }
}

TEST_CASE("QoS violations grow the reservation up to a cap")
{
    AfrParams p;
    DpeState s;
    s.qos = QosTarget{1000.0, 5000.0};
    s = dpe_tick(s, {0, 2000.0, 1000.0}, 100000, p);
    CHECK_FALSE(s.qos_violated);
    CHECK(s.reservation_growth == 1.0);
    for (int i = 0; i < 10; ++i)
        s = dpe_tick(s, {0, 500.0, 1000.0}, 200000 + i * 100000, p);
    CHECK(s.qos_violated);
    CHECK(s.reservation_growth == doctest::Approx(2.0));
}
