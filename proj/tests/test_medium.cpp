#include "coexsim/medium.hpp"
#include "coexsim/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace coexsim;
using namespace coexsim::medium;

namespace {

RadioInterface iface(NodeIndex i, RadioKind kind, double x, double y, double ch = 2412.0)
{
    RadioInterface r;
    r.index = i;
    r.id = "n" + std::to_string(i);
    r.kind = kind;
    r.position = {x, y};
    r.channel_mhz = ch;
    r.tx_power_dbm = 20.0;
    r.platform = i;
    return r;
}

Transmission frame(std::uint64_t id, NodeIndex src, NodeIndex dst, Micros start, Micros airtime, double power = 20.0,
                   double ch = 2412.0, FrameKind kind = FrameKind::Data)
{
    Transmission t;
    t.id = id;
    t.source = src;
    t.dest = dst;
    t.kind = kind;
    t.start = start;
    t.airtime = airtime;
    t.power_dbm = power;
    t.channel_mhz = ch;
    return t;
}

}  // namespace

TEST_CASE("free-space loss matches the Friis relation")
{
    const auto fs = PathLossModel::free_space(2400.0);
    CHECK(std::abs(path_loss(7.0, fs) - 57.0) <= 0.5);
    CHECK(std::abs(path_loss(1.0, fs) - 40.05) <= 0.01);
    for (double d : {1.0, 2.5, 7.0, 33.0, 410.0})
        CHECK(path_loss(d, fs) == doctest::Approx(oracle::friis_loss_db(d, 2400.0)).epsilon(1e-4));
}

TEST_CASE("log-distance loss")
{
    const auto ld = PathLossModel::log_distance(3.0, 40.05);
    CHECK(path_loss(1.0, ld) == doctest::Approx(40.05));
    CHECK(path_loss(1.0, PathLossModel::log_distance(4.5, 40.05)) == doctest::Approx(40.05));
    for (double d : {1.0, 3.0, 40.0, 150.0})
        CHECK(path_loss(d, ld) == doctest::Approx(oracle::log_distance_db(d, 40.05, 3.0)));
    // 1 dBm at 40 m lands below the -82 dBm carrier-sense threshold.
    CHECK(std::abs(1.0 - path_loss(40.0, ld) - -87.1) <= 0.05);
}

TEST_CASE("sub-metre distances clamp to the 1 m value; non-positive ones are rejected")
{
    const auto fs = PathLossModel::free_space(2400.0);
    CHECK(path_loss(0.25, fs) == doctest::Approx(path_loss(1.0, fs)));
    CHECK_THROWS_AS(path_loss(0.0, fs), DomainError);
    CHECK_THROWS_AS(path_loss(-3.0, fs), DomainError);
}

TEST_CASE("path loss is strictly increasing from 1 m")
{
    Rng rng(7);
    for (const auto& model : {PathLossModel::free_space(2400.0), PathLossModel::log_distance(3.0, 40.05),
                              PathLossModel::log_distance(2.0, 30.0)})
    {
        double prev = path_loss(1.0, model);
        double d = 1.0;
        for (int i = 0; i < 500; ++i)
        {
            d += 0.01 + static_cast<double>(rng.uniform(1000)) / 100.0;
            const double l = path_loss(d, model);
            CHECK(l > prev);
            prev = l;
        }
    }
}

TEST_CASE("distance_for_loss inverts path_loss")
{
    const auto ld = PathLossModel::log_distance(3.0, 40.05);
    for (double d : {1.0, 3.0, 12.9, 100.0})
        CHECK(distance_for_loss(path_loss(d, ld), ld) == doctest::Approx(d));
    CHECK(distance_for_loss(10.0, ld) == doctest::Approx(1.0));
}

TEST_CASE("model validation")
{
    CHECK_THROWS(PathLossModel::log_distance(1.5, 40.0).validate());
    CHECK_THROWS(PathLossModel::log_distance(3.0, 0.0).validate());
    CHECK_NOTHROW(PathLossModel::free_space(2400.0).validate());
}

TEST_CASE("spillage table interpolation")
{
    const auto table = SpillageTable::default_calibration();
    const auto knots = oracle::knots_of(table);
    CHECK(table.rejection_db(0.0) == 0.0);
    CHECK(table.rejection_db(32.0) == doctest::Approx(41.0));
    CHECK(table.rejection_db(114.0) == doctest::Approx(55.0));
    CHECK(table.rejection_db(5.0) == doctest::Approx(41.0));
    CHECK(table.rejection_db(500.0) == doctest::Approx(55.0));
    for (double s : {1.0, 20.0, 32.0, 50.0, 73.0, 100.0, 114.0, 300.0})
    {
        CHECK(table.rejection_db(s) == doctest::Approx(oracle::rejection_db(knots, s)));
        CHECK(table.rejection_db(-s) == doctest::Approx(table.rejection_db(s)));
    }
    CHECK_THROWS(SpillageTable(std::vector<SpillageEntry>{}));
    CHECK_THROWS(SpillageTable(std::vector<SpillageEntry>{{32.0, 50.0}, {114.0, 40.0}}));
    CHECK_THROWS(SpillageTable(std::vector<SpillageEntry>{{32.0, -1.0}}));
}

TEST_CASE("received power reproduces the measured spillage levels")
{
    const auto fs = PathLossModel::free_space(2400.0);
    const auto table = SpillageTable::default_calibration();
    const Position a{0, 0};
    const Position b{1, 0};
    CHECK(std::abs(received_power(20.0, a, b, 2412.0, 2380.0, fs, table) - -61.0) <= 0.5);
    CHECK(std::abs(received_power(20.0, a, b, 2462.0, 2576.0, fs, table) - -75.0) <= 0.5);
    CHECK(std::abs(received_power(20.0, a, b, 2412.0, 2412.0, fs, table) - -20.05) <= 0.01);
}

TEST_CASE("channel separation never raises received power")
{
    Rng rng(11);
    const auto ld = PathLossModel::log_distance(3.0, 40.05);
    const auto table = SpillageTable::default_calibration();
    for (int i = 0; i < 300; ++i)
    {
        const Position a{0, 0};
        const Position b{static_cast<double>(rng.uniform(200)), static_cast<double>(rng.uniform(200))};
        const double sep = static_cast<double>(rng.uniform(300));
        const double co = received_power(10.0, a, b, 2412.0, 2412.0, ld, table);
        CHECK(received_power(10.0, a, b, 2412.0, 2412.0 + sep, ld, table) <= co);
    }
}

TEST_CASE("co-located coupling replaces path loss")
{
    MediumConfig cfg;
    const auto table = SpillageTable::default_calibration();
    CHECK(received_power_colocated(20.0, 20.0, 2412.0, 2380.0, table) == doctest::Approx(20.0 - 20.0 - 41.0));
    auto wifi = iface(0, RadioKind::Wifi, 0, 0, 2412.0);
    auto ss = iface(1, RadioKind::WimaxSs, 0, 0, 2380.0);
    ss.platform = 0;
    const auto tx = frame(1, 0, kNoNode, 0, 100);
    CHECK(rx_power_at(tx, wifi, ss, cfg) == doctest::Approx(-41.0));
}

TEST_CASE("required isolation")
{
    CHECK(required_isolation(-61.0, -118.0) == doctest::Approx(57.0));
    CHECK(required_isolation(-75.0, -118.0) == doctest::Approx(43.0));
    CHECK(required_isolation(-90.0, -90.0) == 0.0);
}

TEST_CASE("resolve_deliveries basic outcomes")
{
    MediumConfig cfg;
    std::vector<RadioInterface> ifaces{iface(0, RadioKind::Wifi, 0, 0), iface(1, RadioKind::Wifi, 5, 0),
                                       iface(2, RadioKind::Wifi, 10, 0), iface(3, RadioKind::Wifi, 5000, 0)};

    SUBCASE("lone frame in range decodes")
    {
        const std::vector<Transmission> active{frame(1, 0, 1, 0, 500)};
        const auto out = resolve_deliveries(active, ifaces, cfg);
        REQUIRE(out.size() == 1);
        CHECK(out[0].result == DeliveryResult::Decoded);
    }
    SUBCASE("out of range is below sensitivity")
    {
        const std::vector<Transmission> active{frame(1, 0, 3, 0, 500)};
        CHECK(resolve_deliveries(active, ifaces, cfg)[0].result == DeliveryResult::BelowSensitivity);
    }
    SUBCASE("equal simultaneous frames corrupt each other")
    {
        // Receiver 1 sits midway between 0 and 2.
        const std::vector<Transmission> active{frame(1, 0, 1, 0, 500), frame(2, 2, 1, 0, 500)};
        for (const auto& o : resolve_deliveries(active, ifaces, cfg))
            CHECK(o.result == DeliveryResult::Corrupted);
    }
    SUBCASE("touching intervals do not overlap")
    {
        const std::vector<Transmission> active{frame(1, 0, 1, 0, 500), frame(2, 2, 1, 500, 500)};
        for (const auto& o : resolve_deliveries(active, ifaces, cfg))
            CHECK(o.result == DeliveryResult::Decoded);
    }
    SUBCASE("a receiver that transmits cannot decode")
    {
        const std::vector<Transmission> active{frame(1, 0, 1, 0, 500), frame(2, 1, 2, 499, 10)};
        const auto out = resolve_deliveries(active, ifaces, cfg);
        CHECK(out[0].result == DeliveryResult::Corrupted);
    }
    SUBCASE("broadcast CTS reaches every other WiFi interface")
    {
        auto cts = frame(1, 0, kNoNode, 0, 44, 20.0, 2412.0, FrameKind::Cts);
        const std::vector<Transmission> active{cts};
        const auto out = resolve_deliveries(active, ifaces, cfg);
        CHECK(out.size() == 3);
    }
}

TEST_CASE("WiFi spillage corrupts a WiMAX burst at a nearby subscriber")
{
    MediumConfig cfg;
    std::vector<RadioInterface> ifaces{iface(0, RadioKind::WimaxBs, 150, 0, 2380.0),
                                       iface(1, RadioKind::WimaxSs, 0, 0, 2380.0),
                                       iface(2, RadioKind::Wifi, 1.5, 0, 2412.0), iface(3, RadioKind::Wifi, 1.5, 8, 2412.0)};
    auto burst = frame(1, 0, 1, 0, 3000, 43.0, 2380.0, FrameKind::WimaxBurst);
    auto data = frame(2, 2, 3, 1000, 2020, 20.0, 2412.0);
    {
        const std::vector<Transmission> alone{burst};
        CHECK(resolve_deliveries(alone, ifaces, cfg)[0].result == DeliveryResult::Decoded);
    }
    const std::vector<Transmission> both{burst, data};
    const auto out = resolve_deliveries(both, ifaces, cfg);
    CHECK(out[0].result == DeliveryResult::Corrupted);
    CHECK(out[1].result == DeliveryResult::Decoded);
}

TEST_CASE("resolve_deliveries agrees with the per-microsecond oracle")
{
    Rng rng(2024);
    MediumConfig cfg;
    const double channels[] = {2380.0, 2412.0, 2437.0, 2462.0};
    int mismatches = 0;
    for (int instance = 0; instance < 300; ++instance)
    {
        std::vector<RadioInterface> ifaces;
        const std::size_t n = 5;
        for (std::size_t i = 0; i < n; ++i)
        {
            const auto kind = rng.uniform(3) == 0 ? RadioKind::WimaxSs : RadioKind::Wifi;
            ifaces.push_back(iface(i, kind, static_cast<double>(rng.uniform(60)), static_cast<double>(rng.uniform(60)),
                                   channels[rng.uniform(3)]));
        }
        if (rng.uniform(1) == 1)
            ifaces[1].platform = ifaces[0].platform;

        std::vector<Transmission> active;
        const std::size_t count = 1 + rng.uniform(3);
        std::vector<NodeIndex> used;
        for (std::size_t k = 0; k < count; ++k)
        {
            NodeIndex src = rng.uniform(n - 1);
            NodeIndex dst = rng.uniform(n - 1);
            if (dst == src)
                dst = (src + 1) % n;
            const bool bcast = rng.uniform(4) == 0;
            auto t = frame(k + 1, src, bcast ? kNoNode : dst, static_cast<Micros>(rng.uniform(300)),
                           1 + static_cast<Micros>(rng.uniform(300)), -10.0 + static_cast<double>(rng.uniform(30)),
                           ifaces[src].channel_mhz, bcast ? FrameKind::Cts : FrameKind::Data);
            if (is_wimax(ifaces[src].kind))
                t.kind = FrameKind::WimaxBurst;
            if (bcast && is_wimax(ifaces[src].kind))
                t.dest = dst;
            active.push_back(t);
        }
        const auto got = resolve_deliveries(active, ifaces, cfg);
        const auto want = oracle::brute_force_deliveries(active, ifaces, cfg);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i)
        {
            if (got[i].transmission != want[i].tx || got[i].receiver != want[i].receiver || got[i].result != want[i].result)
                ++mismatches;
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("every addressed frame yields exactly one outcome per receiver")
{
    MediumConfig cfg;
    std::vector<RadioInterface> ifaces{iface(0, RadioKind::Wifi, 0, 0), iface(1, RadioKind::Wifi, 5, 0),
                                       iface(2, RadioKind::Wifi, 10, 0)};
    const std::vector<Transmission> active{frame(1, 0, 1, 0, 100), frame(2, 2, kNoNode, 50, 44, 20.0, 2412.0, FrameKind::Cts)};
    const auto out = resolve_deliveries(active, ifaces, cfg);
    CHECK(out.size() == 3);
    CHECK(out == resolve_deliveries(active, ifaces, cfg));
}
