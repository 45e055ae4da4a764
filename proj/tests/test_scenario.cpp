#include "coexsim/scenario.hpp"

#include <doctest.h>

#include <algorithm>

using namespace coexsim;

namespace {

const std::string kDir = COEXSIM_SCENARIO_DIR;

bool has_issue(const ValidationError& e, std::string_view path)
{
    return std::any_of(e.issues().begin(), e.issues().end(), [&](const ValidationIssue& i) { return i.path == path; });
}

std::vector<ValidationIssue> issues_of(std::string_view text)
{
    try
    {
        parse_scenario(text);
    }
    catch (const ValidationError& e)
    {
        return e.issues();
    }
    return {};
}

bool flags(std::string_view text, std::string_view path)
{
    const auto issues = issues_of(text);
    return std::any_of(issues.begin(), issues.end(), [&](const ValidationIssue& i) { return i.path == path; });
}

const char* kMinimal = R"({"nodes": [
  {"id": "a", "kind": "wifi", "position": [0, 0], "traffic": {"type": "saturated", "dest": "b"}},
  {"id": "b", "kind": "wifi", "position": [5, 0]}
]})";

}  // namespace

TEST_CASE("canonical emulation scenario")
{
    const auto cfg = load_scenario(kDir + "/emulation.json");
    const auto* coord = cfg.find("coordinator");
    const auto* n2 = cfg.find("node2");
    const auto* n3 = cfg.find("node3");
    REQUIRE(coord);
    REQUIRE(n2);
    REQUIRE(n3);
    CHECK(coord->kind == RadioKind::Coordinator);
    CHECK(coord->tx_power_dbm == 1.0);
    CHECK(distance(coord->position, n2->position) == doctest::Approx(3.0));
    CHECK(distance(coord->position, n3->position) == doctest::Approx(40.0));
    CHECK(cfg.medium.path_loss.kind == medium::PathLossKind::LogDistance);
    CHECK(cfg.medium.path_loss.exponent == 3.0);
    REQUIRE(coord->cts_schedule.size() == 1);
}

TEST_CASE("every shipped scenario parses and round-trips")
{
    for (const char* name : {"emulation", "conference-room", "colocated", "coexistence", "no-interferer"})
    {
        CAPTURE(name);
        const auto cfg = load_scenario(kDir + "/" + name + ".json");
        CHECK(cfg.name == name);
        const auto again = parse_scenario(emit_scenario(cfg));
        CHECK(again == cfg);
        CHECK(emit_scenario(again) == emit_scenario(cfg));
    }
}

TEST_CASE("defaults apply to omitted fields")
{
    const auto cfg = parse_scenario(kMinimal);
    CHECK(cfg.duration_us == 30'000'000);
    CHECK(cfg.warmup_us == 1'000'000);
    CHECK(cfg.dcf == wifi::DcfParams{});
    CHECK(cfg.medium.sinr_threshold_db == 10.0);
    CHECK(cfg.nodes[0].traffic.type == TrafficSpec::Type::Saturated);
    CHECK(cfg.nodes[0].traffic.frame_bytes == 1500);
    CHECK_FALSE(cfg.afr.enabled);
    CHECK_FALSE(cfg.clc.enabled);
}

TEST_CASE("calibration presets")
{
    const auto intel = parse_scenario(R"({"medium": {"calibration": "intel"}, "nodes": []})");
    CHECK(intel.medium.spillage == medium::SpillageTable::intel_calibration());
    const auto custom = parse_scenario(
        R"({"medium": {"spillage": [{"separation_mhz": 10, "rejection_db": 20}, {"separation_mhz": 50, "rejection_db": 45}]}, "nodes": []})");
    CHECK(custom.medium.spillage.rejection_db(30.0) == doctest::Approx(32.5));
    CHECK(flags(R"({"medium": {"calibration": "lab"}, "nodes": []})", "medium.calibration"));
    CHECK(flags(R"({"medium": {"spillage": [{"separation_mhz": 10, "rejection_db": 50}, {"separation_mhz": 50, "rejection_db": 45}]}, "nodes": []})",
                "medium.spillage"));
}

TEST_CASE("unknown keys are reported with their path")
{
    CHECK(flags(R"({"nodes": [], "durration_us": 5})", "durration_us"));
    CHECK(flags(R"({"nodes": [], "afr": {"enabled": true, "gaurd_us": 1}})", "afr.gaurd_us"));
    CHECK(flags(R"({"nodes": [{"id": "a", "kind": "wifi", "position": [0,0], "power": 3}]})", "nodes[0].power"));
    CHECK(flags(R"({"nodes": [{"id": "a", "kind": "wifi", "position": [0,0], "traffic": {"type": "cbr", "rate": 1}}]})",
                "nodes[0].traffic.rate"));
}

TEST_CASE("type and range errors")
{
    CHECK(flags(R"({"nodes": [], "duration_us": "long"})", "duration_us"));
    CHECK(flags(R"({"nodes": [], "duration_us": 0})", "duration_us"));
    CHECK(flags(R"({"nodes": [], "seed": -1})", "seed"));
    CHECK(flags(R"({"nodes": [{"id": "a", "kind": "wifi", "position": [0]}]})", "nodes[0].position"));
    CHECK(flags(R"({"nodes": [{"id": "a", "kind": "toaster", "position": [0, 0]}]})", "nodes[0].kind"));
    CHECK(flags(R"({"nodes": [{"id": "a", "kind": "wifi", "position": [0, 0], "channel_mhz": 900}]})", "nodes[0].channel_mhz"));
    CHECK(flags(R"({"nodes": [{"id": "a", "kind": "wifi", "position": [0, 0], "tx_power_dbm": 90}]})", "nodes[0].tx_power_dbm"));
    CHECK(flags(R"({"wimax": {"dl_ratio": 1.2}, "nodes": []})", "wimax.dl_ratio"));
    CHECK(flags(R"({})", "nodes"));
    CHECK(flags(R"({"nodes": [], "medium": {"path_loss": {"model": "two-ray"}}})", "medium.path_loss.model"));
}

TEST_CASE("reference errors")
{
    CHECK(flags(R"({"nodes": [{"id": "a", "kind": "wifi", "position": [0,0]}, {"id": "a", "kind": "wifi", "position": [1,0]}]})",
                "nodes[1].id"));
    CHECK(flags(R"({"nodes": [{"id": "a", "kind": "wifi", "position": [0,0], "collocated_with": "ghost"}]})",
                "nodes[0].collocated_with"));
    CHECK(flags(R"({"nodes": [{"id": "s", "kind": "wimax_ss", "position": [0,0]}]})", "nodes[0].base_station"));
    CHECK(flags(R"({"nodes": [{"id": "w", "kind": "wifi", "position": [0,0]}, {"id": "s", "kind": "wimax_ss", "position": [0,0], "base_station": "w"}]})",
                "nodes[1].base_station"));
    CHECK(flags(R"({"nodes": [{"id": "a", "kind": "wifi", "position": [0,0], "traffic": {"type": "saturated", "dest": "nobody"}}]})",
                "nodes[0].traffic.dest"));
    CHECK(flags(R"({"nodes": [{"id": "a", "kind": "wifi", "position": [0,0], "traffic": {"type": "cbr", "dest": "a"}}]})",
                "nodes[0].traffic.dest"));
}

TEST_CASE("malformed text and missing files")
{
    const auto issues = issues_of("{ not json");
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].message.find("malformed JSON") != std::string::npos);
    CHECK_THROWS_AS(load_scenario(kDir + "/does-not-exist.json"), ValidationError);
}

TEST_CASE("every problem is reported at once")
{
    try
    {
        parse_scenario(R"({"nodes": [], "duration_us": -5, "wimax": {"dl_ratio": 3}})");
        FAIL("expected a validation error");
    }
    catch (const ValidationError& e)
    {
        CHECK(has_issue(e, "duration_us"));
        CHECK(has_issue(e, "wimax.dl_ratio"));
    }
}

TEST_CASE("separate platforms may not share a position")
{
    const std::string text = R"({"nodes": [
        {"id": "a", "kind": "wifi", "position": [1, 1]},
        {"id": "b", "kind": "wifi", "position": [1, 1]}]})";
    try
    {
        parse_scenario(text);
        FAIL("expected a validation error");
    }
    catch (const ValidationError& e)
    {
        REQUIRE(e.issues().size() == 1);
        CHECK(e.issues()[0].path == "nodes[1].position");
    }
    const std::string shared = R"({"nodes": [
        {"id": "a", "kind": "wifi", "position": [1, 1]},
        {"id": "b", "kind": "wifi", "position": [1, 1], "collocated_with": "a"}]})";
    CHECK_NOTHROW(parse_scenario(shared));
}
