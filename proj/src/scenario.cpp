#include "coexsim/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace coexsim {

using nlohmann::json;

std::string_view to_string(TrafficSpec::Type type)
{
    switch (type)
    {
        case TrafficSpec::Type::None: return "none";
        case TrafficSpec::Type::Saturated: return "saturated";
        case TrafficSpec::Type::Cbr: return "cbr";
    }
    return "?";
}

const NodeConfig* ScenarioConfig::find(std::string_view id) const
{
    for (const auto& n : nodes)
    {
        if (n.id == id)
            return &n;
    }
    return nullptr;
}

namespace {

std::string join_issues(const std::vector<ValidationIssue>& issues)
{
    std::ostringstream out;
    out << "invalid scenario";
    for (const auto& issue : issues)
        out << "\n  " << (issue.path.empty() ? "<root>" : issue.path) << ": " << issue.message;
    return out.str();
}

/// Walks one JSON object, remembering which keys were read so that the
/// leftovers can be reported as unknown.
class ObjectReader
{
public:
    ObjectReader(const json& obj, std::string path, std::vector<ValidationIssue>& issues)
        : obj_(obj), path_(std::move(path)), issues_(issues)
    {
        if (!obj_.is_object())
            fail(path_, "expected an object");
    }

    ~ObjectReader()
    {
        if (!obj_.is_object())
            return;
        for (const auto& [key, value] : obj_.items())
        {
            if (!seen_.contains(key))
                fail(child(key), "unknown key");
        }
    }

    ObjectReader(const ObjectReader&) = delete;
    ObjectReader& operator=(const ObjectReader&) = delete;

    std::string child(std::string_view key) const
    {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    const json* get(std::string_view key)
    {
        seen_.insert(std::string(key));
        if (!obj_.is_object())
            return nullptr;
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    template <typename T>
    void read(std::string_view key, T& out)
    {
        const json* v = get(key);
        if (!v)
            return;
        convert(*v, child(key), out);
    }

    template <typename T>
    void require(std::string_view key, T& out)
    {
        const json* v = get(key);
        if (!v)
        {
            fail(child(key), "required");
            return;
        }
        convert(*v, child(key), out);
    }

    void fail(std::string path, std::string message) { issues_.push_back({std::move(path), std::move(message)}); }

    void convert(const json& v, const std::string& path, bool& out)
    {
        if (!v.is_boolean())
            return fail(path, "expected a boolean");
        out = v.get<bool>();
    }

    void convert(const json& v, const std::string& path, double& out)
    {
        if (!v.is_number())
            return fail(path, "expected a number");
        out = v.get<double>();
    }

    void convert(const json& v, const std::string& path, std::string& out)
    {
        if (!v.is_string())
            return fail(path, "expected a string");
        out = v.get<std::string>();
    }

    template <typename T>
        requires std::is_integral_v<T> && (!std::is_same_v<T, bool>)
    void convert(const json& v, const std::string& path, T& out)
    {
        if (!v.is_number_integer())
            return fail(path, "expected an integer");
        if constexpr (std::is_unsigned_v<T>)
        {
            if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0)
            {
                out = v.get<T>();
                return;
            }
            return fail(path, "must be non-negative");
        }
        else
        {
            out = v.get<T>();
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::vector<ValidationIssue>& issues_;
    std::set<std::string, std::less<>> seen_;
};

void read_path_loss(const json& v, const std::string& path, medium::PathLossModel& out,
                    std::vector<ValidationIssue>& issues)
{
    ObjectReader r(v, path, issues);
    std::string model = out.kind == medium::PathLossKind::FreeSpace ? "free-space" : "log-distance";
    r.read("model", model);
    if (model == "free-space")
        out.kind = medium::PathLossKind::FreeSpace;
    else if (model == "log-distance")
        out.kind = medium::PathLossKind::LogDistance;
    else
        r.fail(r.child("model"), "expected \"free-space\" or \"log-distance\"");
    r.read("exponent", out.exponent);
    r.read("reference_loss_db", out.reference_loss_db);
    r.read("frequency_mhz", out.frequency_mhz);
}

void read_medium(const json& v, ScenarioConfig& cfg, std::vector<ValidationIssue>& issues)
{
    ObjectReader r(v, "medium", issues);
    auto& m = cfg.medium;
    if (const json* pl = r.get("path_loss"))
        read_path_loss(*pl, r.child("path_loss"), m.path_loss, issues);
    r.read("calibration", cfg.calibration);
    if (cfg.calibration == "intel")
        m.spillage = medium::SpillageTable::intel_calibration();
    else if (cfg.calibration != "default")
        r.fail(r.child("calibration"), "expected \"default\" or \"intel\"");
    if (const json* sp = r.get("spillage"))
    {
        const std::string base = r.child("spillage");
        if (!sp->is_array())
        {
            r.fail(base, "expected an array");
        }
        else
        {
            std::vector<medium::SpillageEntry> entries;
            for (std::size_t i = 0; i < sp->size(); ++i)
            {
                ObjectReader e((*sp)[i], base + "[" + std::to_string(i) + "]", issues);
                medium::SpillageEntry entry;
                e.require("separation_mhz", entry.separation_mhz);
                e.require("rejection_db", entry.rejection_db);
                entries.push_back(entry);
            }
            try
            {
                m.spillage = medium::SpillageTable(entries);
            }
            catch (const std::exception& ex)
            {
                r.fail(base, ex.what());
            }
        }
    }
    r.read("sinr_threshold_db", m.sinr_threshold_db);
    r.read("wifi_sensitivity_dbm", m.wifi_sensitivity_dbm);
    r.read("wimax_sensitivity_dbm", m.wimax_sensitivity_dbm);
    r.read("cca_threshold_dbm", m.cca_threshold_dbm);
    r.read("colocated_coupling_db", m.colocated_coupling_db);
    r.read("victim_tolerance_dbm", m.victim_tolerance_dbm);
}

void read_wifi(const json& v, wifi::DcfParams& p, std::vector<ValidationIssue>& issues)
{
    ObjectReader r(v, "wifi", issues);
    r.read("slot_us", p.slot);
    r.read("difs_us", p.difs);
    r.read("sifs_us", p.sifs);
    r.read("cw_min", p.cw_min);
    r.read("cw_max", p.cw_max);
    r.read("retry_limit", p.retry_limit);
    r.read("cts_airtime_us", p.cts_airtime);
    r.read("preamble_us", p.preamble);
    r.read("phy_rate_mbps", p.phy_rate_mbps);
}

void read_wimax(const json& v, wimax::WimaxParams& p, std::vector<ValidationIssue>& issues)
{
    ObjectReader r(v, "wimax", issues);
    r.read("frame_us", p.frame_len);
    r.read("dl_ratio", p.dl_ratio);
    r.read("bytes_per_us", p.bytes_per_us);
}

void read_traffic(const json& v, const std::string& path, TrafficSpec& t, std::vector<ValidationIssue>& issues)
{
    ObjectReader r(v, path, issues);
    std::string type = "none";
    r.require("type", type);
    if (type == "none")
        t.type = TrafficSpec::Type::None;
    else if (type == "saturated")
        t.type = TrafficSpec::Type::Saturated;
    else if (type == "cbr")
        t.type = TrafficSpec::Type::Cbr;
    else
        r.fail(r.child("type"), "expected \"none\", \"saturated\" or \"cbr\"");
    r.read("dest", t.dest);
    r.read("frame_bytes", t.frame_bytes);
    r.read("queue_limit", t.queue_limit);
    r.read("rate_bps", t.rate_bps);
    r.read("dl_rate_bps", t.dl_rate_bps);
    r.read("ul_rate_bps", t.ul_rate_bps);
    r.read("start_us", t.start_us);
}

void read_node(const json& v, const std::string& path, NodeConfig& n, std::vector<ValidationIssue>& issues)
{
    ObjectReader r(v, path, issues);
    r.require("id", n.id);
    std::string kind;
    r.require("kind", kind);
    if (auto k = radio_kind_from_string(kind))
        n.kind = *k;
    else if (!kind.empty())
        r.fail(r.child("kind"), "unknown radio kind \"" + kind + "\"");
    if (const json* pos = r.get("position"))
    {
        if (!pos->is_array() || pos->size() != 2 || !(*pos)[0].is_number() || !(*pos)[1].is_number())
            r.fail(r.child("position"), "expected [x, y]");
        else
            n.position = Position{(*pos)[0].get<double>(), (*pos)[1].get<double>()};
    }
    else
    {
        r.fail(r.child("position"), "required");
    }
    r.read("tx_power_dbm", n.tx_power_dbm);
    r.read("channel_mhz", n.channel_mhz);
    if (const json* t = r.get("traffic"))
        read_traffic(*t, r.child("traffic"), n.traffic, issues);
    r.read("collocated_with", n.collocated_with);
    r.read("base_station", n.base_station);
    r.read("priority", n.priority);
    if (const json* cs = r.get("cts_schedule"))
    {
        const std::string base = r.child("cts_schedule");
        if (!cs->is_array())
        {
            r.fail(base, "expected an array");
        }
        else
        {
            for (std::size_t i = 0; i < cs->size(); ++i)
            {
                ObjectReader e((*cs)[i], base + "[" + std::to_string(i) + "]", issues);
                CtsInjection inj;
                e.require("at_us", inj.at_us);
                e.require("reservation_us", inj.reservation_us);
                n.cts_schedule.push_back(inj);
            }
        }
    }
}

void read_afr(const json& v, AfrConfig& a, std::vector<ValidationIssue>& issues)
{
    ObjectReader r(v, "afr", issues);
    auto& p = a.params;
    r.read("enabled", a.enabled);
    r.read("dma", a.dma);
    r.read("acp", a.acp);
    r.read("dpe", a.dpe);
    r.read("th_dur_us", p.th_dur);
    r.read("guard_us", p.guard);
    r.read("lead_us", p.lead);
    r.read("delta", p.delta);
    r.read("interval_min_us", p.interval_min);
    r.read("interval_max_us", p.interval_max);
    r.read("dma_window_us", p.dma_window);
    r.read("acp_margin_db", p.acp_margin_db);
    r.read("acp_floor_dbm", p.acp_floor_dbm);
    r.read("acp_ceiling_dbm", p.acp_ceiling_dbm);
    r.read("assumed_interferer_power_dbm", p.assumed_interferer_power_dbm);
    r.read("retx_on", p.retx_on);
    r.read("retx_window_us", p.retx_window);
    r.read("eval_window_us", p.eval_window);
    r.read("hold_us", p.hold);
    r.read("qos_growth_step", p.qos_growth_step);
    r.read("qos_growth_max", p.qos_growth_max);
    std::string metric = p.metric == afr::DpeMetric::WimaxOnly ? "wimax" : "aggregate";
    r.read("dpe_metric", metric);
    if (metric == "wimax")
        p.metric = afr::DpeMetric::WimaxOnly;
    else if (metric == "aggregate")
        p.metric = afr::DpeMetric::Aggregate;
    else
        r.fail(r.child("dpe_metric"), "expected \"wimax\" or \"aggregate\"");
    if (const json* q = r.get("qos"))
    {
        ObjectReader qr(*q, r.child("qos"), issues);
        afr::QosTarget target;
        qr.read("min_throughput_Bps", target.min_throughput_Bps);
        qr.read("max_mean_delay_us", target.max_mean_delay_us);
        p.qos = target;
    }
}

void read_clc(const json& v, ClcConfig& c, std::vector<ValidationIssue>& issues)
{
    ObjectReader r(v, "clc", issues);
    r.read("enabled", c.enabled);
    r.read("schedule_aware", c.schedule_aware);
    r.read("priority", c.priority);
    r.read("retry_us", c.retry_us);
}

json path_loss_json(const medium::PathLossModel& m)
{
    return json{{"model", m.kind == medium::PathLossKind::FreeSpace ? "free-space" : "log-distance"},
                {"exponent", m.exponent},
                {"reference_loss_db", m.reference_loss_db},
                {"frequency_mhz", m.frequency_mhz}};
}

}  // namespace

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues))
{
}

ScenarioConfig parse_scenario(std::string_view text)
{
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error& ex)
    {
        throw ValidationError({{"", std::string("malformed JSON: ") + ex.what()}});
    }

    std::vector<ValidationIssue> issues;
    ScenarioConfig cfg;
    {
        ObjectReader r(doc, "", issues);
        r.read("name", cfg.name);
        r.read("duration_us", cfg.duration_us);
        r.read("warmup_us", cfg.warmup_us);
        r.read("seed", cfg.seed);
        r.read("timeline_bin_us", cfg.timeline_bin_us);
        if (const json* m = r.get("medium"))
            read_medium(*m, cfg, issues);
        if (const json* w = r.get("wifi"))
            read_wifi(*w, cfg.dcf, issues);
        if (const json* w = r.get("wimax"))
            read_wimax(*w, cfg.wimax, issues);
        if (const json* nodes = r.get("nodes"))
        {
            if (!nodes->is_array())
            {
                r.fail("nodes", "expected an array");
            }
            else
            {
                for (std::size_t i = 0; i < nodes->size(); ++i)
                {
                    NodeConfig n;
                    read_node((*nodes)[i], "nodes[" + std::to_string(i) + "]", n, issues);
                    cfg.nodes.push_back(std::move(n));
                }
            }
        }
        else
        {
            r.fail("nodes", "required");
        }
        if (const json* a = r.get("afr"))
            read_afr(*a, cfg.afr, issues);
        if (const json* c = r.get("clc"))
            read_clc(*c, cfg.clc, issues);
    }
    if (!issues.empty())
        throw ValidationError(std::move(issues));
    validate(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError({{"", "cannot open scenario file " + path}});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string emit_scenario(const ScenarioConfig& c)
{
    json medium_j{{"path_loss", path_loss_json(c.medium.path_loss)},
                  {"calibration", c.calibration},
                  {"sinr_threshold_db", c.medium.sinr_threshold_db},
                  {"wifi_sensitivity_dbm", c.medium.wifi_sensitivity_dbm},
                  {"wimax_sensitivity_dbm", c.medium.wimax_sensitivity_dbm},
                  {"cca_threshold_dbm", c.medium.cca_threshold_dbm},
                  {"colocated_coupling_db", c.medium.colocated_coupling_db},
                  {"victim_tolerance_dbm", c.medium.victim_tolerance_dbm}};
    json spill = json::array();
    for (const auto& e : c.medium.spillage.entries())
        spill.push_back({{"separation_mhz", e.separation_mhz}, {"rejection_db", e.rejection_db}});
    medium_j["spillage"] = spill;

    json nodes = json::array();
    for (const auto& n : c.nodes)
    {
        json node{{"id", n.id},
                  {"kind", std::string(to_string(n.kind))},
                  {"position", {n.position.x, n.position.y}},
                  {"tx_power_dbm", n.tx_power_dbm},
                  {"channel_mhz", n.channel_mhz},
                  {"priority", n.priority}};
        const auto& t = n.traffic;
        node["traffic"] = json{{"type", std::string(to_string(t.type))},
                               {"dest", t.dest},
                               {"frame_bytes", t.frame_bytes},
                               {"queue_limit", t.queue_limit},
                               {"rate_bps", t.rate_bps},
                               {"dl_rate_bps", t.dl_rate_bps},
                               {"ul_rate_bps", t.ul_rate_bps},
                               {"start_us", t.start_us}};
        if (!n.collocated_with.empty())
            node["collocated_with"] = n.collocated_with;
        if (!n.base_station.empty())
            node["base_station"] = n.base_station;
        if (!n.cts_schedule.empty())
        {
            json cs = json::array();
            for (const auto& inj : n.cts_schedule)
                cs.push_back({{"at_us", inj.at_us}, {"reservation_us", inj.reservation_us}});
            node["cts_schedule"] = cs;
        }
        nodes.push_back(std::move(node));
    }

    const auto& p = c.afr.params;
    json afr_j{{"enabled", c.afr.enabled},
               {"dma", c.afr.dma},
               {"acp", c.afr.acp},
               {"dpe", c.afr.dpe},
               {"th_dur_us", p.th_dur},
               {"guard_us", p.guard},
               {"lead_us", p.lead},
               {"delta", p.delta},
               {"interval_min_us", p.interval_min},
               {"interval_max_us", p.interval_max},
               {"dma_window_us", p.dma_window},
               {"acp_margin_db", p.acp_margin_db},
               {"acp_floor_dbm", p.acp_floor_dbm},
               {"acp_ceiling_dbm", p.acp_ceiling_dbm},
               {"assumed_interferer_power_dbm", p.assumed_interferer_power_dbm},
               {"retx_on", p.retx_on},
               {"retx_window_us", p.retx_window},
               {"eval_window_us", p.eval_window},
               {"hold_us", p.hold},
               {"qos_growth_step", p.qos_growth_step},
               {"qos_growth_max", p.qos_growth_max},
               {"dpe_metric", p.metric == afr::DpeMetric::WimaxOnly ? "wimax" : "aggregate"}};
    if (p.qos)
        afr_j["qos"] = {{"min_throughput_Bps", p.qos->min_throughput_Bps}, {"max_mean_delay_us", p.qos->max_mean_delay_us}};

    json doc{{"name", c.name},
             {"duration_us", c.duration_us},
             {"warmup_us", c.warmup_us},
             {"seed", c.seed},
             {"timeline_bin_us", c.timeline_bin_us},
             {"medium", medium_j},
             {"wifi",
              {{"slot_us", c.dcf.slot},
               {"difs_us", c.dcf.difs},
               {"sifs_us", c.dcf.sifs},
               {"cw_min", c.dcf.cw_min},
               {"cw_max", c.dcf.cw_max},
               {"retry_limit", c.dcf.retry_limit},
               {"cts_airtime_us", c.dcf.cts_airtime},
               {"preamble_us", c.dcf.preamble},
               {"phy_rate_mbps", c.dcf.phy_rate_mbps}}},
             {"wimax", {{"frame_us", c.wimax.frame_len}, {"dl_ratio", c.wimax.dl_ratio}, {"bytes_per_us", c.wimax.bytes_per_us}}},
             {"nodes", nodes},
             {"afr", afr_j},
             {"clc",
              {{"enabled", c.clc.enabled},
               {"schedule_aware", c.clc.schedule_aware},
               {"priority", c.clc.priority},
               {"retry_us", c.clc.retry_us}}}};
    return doc.dump(2) + "\n";
}

void validate(const ScenarioConfig& c)
{
    std::vector<ValidationIssue> issues;
    auto fail = [&](std::string path, std::string msg) { issues.push_back({std::move(path), std::move(msg)}); };

    if (c.duration_us <= 0)
        fail("duration_us", "must be positive");
    if (c.warmup_us < 0 || c.warmup_us >= c.duration_us)
        fail("warmup_us", "must lie in [0, duration_us)");
    if (c.timeline_bin_us < 0)
        fail("timeline_bin_us", "must be non-negative");
    try
    {
        c.medium.path_loss.validate();
    }
    catch (const std::exception& ex)
    {
        fail("medium.path_loss", ex.what());
    }
    if (c.dcf.slot <= 0 || c.dcf.difs < 0 || c.dcf.sifs < 0 || c.dcf.cts_airtime <= 0 || c.dcf.preamble < 0)
        fail("wifi", "timing parameters must be positive");
    if (c.dcf.cw_min < 0 || c.dcf.cw_max < c.dcf.cw_min)
        fail("wifi.cw_max", "must be at least cw_min");
    if (c.dcf.retry_limit < 0)
        fail("wifi.retry_limit", "must be non-negative");
    if (!(c.dcf.phy_rate_mbps > 0.0))
        fail("wifi.phy_rate_mbps", "must be positive");
    if (c.wimax.frame_len <= 0)
        fail("wimax.frame_us", "must be positive");
    if (!(c.wimax.dl_ratio > 0.0 && c.wimax.dl_ratio < 1.0))
        fail("wimax.dl_ratio", "must lie in (0, 1)");
    if (!(c.wimax.bytes_per_us > 0.0))
        fail("wimax.bytes_per_us", "must be positive");

    std::set<std::string, std::less<>> ids;
    for (std::size_t i = 0; i < c.nodes.size(); ++i)
    {
        const auto& n = c.nodes[i];
        const std::string base = "nodes[" + std::to_string(i) + "]";
        if (n.id.empty())
            fail(base + ".id", "must be non-empty");
        else if (!ids.insert(n.id).second)
            fail(base + ".id", "duplicate id \"" + n.id + "\"");
        if (!std::isfinite(n.position.x) || !std::isfinite(n.position.y))
            fail(base + ".position", "must be finite");
        if (!(n.tx_power_dbm >= -40.0 && n.tx_power_dbm <= 50.0))
            fail(base + ".tx_power_dbm", "must lie in [-40, 50]");
        if (!(n.channel_mhz >= 2000.0 && n.channel_mhz <= 6000.0))
            fail(base + ".channel_mhz", "must lie in [2000, 6000]");
        if (n.priority < 0)
            fail(base + ".priority", "must be non-negative");
    }

    for (std::size_t i = 0; i < c.nodes.size(); ++i)
    {
        const auto& n = c.nodes[i];
        const std::string base = "nodes[" + std::to_string(i) + "]";
        if (!n.collocated_with.empty())
        {
            const NodeConfig* other = c.find(n.collocated_with);
            if (!other)
                fail(base + ".collocated_with", "unknown node \"" + n.collocated_with + "\"");
            else if (other == &n)
                fail(base + ".collocated_with", "a node cannot be co-located with itself");
        }
        if (n.kind == RadioKind::WimaxSs)
        {
            const NodeConfig* bs = c.find(n.base_station);
            if (n.base_station.empty())
                fail(base + ".base_station", "a subscriber needs exactly one base station");
            else if (!bs || bs->kind != RadioKind::WimaxBs)
                fail(base + ".base_station", "\"" + n.base_station + "\" is not a base station");
        }
        else if (!n.base_station.empty())
        {
            fail(base + ".base_station", "only subscribers reference a base station");
        }
        if (!n.cts_schedule.empty() && !is_wifi(n.kind))
            fail(base + ".cts_schedule", "only WiFi-kind interfaces send reservations");
        for (std::size_t k = 0; k < n.cts_schedule.size(); ++k)
        {
            const auto& inj = n.cts_schedule[k];
            if (inj.at_us < 0 || inj.reservation_us <= 0)
                fail(base + ".cts_schedule[" + std::to_string(k) + "]", "needs at_us >= 0 and reservation_us > 0");
        }

        const auto& t = n.traffic;
        const std::string tp = base + ".traffic";
        if (t.type == TrafficSpec::Type::None)
            continue;
        if (t.start_us < 0)
            fail(tp + ".start_us", "must be non-negative");
        if (t.frame_bytes == 0)
            fail(tp + ".frame_bytes", "must be positive");
        if (n.kind == RadioKind::WimaxBs)
        {
            fail(tp, "base station traffic is configured on its subscribers");
        }
        else if (n.kind == RadioKind::WimaxSs)
        {
            if (t.type == TrafficSpec::Type::Cbr && !(t.dl_rate_bps > 0.0 || t.ul_rate_bps > 0.0))
                fail(tp, "cbr subscribers need dl_rate_bps or ul_rate_bps");
            if (t.dl_rate_bps < 0.0 || t.ul_rate_bps < 0.0)
                fail(tp, "rates must be non-negative");
        }
        else
        {
            const NodeConfig* dest = c.find(t.dest);
            if (!dest)
                fail(tp + ".dest", "unknown node \"" + t.dest + "\"");
            else if (!is_wifi(dest->kind) || dest == &n)
                fail(tp + ".dest", "must be another WiFi-kind node");
            if (t.type == TrafficSpec::Type::Cbr && !(t.rate_bps > 0.0))
                fail(tp + ".rate_bps", "must be positive for cbr traffic");
            if (t.queue_limit == 0)
                fail(tp + ".queue_limit", "must be positive");
        }
    }

    // Nodes on separate platforms need a positive distance between them.
    std::vector<std::size_t> root(c.nodes.size());
    for (std::size_t i = 0; i < root.size(); ++i)
        root[i] = i;
    const auto find_root = [&](std::size_t i) {
        while (root[i] != i)
            i = root[i] = root[root[i]];
        return i;
    };
    for (std::size_t i = 0; i < c.nodes.size(); ++i)
        if (const NodeConfig* other = c.find(c.nodes[i].collocated_with))
            root[find_root(i)] = find_root(static_cast<std::size_t>(other - c.nodes.data()));
    for (std::size_t i = 0; i < c.nodes.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (c.nodes[i].position == c.nodes[j].position && find_root(i) != find_root(j))
                fail("nodes[" + std::to_string(i) + "].position",
                     "shares a position with \"" + c.nodes[j].id + "\" but not a platform");

    const auto& p = c.afr.params;
    if (p.th_dur < 0 || p.guard < 0 || p.lead < 0)
        fail("afr", "th_dur_us, guard_us and lead_us must be non-negative");
    if (!(p.delta >= 0.0 && p.delta < 1.0))
        fail("afr.delta", "must lie in [0, 1)");
    if (p.interval_min <= 0 || p.interval_max < p.interval_min)
        fail("afr.interval_max_us", "needs 0 < interval_min_us <= interval_max_us");
    if (p.dma_window <= 0 || p.retx_window <= 0 || p.eval_window <= 0 || p.hold < 0)
        fail("afr", "windows must be positive");
    if (p.acp_floor_dbm > p.acp_ceiling_dbm)
        fail("afr.acp_floor_dbm", "must not exceed acp_ceiling_dbm");
    if (p.qos_growth_max < 1.0 || p.qos_growth_step < 0.0)
        fail("afr.qos_growth_max", "growth must start at 1 and be non-decreasing");
    if (c.clc.retry_us <= 0)
        fail("clc.retry_us", "must be positive");

    if (!issues.empty())
        throw ValidationError(std::move(issues));
}

}  // namespace coexsim
