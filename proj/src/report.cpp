#include "coexsim/report.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

namespace coexsim {

using nlohmann::ordered_json;

namespace {

// Both report formats print numbers through the JSON serializer so that a
// value reads identically in either.
template <typename T>
std::string num(T value)
{
    return ordered_json(value).dump();
}

std::string csv_field(const std::string& text)
{
    if (text.find_first_of(",\"\n") == std::string::npos)
        return text;
    std::string quoted = "\"";
    for (char c : text)
    {
        if (c == '"')
            quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

std::string hex(std::uint64_t value)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

ordered_json link_json(const LinkResult& l)
{
    return ordered_json{{"id", l.id},
                        {"source", l.source},
                        {"dest", l.dest},
                        {"system", l.system},
                        {"offered_bytes", l.stats.offered_bytes},
                        {"delivered_bytes", l.stats.delivered_bytes},
                        {"dropped_bytes", l.stats.dropped_bytes},
                        {"backlog_bytes", l.backlog_bytes},
                        {"corrupted_frames", l.stats.corrupted_frames},
                        {"retransmissions", l.stats.retransmissions},
                        {"dropped_frames", l.stats.dropped_frames},
                        {"airtime_us", l.stats.airtime_us},
                        {"share", l.share},
                        {"throughput_Bps", l.throughput_Bps},
                        {"mean_delay_us", l.stats.mean_delay_us()},
                        {"timeline", l.timeline}};
}

ordered_json run_json(const RunResult& r)
{
    ordered_json links = ordered_json::array();
    for (const auto& l : r.links)
        links.push_back(link_json(l));
    ordered_json systems = ordered_json::array();
    for (const auto& s : r.system_shares)
        systems.push_back({{"system", s.system}, {"share", s.share}});
    return ordered_json{{"scenario", r.scenario},
                        {"seed", r.seed},
                        {"duration_us", r.duration_us},
                        {"measured_us", r.measured_us},
                        {"fairness_index", r.fairness_index},
                        {"wimax_share", r.wimax_share},
                        {"colocated_conflict_us", r.colocated_conflict_us},
                        {"cts_count", r.cts_count},
                        {"cts_airtime_us", r.cts_airtime_us},
                        {"events", r.events},
                        {"trace_hash", hex(r.trace_hash)},
                        {"timeline_bin_us", r.timeline_bin_us},
                        {"system_shares", systems},
                        {"links", links}};
}

std::string_view toggle_name(Toggle t)
{
    return t == Toggle::Afr ? "afr" : "clc";
}

double total_throughput(const RunResult& r, bool wimax)
{
    double sum = 0.0;
    for (const auto& l : r.links)
    {
        if ((l.system == "wimax") == wimax)
            sum += l.throughput_Bps;
    }
    return sum;
}

std::uint64_t corrupted(const RunResult& r, bool wimax)
{
    std::uint64_t sum = 0;
    for (const auto& l : r.links)
    {
        if ((l.system == "wimax") == wimax)
            sum += l.stats.corrupted_frames;
    }
    return sum;
}

ScenarioConfig with_toggle(ScenarioConfig cfg, Toggle toggle, bool on)
{
    if (toggle == Toggle::Afr)
        cfg.afr.enabled = on;
    else
        cfg.clc.enabled = on;
    return cfg;
}

template <typename Fn>
double mean_of(const std::vector<RunResult>& runs, Fn fn)
{
    if (runs.empty())
        return 0.0;
    double sum = 0.0;
    for (const auto& r : runs)
        sum += static_cast<double>(fn(r));
    return sum / static_cast<double>(runs.size());
}

int report_error(std::ostream& err, const char* what, const std::exception& ex, int code)
{
    err << "coexsim: " << what << ": " << ex.what() << '\n';
    return code;
}

void emit(const std::string& out_path, const std::string& text, std::ostream& out)
{
    if (out_path.empty())
        out << text;
    else
        write_atomic(out_path, text);
}

}  // namespace

const std::vector<std::string>& csv_columns()
{
    static const std::vector<std::string> columns{
        "row",          "scenario",         "seed",           "link",          "source",
        "dest",         "system",           "offered_bytes",  "delivered_bytes", "dropped_bytes",
        "backlog_bytes", "corrupted_frames", "retransmissions", "dropped_frames", "airtime_us",
        "share",        "throughput_Bps",   "mean_delay_us",  "fairness_index", "wimax_share",
        "colocated_conflict_us", "cts_count", "cts_airtime_us", "events",       "trace_hash"};
    return columns;
}

std::string to_csv(const RunResult& r)
{
    std::ostringstream out;
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& l : r.links)
    {
        out << "link," << csv_field(r.scenario) << ',' << r.seed << ',' << csv_field(l.id) << ',' << csv_field(l.source)
            << ',' << csv_field(l.dest) << ',' << csv_field(l.system) << ',' << l.stats.offered_bytes << ','
            << l.stats.delivered_bytes << ',' << l.stats.dropped_bytes << ',' << l.backlog_bytes << ','
            << l.stats.corrupted_frames << ',' << l.stats.retransmissions << ',' << l.stats.dropped_frames << ','
            << l.stats.airtime_us << ',' << num(l.share) << ',' << num(l.throughput_Bps) << ','
            << num(l.stats.mean_delay_us()) << ",,,,,,,\n";
    }
    out << "summary," << csv_field(r.scenario) << ',' << r.seed << ",,,,,,,,,,,,,,,," << num(r.fairness_index) << ','
        << num(r.wimax_share) << ',' << r.colocated_conflict_us << ',' << r.cts_count << ',' << r.cts_airtime_us << ','
        << r.events << ',' << hex(r.trace_hash) << '\n';
    return out.str();
}

std::string to_json(const RunResult& r)
{
    return run_json(r).dump(2) + "\n";
}

std::string render(const RunResult& r, ReportFormat format)
{
    return format == ReportFormat::Csv ? to_csv(r) : to_json(r);
}

void write_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f)
        {
            f.close();
            fs::remove(tmp);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

const MetricDelta* Comparison::metric(std::string_view name) const
{
    for (const auto& m : metrics)
    {
        if (m.metric == name)
            return &m;
    }
    return nullptr;
}

Comparison compare(const ScenarioConfig& scenario, Toggle toggle, const std::vector<std::uint64_t>& seeds)
{
    Comparison c;
    c.scenario = scenario.name;
    c.toggle = toggle;
    c.seeds = seeds;

    const ScenarioConfig off = with_toggle(scenario, toggle, false);
    const ScenarioConfig on = with_toggle(scenario, toggle, true);
    std::vector<std::future<RunResult>> off_jobs;
    std::vector<std::future<RunResult>> on_jobs;
    for (auto seed : seeds)
    {
        off_jobs.push_back(std::async(std::launch::async, [&off, seed] { return run(off, seed); }));
        on_jobs.push_back(std::async(std::launch::async, [&on, seed] { return run(on, seed); }));
    }
    for (auto& j : off_jobs)
        c.off_runs.push_back(j.get());
    for (auto& j : on_jobs)
        c.on_runs.push_back(j.get());

    auto add = [&](std::string name, auto fn) {
        c.metrics.push_back({std::move(name), mean_of(c.off_runs, fn), mean_of(c.on_runs, fn)});
    };
    add("wimax_throughput_Bps", [](const RunResult& r) { return total_throughput(r, true); });
    add("wifi_throughput_Bps", [](const RunResult& r) { return total_throughput(r, false); });
    add("total_throughput_Bps",
        [](const RunResult& r) { return total_throughput(r, true) + total_throughput(r, false); });
    add("fairness_index", [](const RunResult& r) { return r.fairness_index; });
    add("wimax_share", [](const RunResult& r) { return r.wimax_share; });
    add("wimax_corrupted_frames", [](const RunResult& r) { return corrupted(r, true); });
    add("wifi_corrupted_frames", [](const RunResult& r) { return corrupted(r, false); });
    add("colocated_conflict_us", [](const RunResult& r) { return r.colocated_conflict_us; });
    add("cts_airtime_us", [](const RunResult& r) { return r.cts_airtime_us; });
    return c;
}

std::string to_csv(const Comparison& c)
{
    std::ostringstream out;
    out << "metric,off_mean,on_mean,delta\n";
    for (const auto& m : c.metrics)
        out << m.metric << ',' << num(m.off) << ',' << num(m.on) << ',' << num(m.delta()) << '\n';
    return out.str();
}

std::string to_json(const Comparison& c)
{
    ordered_json metrics = ordered_json::object();
    for (const auto& m : c.metrics)
        metrics[m.metric] = {{"off_mean", m.off}, {"on_mean", m.on}, {"delta", m.delta()}};
    ordered_json off = ordered_json::array();
    ordered_json on = ordered_json::array();
    for (const auto& r : c.off_runs)
        off.push_back(run_json(r));
    for (const auto& r : c.on_runs)
        on.push_back(run_json(r));
    ordered_json doc{{"scenario", c.scenario},
                     {"toggle", toggle_name(c.toggle)},
                     {"seeds", c.seeds},
                     {"metrics", metrics},
                     {"runs", {{"off", off}, {"on", on}}}};
    return doc.dump(2) + "\n";
}

std::string render(const Comparison& c, ReportFormat format)
{
    return format == ReportFormat::Csv ? to_csv(c) : to_json(c);
}

int run_command(const RunCommand& cmd, std::ostream& out, std::ostream& err)
{
    ScenarioConfig cfg;
    try
    {
        cfg = load_scenario(cmd.scenario_path);
        if (cmd.duration_us)
        {
            cfg.duration_us = *cmd.duration_us;
            cfg.warmup_us = std::min(cfg.warmup_us, cfg.duration_us / 2);
            validate(cfg);
        }
    }
    catch (const ValidationError& ex)
    {
        return report_error(err, "invalid scenario", ex, kExitValidation);
    }

    try
    {
        std::ofstream trace_file;
        RunOptions options;
        if (!cmd.trace_path.empty())
        {
            trace_file.open(cmd.trace_path, std::ios::binary | std::ios::trunc);
            if (!trace_file)
                throw std::runtime_error("cannot open trace file " + cmd.trace_path);
            options.trace = &trace_file;
        }
        const RunResult result = run(cfg, cmd.seed.value_or(cfg.seed), options);
        emit(cmd.out_path, render(result, cmd.format), out);
    }
    catch (const std::exception& ex)
    {
        return report_error(err, "run failed", ex, kExitRuntime);
    }
    return kExitOk;
}

int compare_command(const CompareCommand& cmd, std::ostream& out, std::ostream& err)
{
    ScenarioConfig cfg;
    try
    {
        cfg = load_scenario(cmd.scenario_path);
        if (cmd.duration_us)
        {
            cfg.duration_us = *cmd.duration_us;
            cfg.warmup_us = std::min(cfg.warmup_us, cfg.duration_us / 2);
            validate(cfg);
        }
    }
    catch (const ValidationError& ex)
    {
        return report_error(err, "invalid scenario", ex, kExitValidation);
    }
    if (cmd.seeds.empty())
    {
        err << "coexsim: compare needs at least one seed\n";
        return kExitUsage;
    }

    try
    {
        emit(cmd.out_path, render(compare(cfg, cmd.toggle, cmd.seeds), cmd.format), out);
    }
    catch (const std::exception& ex)
    {
        return report_error(err, "compare failed", ex, kExitRuntime);
    }
    return kExitOk;
}

}  // namespace coexsim
