// Command-line front end: `coexsim run` and `coexsim compare`.

#include "coexsim/report.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv)
{
    using namespace coexsim;

    CLI::App app{"WiMAX/WiFi coexistence simulator"};
    app.require_subcommand(1);

    const std::map<std::string, ReportFormat> formats{{"csv", ReportFormat::Csv}, {"json", ReportFormat::Json}};
    const std::map<std::string, Toggle> toggles{{"afr", Toggle::Afr}, {"clc", Toggle::Clc}};

    // Enum values print as characters in help text, so the options hold names.
    std::string run_format = "csv";
    std::string cmp_format = "csv";
    std::string cmp_toggle;

    RunCommand run_cmd;
    std::uint64_t run_seed = 0;
    Micros run_duration = 0;
    auto* run_app = app.add_subcommand("run", "Run one scenario and write a report");
    run_app->add_option("scenario", run_cmd.scenario_path, "Scenario file")->required();
    auto* seed_opt = run_app->add_option("--seed", run_seed, "Override the scenario seed");
    auto* run_dur_opt = run_app->add_option("--duration-us", run_duration, "Override the run length")->check(CLI::PositiveNumber);
    run_app->add_option("--out", run_cmd.out_path, "Report path (stdout when omitted)");
    run_app->add_option("--format", run_format, "Report format")->transform(CLI::IsMember(formats, CLI::ignore_case));
    run_app->add_option("--trace", run_cmd.trace_path, "Write the event trace here");

    CompareCommand cmp_cmd;
    Micros cmp_duration = 0;
    auto* cmp_app = app.add_subcommand("compare", "Run with a mechanism off and on across seeds");
    cmp_app->add_option("scenario", cmp_cmd.scenario_path, "Scenario file")->required();
    cmp_app->add_option("--toggle", cmp_toggle, "Mechanism to toggle")
        ->required()
        ->transform(CLI::IsMember(toggles, CLI::ignore_case));
    cmp_app->add_option("--seeds", cmp_cmd.seeds, "Comma-separated seed list")->delimiter(',');
    auto* cmp_dur_opt = cmp_app->add_option("--duration-us", cmp_duration, "Override the run length")->check(CLI::PositiveNumber);
    cmp_app->add_option("--out", cmp_cmd.out_path, "Report path (stdout when omitted)");
    cmp_app->add_option("--format", cmp_format, "Report format")->transform(CLI::IsMember(formats, CLI::ignore_case));

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (*run_app)
    {
        if (*seed_opt)
            run_cmd.seed = run_seed;
        if (*run_dur_opt)
            run_cmd.duration_us = run_duration;
        run_cmd.format = formats.at(run_format);
        return run_command(run_cmd, std::cout, std::cerr);
    }
    if (*cmp_dur_opt)
        cmp_cmd.duration_us = cmp_duration;
    cmp_cmd.format = formats.at(cmp_format);
    cmp_cmd.toggle = toggles.at(cmp_toggle);
    return compare_command(cmp_cmd, std::cout, std::cerr);
}
