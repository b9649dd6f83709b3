#include "ranstack/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ranstack/engine.hpp"
#include "ranstack/scenario_io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ranstack::cli {

namespace {

struct CommonFlags {
    std::string config;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double duration_ms = 0.0;
    bool duration_given = false;
    std::string out;
    std::string format = "json";
    std::string trace = "none";
    std::string trace_out;
    bool keep_going = false;
    int runs = 8;
};

int write_or_print(const std::string& text, const std::string& out_path, std::ostream& out,
                   std::ostream& err) {
    if (out_path.empty()) {
        out << text;
        if (!text.empty() && text.back() != '\n') out << '\n';
        return 0;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
        err << "cannot write output file '" << out_path << "'\n";
        return 1;
    }
    f << text;
    return 0;
}

const char* trace_header(const std::string& kind) {
    if (kind == "mac") return "tti,cell,carrier,channel,bits\n";
    if (kind == "rrm") return "time,decision,subject,detail\n";
    if (kind == "rrc") return "time,event,ue,cell,detail\n";
    return "";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"virtualized multi-RAT air-interface stack simulator"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* copt = cmd->add_option("--config", flags.config, "scenario file (JSON)");
        if (needs_config) copt->required();
        cmd->add_option("--seed", flags.seed, "run seed (default 0)")
            ->each([&](const std::string&) { flags.seed_given = true; });
        cmd->add_option("--duration-ms", flags.duration_ms, "override scenario duration")
            ->each([&](const std::string&) { flags.duration_given = true; });
        cmd->add_option("--out", flags.out, "output file (default: stdout)");
        cmd->add_option("--format", flags.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--trace", flags.trace, "emit a per-layer trace")
            ->check(CLI::IsMember({"mac", "rrm", "rrc", "none"}));
        cmd->add_option("--trace-out", flags.trace_out, "trace file (default: trace_<kind>.csv)");
        cmd->add_flag("--keep-going", flags.keep_going, "do not abort on invariant violations");
    };

    auto* validate_cmd = app.add_subcommand("validate", "check a scenario file");
    add_common(validate_cmd, true);

    auto* run_cmd = app.add_subcommand("run", "run one scenario");
    add_common(run_cmd, true);

    auto* sweep_cmd = app.add_subcommand("sweep", "run a seed range and aggregate");
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--runs", flags.runs, "number of seeds starting at --seed")
        ->check(CLI::PositiveNumber);

    auto* defaults_cmd = app.add_subcommand("list-defaults", "print embedded model defaults");
    add_common(defaults_cmd, false);

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << e.what() << "\n";
        return 1;
    }

    if (defaults_cmd->parsed()) {
        return write_or_print(defaults_json_text(), flags.out, out, err);
    }

    ScenarioConfig config;
    try {
        config = load_scenario(flags.config);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    const auto validation = validate_scenario(config);

    if (validate_cmd->parsed()) {
        if (flags.format == "json") {
            nlohmann::json j;
            j["ok"] = validation.ok();
            j["violations"] = nlohmann::json::array();
            for (const auto& v : validation.violations) {
                j["violations"].push_back({{"path", v.path}, {"message", v.message}});
            }
            write_or_print(j.dump(2), flags.out, out, err);
        } else {
            std::ostringstream os;
            os << "path,message\n";
            for (const auto& v : validation.violations) os << v.path << ',' << v.message << '\n';
            write_or_print(os.str(), flags.out, out, err);
        }
        if (!validation.ok()) {
            for (const auto& v : validation.violations) {
                err << v.path << ": " << v.message << "\n";
            }
            return 2;
        }
        return 0;
    }

    if (!validation.ok()) {
        for (const auto& v : validation.violations) err << v.path << ": " << v.message << "\n";
        return 2;
    }

    const std::uint64_t base_seed = flags.seed_given ? flags.seed : config.seed;

    engine::RunOptions options;
    options.keep_going = flags.keep_going;
    if (flags.duration_given) options.duration_ms_override = flags.duration_ms;

    std::ofstream trace_file;
    if (flags.trace != "none") {
        const std::string path =
            flags.trace_out.empty() ? ("trace_" + flags.trace + ".csv") : flags.trace_out;
        trace_file.open(path, std::ios::binary);
        if (!trace_file) {
            err << "cannot write trace file '" << path << "'\n";
            return 1;
        }
        trace_file << trace_header(flags.trace);
        if (flags.trace == "mac") options.trace.mac = &trace_file;
        if (flags.trace == "rrm") options.trace.rrm = &trace_file;
        if (flags.trace == "rrc") options.trace.rrc = &trace_file;
    }

    if (run_cmd->parsed()) {
        MetricsReport report;
        try {
            report = engine::run(config, base_seed, options);
        } catch (const SimAbort& e) {
            err << "run aborted: " << e.what() << "\n";
            return 3;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return 1;
        }
        const std::string text = flags.format == "csv" ? report.to_csv() : report.to_json(2);
        return write_or_print(text, flags.out, out, err);
    }

    // sweep: independent runs fan out across cores; each run is internally
    // single-threaded, so the per-seed reports are identical to serial runs.
    std::vector<MetricsReport> reports(static_cast<std::size_t>(flags.runs));
    std::vector<std::string> failures(static_cast<std::size_t>(flags.runs));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < flags.runs; ++i) {
        try {
            engine::RunOptions worker_options;
            worker_options.keep_going = options.keep_going;
            worker_options.duration_ms_override = options.duration_ms_override;
            reports[static_cast<std::size_t>(i)] =
                engine::run(config, base_seed + static_cast<std::uint64_t>(i), worker_options);
        } catch (const std::exception& e) {
            failures[static_cast<std::size_t>(i)] = e.what();
        }
    }
    for (int i = 0; i < flags.runs; ++i) {
        if (!failures[static_cast<std::size_t>(i)].empty()) {
            err << "seed " << base_seed + static_cast<std::uint64_t>(i)
                << " aborted: " << failures[static_cast<std::size_t>(i)] << "\n";
            return 3;
        }
    }

    nlohmann::json agg;
    agg["schema"] = "ranstack-sweep/1";
    agg["config"] = flags.config;
    agg["seeds"] = nlohmann::json::array();
    double sum_throughput = 0.0, min_delivery = 1.0, sum_delivery = 0.0;
    std::int64_t total_violations = 0;
    for (int i = 0; i < flags.runs; ++i) {
        const auto& r = reports[static_cast<std::size_t>(i)];
        double run_throughput = 0.0;
        double run_delivery = r.global.offered > 0 ? static_cast<double>(r.global.delivered) /
                                                         static_cast<double>(r.global.offered)
                                                   : 1.0;
        for (const auto& b : r.bearers) run_throughput += b.throughput_bps;
        sum_throughput += run_throughput;
        sum_delivery += run_delivery;
        min_delivery = std::min(min_delivery, run_delivery);
        total_violations += r.global.in_order_violations;
        agg["seeds"].push_back({{"seed", r.seed},
                                {"scenario_hash", r.scenario_hash},
                                {"offered", r.global.offered},
                                {"delivered", r.global.delivered},
                                {"throughput_bps", run_throughput},
                                {"delivery_ratio", run_delivery},
                                {"in_order_violations", r.global.in_order_violations}});
    }
    agg["aggregate"] = {{"runs", flags.runs},
                        {"mean_throughput_bps", sum_throughput / flags.runs},
                        {"mean_delivery_ratio", sum_delivery / flags.runs},
                        {"min_delivery_ratio", min_delivery},
                        {"total_in_order_violations", total_violations}};
    return write_or_print(agg.dump(2), flags.out, out, err);
}

}  // namespace ranstack::cli
