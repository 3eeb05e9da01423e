// hypwalk: experiment driver. One subcommand per estimator; every run
// writes <output_path>/{series.csv, summary.json, manifest.json}.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypwalk/config.hpp"
#include "hypwalk/parallel.hpp"
#include "hypwalk/runner.hpp"

namespace {

namespace fs = std::filesystem;

enum Exit : int { ok = 0, internal = 1, config_error = 2, precondition = 3, assertion = 4, io = 5 };

// One line per problem: "hypwalk: error kind=<kind> reason=<text>".
int fail(int code, std::string_view kind, const std::string& reason) {
    std::cerr << "hypwalk: error kind=" << kind << " reason=" << reason << "\n";
    return code;
}

std::string help_footer() {
    std::string s = "Config: a JSON object; see README for the fields each subcommand needs.\n"
                    "Threads: --threads, else HYPWALK_THREADS, else all cores. Output does not depend on it.\n"
                    "Exit codes: 0 ok, 1 internal error, 2 config error, 3 precondition failure, 4 --assert failure, 5 I/O error.\n"
                    "series.csv columns (floats printed with 17 significant digits):\n";
    for (const auto& sc : hypwalk::known_subcommands())
        s += "  " + sc + std::string(std::max<std::size_t>(1, 19 - sc.size()), ' ') +
             std::string(hypwalk::csv_schema(sc)) + "\n";
    return s;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw std::runtime_error("cannot write " + path.string());
}

int run(const std::string& subcommand, const std::string& config_path, std::size_t threads_flag, bool assert_mode,
        const std::string& output_override) {
    const auto started = std::chrono::steady_clock::now();
    std::ifstream in(config_path, std::ios::binary);
    if (!in) return fail(config_error, "config", "cannot read config file " + config_path);
    std::stringstream text;
    text << in.rdbuf();

    auto parsed = hypwalk::validate_config(text.str(), subcommand);
    if (!parsed.ok()) {
        for (const auto& e : parsed.errors) fail(config_error, "config", e);
        return config_error;
    }
    // The digest covers the config as written; --output only moves the files.
    const hypwalk::ExperimentConfig cfg = *parsed.config;

    const std::size_t threads = hypwalk::resolve_threads(threads_flag);
    hypwalk::RunOutput out;
    try {
        out = hypwalk::run_subcommand(subcommand, cfg, threads);
    } catch (const hypwalk::config_error& e) {
        return fail(config_error, "config", e.what());
    } catch (const hypwalk::parse_error& e) {
        return fail(config_error, "config", e.what());
    } catch (const hypwalk::precondition_error& e) {
        return fail(precondition, "precondition", e.what());
    }

    const fs::path dir(output_override.empty() ? cfg.output_path : output_override);
    const std::string summary = out.summary.dump(2) + "\n";
    try {
        fs::create_directories(dir);
        write_file(dir / "series.csv", out.csv);
        write_file(dir / "summary.json", summary);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        nlohmann::json manifest{
            {"config_digest", hypwalk::config_digest(cfg)},
            {"version", hypwalk::version},
            {"subcommand", subcommand},
            {"wall_time_seconds", wall},
            {"threads", threads},
            {"files",
             {{{"name", "series.csv"}, {"bytes", out.csv.size()}, {"sha256", hypwalk::sha256_hex(out.csv)}},
              {{"name", "summary.json"}, {"bytes", summary.size()}, {"sha256", hypwalk::sha256_hex(summary)}}}}};
        write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        return fail(io, "io", e.what());
    }

    // props always enforces its suites; other subcommands only under --assert.
    const bool enforce = assert_mode || subcommand == "props";
    if (enforce && !out.assertion_failures.empty()) {
        for (const auto& f : out.assertion_failures) fail(assertion, "assert", f);
        return assertion;
    }
    std::cout << subcommand << ": wrote " << (dir / "series.csv").string() << "\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random walks on hyperbolic groups: Monte Carlo estimators and predicate suites", "hypwalk"};
    app.set_version_flag("--version", std::string(hypwalk::version));
    app.footer(help_footer());
    app.require_subcommand(1);

    std::string config_path, output_override;
    std::size_t threads = 0;
    bool assert_mode = false;
    for (const auto& name : hypwalk::known_subcommands()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config,-c", config_path, "experiment config (JSON)")->required();
        sub->add_option("--threads,-j", threads, "worker threads (0 = HYPWALK_THREADS or all cores)");
        sub->add_flag("--assert", assert_mode, "exit 4 when the acceptance thresholds are not met");
        sub->add_option("--output,-o", output_override, "override output_path from the config");
        sub->footer("series.csv columns: " + std::string(hypwalk::csv_schema(name)));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    try {
        return run(app.get_subcommands().front()->get_name(), config_path, threads, assert_mode, output_override);
    } catch (const std::exception& e) {
        return fail(internal, "internal", e.what());
    }
}
