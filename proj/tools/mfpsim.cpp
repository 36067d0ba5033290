// mfpsim: command-line front end over the mfp C API.

#include "mfp/mfp.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, usage = 1, numerical = 2, verification = 3 };

struct Failure {
    int code;
    std::string message;
};

struct ConfigDeleter {
    void operator()(mfp_config* c) const { mfp_config_free(c); }
};
struct TrajDeleter {
    void operator()(mfp_trajectory* t) const { mfp_trajectory_free(t); }
};
struct TextDeleter {
    void operator()(mfp_text* t) const { mfp_text_free(t); }
};
using ConfigPtr = std::unique_ptr<mfp_config, ConfigDeleter>;
using TrajPtr = std::unique_ptr<mfp_trajectory, TrajDeleter>;
using TextPtr = std::unique_ptr<mfp_text, TextDeleter>;

int exit_code_for(mfp_status s)
{
    switch (s) {
    case MFP_ERR_INVALID_ARGUMENT:
    case MFP_ERR_PARSE:
    case MFP_ERR_VALIDATION:
    case MFP_ERR_IO:
        return usage;
    default:
        return numerical;
    }
}

void check(mfp_status s)
{
    if (s == MFP_OK)
        return;
    std::string msg = std::string(mfp_status_name(s)) + ": " + mfp_last_error_message();
    if (s == MFP_ERR_STEP_SIZE_TOO_LARGE && mfp_last_error_step() >= 0)
        msg += "\n  failed at step " + std::to_string(mfp_last_error_step()) + "; try a smaller dt";
    throw Failure{exit_code_for(s), msg};
}

std::string text(const TextPtr& t)
{
    return std::string(mfp_text_data(t.get()), mfp_text_size(t.get()));
}

void write(const fs::path& path, const std::string& contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
        throw Failure{usage, "cannot write " + path.string()};
}

struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::string scheme;
    std::optional<std::size_t> stride;
    std::string out = "out";
    unsigned jobs = 1;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config, "configuration file (default: built-in standard parameters)");
    cmd->add_option("--set", c.sets, "override key=value, repeatable; keys are section.key or key");
    cmd->add_option("--seed", c.seed, "random seed (run.seed)");
    cmd->add_option("--scheme", c.scheme, "lagged_euler or fixed_point_euler");
    cmd->add_option("--stride", c.stride, "sampling stride");
    cmd->add_option("--out", c.out, "output directory")->capture_default_str();
    cmd->add_option("--jobs", c.jobs, "worker threads")->capture_default_str();
}

ConfigPtr load(const Common& c)
{
    mfp_config* raw = nullptr;
    check(c.config.empty() ? mfp_config_default(&raw) : mfp_config_load(c.config.c_str(), &raw));
    ConfigPtr cfg(raw);
    std::vector<std::string> sets = c.sets;
    if (c.seed)
        sets.push_back("run.seed=" + std::to_string(*c.seed));
    if (!c.scheme.empty())
        sets.push_back("scheme.scheme=" + c.scheme);
    if (c.stride)
        sets.push_back("run.stride=" + std::to_string(*c.stride));
    std::vector<const char*> ptrs;
    for (const auto& s : sets)
        ptrs.push_back(s.c_str());
    check(mfp_config_set_many(cfg.get(), ptrs.data(), ptrs.size()));
    return cfg;
}

fs::path prepare_out(const Common& c, const mfp_config* cfg)
{
    const fs::path dir(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw Failure{usage, "cannot create " + dir.string() + ": " + ec.message()};
    mfp_text* raw = nullptr;
    check(mfp_config_echo(cfg, &raw));
    write(dir / "config.echo", text(TextPtr(raw)));
    return dir;
}

int precision_of(const mfp_config* cfg)
{
    int p = 12;
    check(mfp_config_precision(cfg, &p));
    return p;
}

int cmd_run(const Common& c)
{
    auto cfg = load(c);
    const auto dir = prepare_out(c, cfg.get());
    mfp_trajectory* traj = nullptr;
    mfp_text* report = nullptr;
    check(mfp_run(cfg.get(), &traj, &report));
    TrajPtr t(traj);
    TextPtr r(report);
    check(mfp_trajectory_write_csv(t.get(), (dir / "trajectory.csv").c_str(), precision_of(cfg.get())));
    write(dir / "report.json", text(r) + "\n");
    mfp_sample last{};
    check(mfp_trajectory_sample(t.get(), mfp_trajectory_size(t.get()) - 1, &last));
    std::printf("%zu steps, S(T) = %.12g, X(T) = %.12g, Y(T) = %.12g -> %s\n", mfp_trajectory_steps(t.get()), last.S,
                last.X, last.Y, dir.c_str());
    return ok;
}

int cmd_sweep(const Common& c, const std::string& param, const std::string& grid, double tail)
{
    auto cfg = load(c);
    const auto dir = prepare_out(c, cfg.get());
    mfp_text* csv = nullptr;
    mfp_text* report = nullptr;
    check(mfp_sweep(cfg.get(), param.c_str(), grid.c_str(), tail, c.jobs, &csv, &report));
    TextPtr s(csv);
    TextPtr r(report);
    write(dir / "sweep.csv", text(s));
    write(dir / "report.json", text(r) + "\n");
    std::cout << text(s);
    return ok;
}

int cmd_verify(const Common& c)
{
    auto cfg = load(c);
    const auto dir = prepare_out(c, cfg.get());
    int passed = 0;
    mfp_text* report = nullptr;
    check(mfp_verify(cfg.get(), &passed, &report));
    TextPtr r(report);
    write(dir / "report.json", text(r) + "\n");
    std::cout << text(r) << "\n";
    std::printf("verification %s\n", passed ? "passed" : "FAILED");
    return passed ? ok : verification;
}

int cmd_micro(const Common& c, std::optional<std::size_t> agents, std::size_t max_steps)
{
    auto cfg = load(c);
    if (agents)
        check(mfp_config_set(cfg.get(), "micro.agents", std::to_string(*agents).c_str()));
    const auto dir = prepare_out(c, cfg.get());
    std::size_t n = 0;
    check(mfp_config_agents(cfg.get(), &n));
    mfp_trajectory* traj = nullptr;
    mfp_text* gap = nullptr;
    mfp_text* snaps = nullptr;
    check(mfp_micro(cfg.get(), n, max_steps, &traj, &gap, &snaps));
    TrajPtr t(traj);
    TextPtr g(gap);
    TextPtr s(snaps);
    check(mfp_trajectory_write_csv(t.get(), (dir / "trajectory.csv").c_str(), precision_of(cfg.get())));
    write(dir / "report.json", text(g) + "\n");
    const auto snap_text = text(s);
    if (snap_text.find('\n') + 1 < snap_text.size())
        write(dir / "snapshots.csv", snap_text);
    std::cout << text(g) << "\n";
    return ok;
}

int cmd_stats(const Common& c, const std::string& input, std::size_t qq, double tail)
{
    auto cfg = load(c);
    const auto dir = prepare_out(c, cfg.get());
    TrajPtr t;
    if (!input.empty()) {
        mfp_trajectory* raw = nullptr;
        check(mfp_trajectory_read_csv(input.c_str(), &raw));
        t.reset(raw);
    }
    mfp_text* report = nullptr;
    mfp_text* qq_csv = nullptr;
    check(mfp_stats(cfg.get(), t.get(), tail, qq, &report, &qq_csv));
    TextPtr r(report);
    TextPtr q(qq_csv);
    write(dir / "report.json", text(r) + "\n");
    if (q)
        write(dir / "qq.csv", text(q));
    std::cout << text(r) << "\n";
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Heterogeneous-agent portfolio market simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(mfp_version()));

    Common common;
    const double default_tail = mfp_default_tail_fraction();

    auto* run = app.add_subcommand("run", "simulate the mean-field model");
    add_common(run, common);

    std::string param;
    std::string grid;
    double tail = default_tail;
    auto* sweep = app.add_subcommand("sweep", "asymptotic price range over a parameter grid");
    add_common(sweep, common);
    sweep->add_option("--param", param, "parameter to sweep (config key)")->required();
    sweep->add_option("--grid", grid, "start:stop:step or v1,v2,...")->required();
    sweep->add_option("--tail", tail, "tail window fraction")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "MPC closed-form and oracle checks");
    add_common(verify, common);

    std::optional<std::size_t> agents;
    std::size_t max_steps = 0;
    auto* micro = app.add_subcommand("micro", "finite-N agent run and mean-field gap");
    add_common(micro, common);
    micro->add_option("--agents", agents, "number of agents (micro.agents)");
    micro->add_option("--max-steps", max_steps, "clip the run to this many steps (0 = full horizon)");

    std::string input;
    std::size_t qq = 100;
    auto* stats = app.add_subcommand("stats", "log-return statistics and asymptotic diagnostics");
    add_common(stats, common);
    stats->add_option("--input", input, "trajectory CSV to analyse instead of simulating");
    stats->add_option("--qq", qq, "number of QQ pairs (0 disables)")->capture_default_str();
    stats->add_option("--tail", tail, "tail window fraction")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    try {
        if (*run)
            return cmd_run(common);
        if (*sweep)
            return cmd_sweep(common, param, grid, tail);
        if (*verify)
            return cmd_verify(common);
        if (*micro)
            return cmd_micro(common, agents, max_steps);
        if (*stats)
            return cmd_stats(common, input, qq, tail);
    } catch (const Failure& f) {
        std::cerr << "mfpsim: " << f.message << "\n";
        return f.code;
    }
    return usage;
}
