#include "mfp/commands.hpp"

#include "mfp/error.hpp"
#include "mfp/macro_analysis.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

namespace mfp {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double parse_number(std::string_view s)
{
    while (!s.empty() && s.front() == ' ')
        s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ')
        s.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error(ErrorCode::InvalidArgument, "grid: bad number '" + std::string(s) + "'");
    return v;
}

json moments_json(std::span<const double> returns)
{
    json j;
    j["n"] = returns.size();
    j["mean"] = sample_mean(returns);
    j["variance"] = sample_variance(returns);
    try {
        j["skewness"] = skewness(returns);
        j["excess_kurtosis"] = excess_kurtosis(returns);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateSample)
            throw;
        j["skewness"] = nullptr;
        j["excess_kurtosis"] = nullptr;
    }
    j["skewness_se"] = skewness_se(returns.size());
    j["kurtosis_se"] = kurtosis_se(returns.size());
    return j;
}

std::optional<double> kurtosis_or_null(std::span<const double> series)
{
    if (series.size() < 5)
        return std::nullopt;
    try {
        return excess_kurtosis(log_returns(series));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateSample)
            throw;
        return std::nullopt;
    }
}

} // namespace

FundamentalPath build_fundamental(const Config& config, std::size_t steps)
{
    if (config.run.fundamental == FundamentalMode::gbm)
        return generate_path(config.params, steps, config.run.seed, config.run.sigma);
    return FundamentalPath::constant(config.params.s_f);
}

StatsSummary summarize(const Trajectory& traj, double tail_fraction)
{
    StatsSummary s;
    const auto range = asymptotic_range(traj, tail_fraction);
    s.min_S = range.min_S;
    s.max_S = range.max_S;
    s.mean_S = range.mean_S;
    s.window = range.window;
    s.range_class = range.label();
    if (!range.converged) {
        try {
            const auto osc = oscillation_metrics(traj, tail_fraction);
            s.amplitude = osc.amplitude;
            s.period = osc.period;
            s.center = osc.center;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotOscillatory)
                throw;
        }
    }
    s.stock_excess_kurtosis = kurtosis_or_null(price_series(traj));
    if (!traj.constant_fundamental)
        s.fundamental_excess_kurtosis = kurtosis_or_null(fundamental_series(traj));
    return s;
}

SimulationResult simulate(const Config& config)
{
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::size_t steps = step_count(config.params.t_end, config.params.dt);
    const auto path = build_fundamental(config, steps);

    SimulationResult out;
    out.traj = run_macro(initial_state(config), config.params, config.scheme, path, {config.run.stride});

    auto& r = out.report;
    r.command = "run";
    r.config_echo = echo(config);
    r.scheme = to_string(config.scheme.scheme);
    r.seed = config.run.seed;
    r.fundamental = config.run.fundamental == FundamentalMode::gbm ? "gbm" : "constant";
    r.steps = out.traj.steps;
    r.samples = out.traj.size();
    r.stride = out.traj.stride;
    r.terminal = out.traj.samples.back();
    r.stats = summarize(out.traj);
    r.fp_fallbacks = out.traj.fp_fallbacks;
    r.max_transfer_residual = out.traj.max_transfer_residual;
    if (out.traj.fp_fallbacks > 0)
        r.warnings.push_back(fmt::format("fixed-point iteration fell back to the lagged demand on {} steps",
                                         out.traj.fp_fallbacks));
    r.overrides = config.overrides;
    r.wall_time_s = seconds_since(start);
    return out;
}

std::vector<double> parse_grid(std::string_view spec)
{
    std::vector<double> values;
    if (spec.find(':') != std::string_view::npos) {
        const auto a = spec.find(':');
        const auto b = spec.find(':', a + 1);
        if (b == std::string_view::npos || spec.find(':', b + 1) != std::string_view::npos)
            throw Error(ErrorCode::InvalidArgument, "grid: expected start:stop:step");
        const double start = parse_number(spec.substr(0, a));
        const double stop = parse_number(spec.substr(a + 1, b - a - 1));
        const double step = parse_number(spec.substr(b + 1));
        if (!(step > 0.0) || stop < start)
            throw Error(ErrorCode::InvalidArgument, "grid: needs step > 0 and stop >= start");
        const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
        for (std::size_t i = 0; i <= n; ++i)
            values.push_back(parse_number(fmt::format("{:.12g}", start + static_cast<double>(i) * step)));
    } else {
        std::size_t pos = 0;
        while (pos <= spec.size()) {
            const auto comma = spec.find(',', pos);
            const auto item = spec.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
            values.push_back(parse_number(item));
            if (comma == std::string_view::npos)
                break;
            pos = comma + 1;
        }
    }
    if (values.empty())
        throw Error(ErrorCode::InvalidArgument, "grid: no values");
    return values;
}

SweepResult run_sweep(const Config& config, const std::string& key, std::span<const double> values,
                      double tail_fraction, unsigned jobs)
{
    config.validate();
    if (values.empty())
        throw Error(ErrorCode::InvalidArgument, "sweep: empty grid");
    // Reject an unknown key or an invalid value before any work starts.
    std::vector<Config> cells_config(values.size(), config);
    for (std::size_t i = 0; i < values.size(); ++i) {
        apply_override(cells_config[i], key, fmt::format("{}", values[i]));
        cells_config[i].run.seed = config.run.seed ^ static_cast<std::uint64_t>(i);
    }

    const auto start = std::chrono::steady_clock::now();
    SweepResult out;
    out.key = key;
    out.tail_fraction = tail_fraction;
    out.cells.resize(values.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            auto& cell = out.cells[i];
            cell.value = values[i];
            cell.seed = cells_config[i].run.seed;
            try {
                const auto& cfg = cells_config[i];
                const std::size_t steps = step_count(cfg.params.t_end, cfg.params.dt);
                const auto traj = run_macro(initial_state(cfg), cfg.params, cfg.scheme,
                                            build_fundamental(cfg, steps), {cfg.run.stride});
                cell.fp_fallbacks = traj.fp_fallbacks;
                cell.range = asymptotic_range(traj, tail_fraction);
                if (!cell.range.converged) {
                    try {
                        cell.oscillation = oscillation_metrics(traj, tail_fraction);
                        cell.oscillatory = true;
                    } catch (const Error& e) {
                        if (e.code() != ErrorCode::NotOscillatory)
                            throw;
                    }
                }
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(values.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    out.wall_time_s = seconds_since(start);
    return out;
}

std::string to_json(const SweepResult& sweep, int indent)
{
    json j;
    j["key"] = sweep.key;
    j["tail_fraction"] = sweep.tail_fraction;
    j["wall_time_s"] = sweep.wall_time_s;
    json cells = json::array();
    for (const auto& c : sweep.cells) {
        json cj;
        cj["param"] = c.value;
        cj["seed"] = c.seed;
        if (!c.error.empty()) {
            cj["error"] = c.error;
        } else {
            cj["min_S"] = c.range.min_S;
            cj["max_S"] = c.range.max_S;
            cj["width"] = c.range.width();
            cj["class"] = c.range.label();
            cj["fp_fallbacks"] = c.fp_fallbacks;
            if (c.oscillatory) {
                cj["amplitude"] = c.oscillation.amplitude;
                cj["period"] = c.oscillation.period;
                cj["center"] = c.oscillation.center;
                cj["upward_crossings"] = c.oscillation.upward_crossings;
            }
        }
        cells.push_back(std::move(cj));
    }
    j["cells"] = std::move(cells);
    return j.dump(indent);
}

bool VerifyResult::passed() const
{
    return mpc.passed() && std::all_of(oracle.begin(), oracle.end(), [](const OracleCheck& c) { return c.passed; });
}

VerifyResult run_verify(const Config& config)
{
    config.validate();
    VerifyResult out;
    out.mpc = verify_mpc(config.params);

    std::vector<double> chis = {1.0, 0.5};
    if (config.params.chi_mode.is_constant() &&
        std::find(chis.begin(), chis.end(), config.params.chi_mode.chi0) == chis.end())
        chis.push_back(config.params.chi_mode.chi0);

    for (double chi : chis) {
        ModelParams p = config.params;
        p.value_fn_mode = ValueFnMode::identity;
        p.chi_mode = ChiMode::constant(chi);
        OracleCheck check;
        check.chi = chi;
        check.dt = p.dt;
        const auto fundamental = FundamentalPath::constant(p.s_f);
        const auto coarse = run_macro(initial_state(config), p, config.scheme, fundamental);
        check.coarse = oracle_report(coarse, p);
        ModelParams half = p;
        half.dt = p.dt / 2.0;
        const auto fine = run_macro(initial_state(config), half, config.scheme, fundamental);
        check.fine = oracle_report(fine, half);
        check.ratio = check.fine.worst() > 0.0 ? check.coarse.worst() / check.fine.worst() : 0.0;
        check.passed = check.coarse.worst() < out.threshold && check.ratio >= out.min_ratio;
        out.oracle.push_back(std::move(check));
    }
    return out;
}

std::string to_json(const VerifyResult& v, int indent)
{
    json j;
    j["passed"] = v.passed();
    j["mpc"] = json::parse(to_json(v.mpc, 0));
    json oracle = json::array();
    for (const auto& c : v.oracle) {
        json cj;
        cj["chi"] = c.chi;
        cj["dt"] = c.dt;
        cj["worst_deviation"] = c.coarse.worst();
        cj["worst_deviation_half_dt"] = c.fine.worst();
        cj["halving_ratio"] = c.ratio;
        cj["branch_crossings"] = c.coarse.crossings;
        cj["channels"] = json::parse(to_json(c.coarse, 0));
        cj["passed"] = c.passed;
        oracle.push_back(std::move(cj));
    }
    j["oracle"] = std::move(oracle);
    j["oracle_threshold"] = v.threshold;
    j["oracle_min_ratio"] = v.min_ratio;
    return j.dump(indent);
}

MicroGap micro_gap(const Trajectory& micro, const Trajectory& macro)
{
    if (micro.size() != macro.size())
        throw Error(ErrorCode::InvalidArgument, "micro_gap: trajectories differ in length");
    MicroGap g;
    g.steps = micro.steps;
    for (std::size_t k = 0; k < micro.size(); ++k) {
        const auto& a = micro.samples[k];
        const auto& b = macro.samples[k];
        g.max_ed_gap = std::max(g.max_ed_gap, std::abs(a.ED - b.ED));
        g.max_price_gap = std::max(g.max_price_gap, std::abs(a.S - b.S) / b.S);
        const double scale = std::abs(b.X) + std::abs(b.Y);
        if (scale > 0.0)
            g.max_wealth_gap = std::max(g.max_wealth_gap, std::max(std::abs(a.X - b.X), std::abs(a.Y - b.Y)) / scale);
    }
    return g;
}

MicroComparison run_micro_comparison(const Config& config, std::size_t agents, std::optional<std::size_t> max_steps)
{
    config.validate();
    if (agents < 1)
        throw Error(ErrorCode::InvalidArgument, "micro: need at least one agent");
    ModelParams params = config.params;
    if (max_steps) {
        if (*max_steps < 1)
            throw Error(ErrorCode::InvalidArgument, "micro: max_steps must be >= 1");
        if (*max_steps < step_count(params.t_end, params.dt))
            params.t_end = static_cast<double>(*max_steps) * params.dt;
    }
    const std::size_t steps = step_count(params.t_end, params.dt);
    Config run_config = config;
    run_config.params = params;
    const auto fundamental = build_fundamental(run_config, steps);

    const auto pop = config.run.w_min ? AgentPopulation::uniform_wealth(agents, *config.run.w_min, *config.run.w_max,
                                                                       config.run.S0, config.run.seed)
                                      : AgentPopulation::homogeneous(agents, config.run.X0, config.run.Y0,
                                                                     config.run.S0);
    MicroRunOptions opts;
    opts.stride = config.run.stride;
    opts.snapshot_every = config.run.snapshot_every;

    MicroComparison out;
    out.micro = run_micro(pop, params, config.scheme, fundamental, opts);

    MacroState init;
    init.X = sample_mean(pop.x);
    init.Y = sample_mean(pop.y);
    init.S = pop.S;
    out.macro = run_macro(init, params, config.scheme, fundamental, {config.run.stride});
    out.gap = micro_gap(out.micro.mean, out.macro);
    out.gap.agents = agents;
    return out;
}

std::string to_json(const MicroGap& gap, int indent)
{
    json j;
    j["agents"] = gap.agents;
    j["steps"] = gap.steps;
    j["max_ed_gap"] = gap.max_ed_gap;
    j["max_price_gap"] = gap.max_price_gap;
    j["max_wealth_gap"] = gap.max_wealth_gap;
    return j.dump(indent);
}

std::string stats_json(const Trajectory& traj, const Config& config, double tail_fraction, int indent)
{
    json j;
    j["samples"] = traj.size();
    const auto prices = price_series(traj);
    j["stock_log_returns"] = moments_json(log_returns(prices));
    if (!traj.constant_fundamental)
        j["fundamental_log_returns"] = moments_json(log_returns(fundamental_series(traj)));
    else
        j["fundamental_log_returns"] = nullptr;

    const auto range = asymptotic_range(traj, tail_fraction);
    j["asymptotic_range"] = {{"min_S", range.min_S},   {"max_S", range.max_S},
                             {"mean_S", range.mean_S}, {"window", range.window},
                             {"tail_fraction", tail_fraction}, {"class", range.label()}};
    j["oscillation"] = nullptr;
    if (!range.converged) {
        try {
            const auto osc = oscillation_metrics(traj, tail_fraction);
            j["oscillation"] = {{"amplitude", osc.amplitude},
                                {"period", osc.period},
                                {"center", osc.center},
                                {"upward_crossings", osc.upward_crossings}};
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotOscillatory)
                throw;
        }
    }

    json eq;
    try {
        eq["price"] = equilibrium_price(config.params);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoRoot)
            throw;
        eq["price"] = nullptr;
    }
    const auto& last = traj.samples.back();
    eq["terminal_case"] = to_string(classify_steady_state(last.X, last.Y, last.S, config.params));
    j["equilibrium"] = std::move(eq);
    j["fundamental_kurtosis_abs_over_se"] = nullptr;
    if (!traj.constant_fundamental) {
        const auto k = kurtosis_or_null(fundamental_series(traj));
        if (k)
            j["fundamental_kurtosis_abs_over_se"] = std::abs(*k) / kurtosis_se(traj.size() - 1);
    }
    return j.dump(indent);
}

std::vector<QQPair> stock_qq(const Trajectory& traj, std::size_t count)
{
    return qq_pairs(log_returns(price_series(traj)), count);
}

} // namespace mfp
