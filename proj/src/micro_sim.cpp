#include "mfp/micro_sim.hpp"

#include "mfp/error.hpp"
#include "mfp/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mfp {

void AgentPopulation::validate() const
{
    if (x.size() != y.size() || x.empty())
        throw Error(ErrorCode::InvalidArgument, "population needs matching, nonempty wealth vectors");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] >= 0.0) || !(y[i] >= 0.0))
            throw Error(ErrorCode::InvalidArgument, "agent " + std::to_string(i) + " has negative wealth");
    if (!(S > 0.0))
        throw Error(ErrorCode::NonpositivePrice, "population price must be > 0");
}

AgentPopulation AgentPopulation::homogeneous(std::size_t n, double x0, double y0, double S0)
{
    AgentPopulation pop;
    pop.x.assign(n, x0);
    pop.y.assign(n, y0);
    pop.S = S0;
    return pop;
}

AgentPopulation AgentPopulation::uniform_wealth(std::size_t n, double w_min, double w_max, double S0,
                                                std::uint64_t seed)
{
    if (!(w_min >= 0.0) || !(w_max >= w_min))
        throw Error(ErrorCode::InvalidArgument, "uniform wealth needs 0 <= w_min <= w_max");
    AgentPopulation pop;
    pop.x.resize(n);
    pop.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        pop.x[i] = w_min + (w_max - w_min) * uniform_open(seed, 2 * i);
        pop.y[i] = w_min + (w_max - w_min) * uniform_open(seed, 2 * i + 1);
    }
    pop.S = S0;
    return pop;
}

double dK_dS_finite_difference(double price, double price_rate, double s_f, const ModelParams& params)
{
    if (!(price > 0.0))
        throw Error(ErrorCode::NonpositivePrice, "price must be > 0");
    const double h = 1e-6 * price;
    const double up = combined_return(price + h, price_rate, s_f, params).k;
    const double down = combined_return(price - h, price_rate, s_f, params).k;
    return (up - down) / (2.0 * h);
}

double dK_dS_eval(double price, double price_rate, const ModelParams& params)
{
    return dK_dS_eval(price, price_rate, params.s_f, params);
}

double dK_dS_eval(double price, double price_rate, double s_f, const ModelParams& params)
{
    if (!(price > 0.0))
        throw Error(ErrorCode::NonpositivePrice, "price must be > 0");
    if (params.value_fn_mode == ValueFnMode::identity && params.chi_mode.is_constant()) {
        const double chi = params.chi_mode.chi0;
        const double s2 = price * price;
        return -chi * params.omega * s_f / s2 - (1.0 - chi) * (price_rate + params.dividend) / s2;
    }
    return dK_dS_finite_difference(price, price_rate, s_f, params);
}

double myopic_control(double x, double y, double price, const ReturnEstimate& est, double dK_dS, AgentCount n,
                      const ModelParams& params)
{
    const double k = est.k;
    const double c = params.kappa * n.inverse();
    if (k > 0.0)
        return (k * y - c * price * dK_dS * y * y / 2.0) / params.nu;
    if (k < 0.0)
        return (k * x + k * c * x * x + c * price * dK_dS * x * x / 2.0) / params.nu;
    return 0.0;
}

double myopic_control(std::size_t i, const AgentPopulation& pop, const ReturnEstimate& est, double dK_dS,
                      const ModelParams& params)
{
    return myopic_control(pop.x.at(i), pop.y.at(i), pop.S, est, dK_dS, AgentCount(pop.size()), params);
}

namespace {

double pairwise(std::span<const double> v)
{
    if (v.size() <= 8) {
        double s = 0.0;
        for (double a : v)
            s += a;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise(v.first(half)) + pairwise(v.subspan(half));
}

std::vector<double> agent_controls(const AgentPopulation& pop, const ReturnEstimate& est, double dK_dS,
                                   const ModelParams& params)
{
    std::vector<double> u(pop.size());
    const AgentCount n(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i)
        u[i] = myopic_control(pop.x[i], pop.y[i], pop.S, est, dK_dS, n, params);
    return u;
}

} // namespace

double canonical_sum(std::span<const double> values)
{
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return pairwise(sorted);
}

double aggregate_demand(const AgentPopulation& pop, const ReturnEstimate& est, double dK_dS, const ModelParams& params)
{
    const auto u = agent_controls(pop, est, dK_dS, params);
    return canonical_sum(u) / static_cast<double>(pop.size());
}

namespace {

MicroDemand demand_for_rate(const AgentPopulation& pop, double assumed_ed, const ModelParams& params, double s_f)
{
    MicroDemand out;
    const double rate = params.kappa * assumed_ed * pop.S;
    out.est = combined_return(pop.S, rate, s_f, params);
    out.dK_dS = out.est.k == 0.0 ? 0.0 : dK_dS_eval(pop.S, rate, s_f, params);
    out.ed = aggregate_demand(pop, out.est, out.dK_dS, params);
    return out;
}

} // namespace

MicroDemand evaluate_micro_demand(const AgentPopulation& pop, const ModelParams& params, const SchemeConfig& scheme,
                                  double s_f_current)
{
    const MicroDemand lagged = demand_for_rate(pop, pop.ed_prev, params, s_f_current);
    if (scheme.scheme == Scheme::lagged_euler)
        return lagged;
    const auto e = solve_demand_fixed_point(
        [&](double x) { return demand_for_rate(pop, x, params, s_f_current).ed; }, pop.ed_prev, scheme);
    if (e)
        return demand_for_rate(pop, *e, params, s_f_current);
    MicroDemand out = lagged;
    out.fp_fallback = true;
    return out;
}

namespace {

AgentPopulation advance_population(const AgentPopulation& pop, const MicroDemand& d, const ModelParams& params,
                                   long long step_index)
{
    AgentPopulation next;
    next.x.resize(pop.size());
    next.y.resize(pop.size());
    const double stock_return = params.kappa * d.ed + params.dividend / pop.S;
    const AgentCount n(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const double u = myopic_control(pop.x[i], pop.y[i], pop.S, d.est, d.dK_dS, n, params);
        next.x[i] = pop.x[i] + params.dt * (stock_return * pop.x[i] + u);
        next.y[i] = pop.y[i] + params.dt * (params.r * pop.y[i] - u);
        if (!(next.x[i] >= 0.0) || !(next.y[i] >= 0.0))
            throw StepError(ErrorCode::StepSizeTooLarge, step_index,
                            "step " + std::to_string(step_index) + ": agent " + std::to_string(i) +
                                " wealth turns negative; reduce dt");
    }
    next.S = pop.S + params.dt * params.kappa * d.ed * pop.S;
    if (!(next.S > 0.0))
        throw StepError(ErrorCode::StepSizeTooLarge, step_index,
                        "step " + std::to_string(step_index) + ": price turns nonpositive; reduce dt");
    next.ed_prev = d.ed;
    next.t = pop.t + params.dt;
    return next;
}

double mean_of(const std::vector<double>& v)
{
    return canonical_sum(v) / static_cast<double>(v.size());
}

Sample mean_sample(const AgentPopulation& pop, const MicroDemand& d, double sf)
{
    return {pop.t, mean_of(pop.x), mean_of(pop.y), pop.S, d.ed, d.est.chi, d.est.k, sf};
}

} // namespace

MicroStep micro_step(const AgentPopulation& pop, const ModelParams& params, const SchemeConfig& scheme,
                     double s_f_current, long long step_index)
{
    MicroStep out;
    out.demand = evaluate_micro_demand(pop, params, scheme, s_f_current);
    out.pop = advance_population(pop, out.demand, params, step_index);
    return out;
}

MicroRun run_micro(const AgentPopulation& init, const ModelParams& params, const SchemeConfig& scheme,
                   const FundamentalPath& fundamental, MicroRunOptions options)
{
    params.validate();
    scheme.validate();
    init.validate();
    if (options.stride < 1)
        throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");

    const std::size_t steps = std::min(step_count(params.t_end, params.dt), options.max_steps);
    if (!fundamental.is_constant() && fundamental.samples.size() < steps + 1)
        throw Error(ErrorCode::InvalidArgument, "fundamental path shorter than the run");

    MicroRun run;
    Trajectory& traj = run.mean;
    traj.params = params;
    traj.scheme = scheme;
    traj.stride = options.stride;
    traj.steps = steps;
    traj.constant_fundamental = fundamental.is_constant();

    AgentPopulation pop = init;
    pop.t = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        if (options.snapshot_every != 0 && k % options.snapshot_every == 0)
            run.snapshots.push_back({k, pop.x, pop.y});
        const double sf = fundamental.at(k);
        const MicroDemand d = evaluate_micro_demand(pop, params, scheme, sf);
        if (d.fp_fallback)
            ++traj.fp_fallbacks;
        const Sample before = mean_sample(pop, d, sf);
        if (k % options.stride == 0)
            traj.samples.push_back(before);
        pop = advance_population(pop, d, params, static_cast<long long>(k));
        pop.t = static_cast<double>(k + 1) * params.dt;
    }
    if (options.snapshot_every != 0 && steps % options.snapshot_every == 0)
        run.snapshots.push_back({steps, pop.x, pop.y});
    const double sf_last = fundamental.at(steps);
    traj.samples.push_back(mean_sample(pop, evaluate_micro_demand(pop, params, scheme, sf_last), sf_last));
    return run;
}

} // namespace mfp
