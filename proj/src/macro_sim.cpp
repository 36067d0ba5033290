#include "mfp/macro_sim.hpp"

#include "mfp/error.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace mfp {

const char* to_string(Scheme scheme)
{
    return scheme == Scheme::lagged_euler ? "lagged_euler" : "fixed_point_euler";
}

Scheme scheme_from_string(const std::string& name)
{
    if (name == "lagged_euler" || name == "lagged")
        return Scheme::lagged_euler;
    if (name == "fixed_point_euler" || name == "fixed_point")
        return Scheme::fixed_point_euler;
    throw ValidationError("scheme", "must be lagged_euler or fixed_point_euler, got '" + name + "'");
}

void SchemeConfig::validate() const
{
    if (!(fp_tol > 0.0))
        throw ValidationError("fp_tol", "must be > 0");
    if (fp_max_iter < 1)
        throw ValidationError("fp_max_iter", "must be >= 1");
    if (!(fp_damping > 0.0 && fp_damping <= 1.0))
        throw ValidationError("fp_damping", "must lie in (0, 1]");
}

namespace {

DemandEval demand_for_rate(const MacroState& state, double assumed_ed, const ModelParams& params, double s_f)
{
    DemandEval out;
    out.est = combined_return(state.S, params.kappa * assumed_ed * state.S, s_f, params);
    out.ed = excess_demand_macro(state.X, state.Y, out.est, params);
    return out;
}

} // namespace

std::optional<double> solve_demand_fixed_point(const std::function<double(double)>& demand, double e0,
                                               const SchemeConfig& scheme, int* iterations)
{
    auto converged = [&](double a, double b) { return std::abs(b - a) <= scheme.fp_tol * (1.0 + std::abs(b)); };
    auto report = [&](int n) {
        if (iterations)
            *iterations = n;
    };

    double e = e0;
    for (int it = 1; it <= scheme.fp_max_iter; ++it) {
        const double next = (1.0 - scheme.fp_damping) * e + scheme.fp_damping * demand(e);
        if (!std::isfinite(next))
            break;
        if (converged(e, next)) {
            report(it);
            return next;
        }
        e = next;
    }

    // The damped map stops contracting where U has a steep slope (prospect U
    // near zero return). g(e) = ED(e) - e grows sublinearly in |e|, so a sign
    // change exists; bracket the root nearest to e0.
    auto g = [&](double x) { return demand(x) - x; };
    const double g0 = g(e0);
    report(scheme.fp_max_iter);
    if (g0 == 0.0)
        return e0;
    if (!std::isfinite(g0))
        return std::nullopt;
    double h = std::max(1e-8, 1e-6 * std::abs(e0));
    for (int expand = 0; expand < 200; ++expand, h *= 2.0) {
        for (double side : {-1.0, 1.0}) {
            const double e1 = e0 + side * h;
            const double g1 = g(e1);
            if (!std::isfinite(g1) || (g1 > 0.0) == (g0 > 0.0))
                continue;
            auto max_iter = static_cast<std::uintmax_t>(scheme.fp_max_iter);
            const double lo = std::min(e0, e1), hi = std::max(e0, e1);
            const double glo = lo == e0 ? g0 : g1, ghi = hi == e0 ? g0 : g1;
            const auto root = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, converged, max_iter);
            report(scheme.fp_max_iter + static_cast<int>(max_iter));
            if (!converged(root.first, root.second))
                return std::nullopt;
            return 0.5 * (root.first + root.second);
        }
    }
    return std::nullopt;
}

DemandEval evaluate_macro_demand(const MacroState& state, const ModelParams& params, const SchemeConfig& scheme,
                                 double s_f_current)
{
    const DemandEval lagged = demand_for_rate(state, state.ed_prev, params, s_f_current);
    if (scheme.scheme == Scheme::lagged_euler)
        return lagged;

    int iterations = 0;
    const auto e = solve_demand_fixed_point(
        [&](double x) { return demand_for_rate(state, x, params, s_f_current).ed; }, state.ed_prev, scheme,
        &iterations);
    DemandEval out = e ? demand_for_rate(state, *e, params, s_f_current) : lagged;
    out.fp_fallback = !e;
    out.fp_iterations = iterations;
    return out;
}

MacroState advance_macro(const MacroState& state, double ed, const ModelParams& params, long long step_index)
{
    // (dS/dt + D)/S in the stock-wealth equation is kappa*ED + D/S.
    const double stock_return = params.kappa * ed + params.dividend / state.S;
    MacroState next;
    next.t = state.t + params.dt;
    next.X = state.X + params.dt * (stock_return * state.X + ed);
    next.Y = state.Y + params.dt * (params.r * state.Y - ed);
    next.S = state.S + params.dt * params.kappa * ed * state.S;
    next.ed_prev = ed;
    if (!(next.X >= 0.0) || !(next.Y >= 0.0) || !(next.S > 0.0)) {
        throw StepError(ErrorCode::StepSizeTooLarge, step_index,
                        "step " + std::to_string(step_index) + " leaves the admissible set (X=" +
                            std::to_string(next.X) + ", Y=" + std::to_string(next.Y) +
                            ", S=" + std::to_string(next.S) + "); reduce dt");
    }
    return next;
}

MacroStep macro_step(const MacroState& state, const ModelParams& params, const SchemeConfig& scheme,
                     double s_f_current, long long step_index)
{
    MacroStep out;
    out.demand = evaluate_macro_demand(state, params, scheme, s_f_current);
    out.state = advance_macro(state, out.demand.ed, params, step_index);
    return out;
}

std::size_t step_count(double t_end, double dt)
{
    const double n = t_end / dt;
    const double nearest = std::round(n);
    if (std::abs(n - nearest) <= 1e-9 * std::max(1.0, n))
        return static_cast<std::size_t>(nearest);
    return static_cast<std::size_t>(std::ceil(n));
}

double transfer_residual(const Sample& before, const Sample& after, const ModelParams& params)
{
    const double rhs = params.dt * ((params.kappa * before.ED + params.dividend / before.S) * before.X +
                                    params.r * before.Y);
    const double lhs = (after.X - before.X) + (after.Y - before.Y);
    const double scale = std::abs(before.X) + std::abs(before.Y) + std::abs(rhs);
    return scale > 0.0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
}

namespace {

Sample make_sample(const MacroState& s, const DemandEval& d, double sf)
{
    return {s.t, s.X, s.Y, s.S, d.ed, d.est.chi, d.est.k, sf};
}

} // namespace

Trajectory run_macro(const MacroState& init, const ModelParams& params, const SchemeConfig& scheme,
                     const FundamentalPath& fundamental, RunOptions options)
{
    params.validate();
    scheme.validate();
    if (options.stride < 1)
        throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
    if (!(init.X >= 0.0) || !(init.Y >= 0.0) || !(init.S > 0.0))
        throw Error(ErrorCode::InvalidArgument, "initial state needs X >= 0, Y >= 0, S > 0");

    const std::size_t steps = step_count(params.t_end, params.dt);
    if (!fundamental.is_constant() && fundamental.samples.size() < steps + 1)
        throw Error(ErrorCode::InvalidArgument, "fundamental path shorter than the run");

    Trajectory traj;
    traj.params = params;
    traj.scheme = scheme;
    traj.stride = options.stride;
    traj.steps = steps;
    traj.constant_fundamental = fundamental.is_constant();
    traj.samples.reserve(1 + (steps + options.stride - 1) / options.stride);

    MacroState state = init;
    state.t = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double sf = fundamental.at(k);
        const DemandEval demand = evaluate_macro_demand(state, params, scheme, sf);
        if (demand.fp_fallback)
            ++traj.fp_fallbacks;
        MacroState next = advance_macro(state, demand.ed, params, static_cast<long long>(k));
        next.t = static_cast<double>(k + 1) * params.dt;

        const Sample before = make_sample(state, demand, sf);
        if (k % options.stride == 0)
            traj.samples.push_back(before);
        const Sample after{next.t, next.X, next.Y, next.S, 0.0, 0.0, 0.0, 0.0};
        traj.max_transfer_residual = std::max(traj.max_transfer_residual, transfer_residual(before, after, params));
        state = next;
    }
    const double sf_last = fundamental.at(steps);
    const DemandEval last = evaluate_macro_demand(state, params, scheme, sf_last);
    traj.samples.push_back(make_sample(state, last, sf_last));
    return traj;
}

} // namespace mfp
