#include "mfp/macro_analysis.hpp"

#include "mfp/error.hpp"

#include <algorithm>
#include <cmath>

namespace mfp {

namespace {

ModelParams with_chi(const ModelParams& params, std::optional<double> chi)
{
    ModelParams p = params;
    if (chi)
        p.chi_mode = ChiMode::constant(*chi);
    return p;
}

} // namespace

double equilibrium_price_bisection(const ModelParams& params, std::optional<double> chi)
{
    const ModelParams p = with_chi(params, chi);
    auto k_at = [&](double s) { return combined_return(s, 0.0, p).k; };
    double lo = 1e-9 * p.s_f;
    double hi = 10.0 * p.s_f;
    double k_lo = k_at(lo);
    const double k_hi = k_at(hi);
    if (k_lo == 0.0)
        return lo;
    if (k_hi == 0.0)
        return hi;
    if ((k_lo > 0.0) == (k_hi > 0.0))
        throw Error(ErrorCode::NoRoot, "K has constant sign on (0, 10 s_f]");
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        const double k_mid = k_at(mid);
        if (k_mid == 0.0)
            return mid;
        if ((k_mid > 0.0) == (k_lo > 0.0)) {
            lo = mid;
            k_lo = k_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double equilibrium_price(const ModelParams& params, std::optional<double> chi)
{
    const ModelParams p = with_chi(params, chi);
    if (p.value_fn_mode == ValueFnMode::identity && p.chi_mode.is_constant()) {
        const double c = p.chi_mode.chi0;
        const double B = c * p.omega + p.r;
        if (B > 0.0)
            return (c * p.omega * p.s_f + (1.0 - c) * p.dividend) / B;
        throw Error(ErrorCode::NoRoot, "chi omega + r = 0: K has no root");
    }
    return equilibrium_price_bisection(p);
}

const char* to_string(SteadyStateCase c)
{
    switch (c) {
    case SteadyStateCase::i: return "i";
    case SteadyStateCase::ii: return "ii";
    case SteadyStateCase::iii: return "iii";
    case SteadyStateCase::iv: return "iv";
    case SteadyStateCase::v: return "v";
    case SteadyStateCase::none: return "none";
    }
    return "none";
}

SteadyStateCase classify_steady_state(double X, double Y, double S, const ModelParams& params, double tol)
{
    auto zero = [tol](double v) { return std::abs(v) <= tol; };
    if (zero(X) && zero(Y))
        return SteadyStateCase::i;
    const double k = combined_return(S, 0.0, params).k;
    const bool d0 = zero(params.dividend);
    const bool r0 = zero(params.r);
    if (zero(k) && zero(Y) && d0)
        return SteadyStateCase::ii;
    if (zero(k) && r0 && d0)
        return SteadyStateCase::iii;
    if (k > tol && zero(Y) && d0)
        return SteadyStateCase::iv;
    if (k < -tol && zero(X) && r0)
        return SteadyStateCase::v;
    return SteadyStateCase::none;
}

StabilityVerdict stability_probe(const ModelParams& params, double perturbation, double X0, double Y0,
                                 const SchemeConfig& scheme)
{
    if (params.r != 0.0 || params.dividend != 0.0)
        throw Error(ErrorCode::InvalidArgument, "stability probe needs r = D = 0");
    if (params.value_fn_mode != ValueFnMode::identity || !params.chi_mode.is_constant())
        throw Error(ErrorCode::InvalidArgument, "stability probe needs identity U and constant chi");

    StabilityVerdict v;
    v.equilibrium = equilibrium_price(params);
    MacroState init;
    init.X = X0;
    init.Y = Y0;
    init.S = v.equilibrium * (1.0 + perturbation);
    const Trajectory traj = run_macro(init, params, scheme, FundamentalPath::constant(params.s_f));

    v.initial_deviation = std::abs(traj.samples.front().S - v.equilibrium);
    v.final_deviation = std::abs(traj.samples.back().S - v.equilibrium);
    if (v.initial_deviation == 0.0) {
        v.stable = v.final_deviation == 0.0;
        return v;
    }
    const std::size_t transient = traj.samples.size() / 100;
    const double noise = 1e-12 * v.equilibrium;
    bool monotone = true;
    for (std::size_t j = std::max<std::size_t>(transient, 1); j < traj.samples.size(); ++j) {
        const double prev = std::abs(traj.samples[j - 1].S - v.equilibrium);
        const double cur = std::abs(traj.samples[j].S - v.equilibrium);
        v.max_increase = std::max(v.max_increase, cur - prev);
        if (cur > prev + noise)
            monotone = false;
    }
    v.stable = monotone && v.final_deviation < 0.01 * v.initial_deviation;
    return v;
}

} // namespace mfp
