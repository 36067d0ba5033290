#include "mfp/core_model.hpp"

#include "mfp/error.hpp"

#include <cmath>
#include <string>

namespace mfp {

namespace {

void require(bool ok, const char* field, const char* constraint)
{
    if (!ok)
        throw ValidationError(field, constraint);
}

void require_price(double price)
{
    if (!(price > 0.0))
        throw Error(ErrorCode::NonpositivePrice, "price must be > 0, got " + std::to_string(price));
}

} // namespace

void ModelParams::validate() const
{
    require(std::isfinite(kappa) && kappa > 0.0, "kappa", "must be > 0");
    require(std::isfinite(nu) && nu > 0.0, "nu", "must be > 0");
    require(std::isfinite(r) && r >= 0.0, "r", "must be >= 0");
    require(std::isfinite(dividend) && dividend >= 0.0, "dividend", "must be >= 0");
    require(std::isfinite(s_f) && s_f > 0.0, "s_f", "must be > 0");
    require(std::isfinite(omega) && omega > 0.0, "omega", "must be > 0");
    require(gamma >= 0.05 && gamma <= 0.95, "gamma", "must lie in [0.05, 0.95]");
    // At gamma = 0.05 the loss exponent is 0 and U jumps to -1 for every loss.
    require(value_fn_mode != ValueFnMode::prospect || gamma > 0.05, "gamma",
            "must be > 0.05 in prospect mode (loss exponent gamma-0.05 would be 0)");
    require(std::isfinite(alpha) && alpha > 0.0, "alpha", "must be > 0");
    require(beta >= 0.0 && beta <= 1.0, "beta", "must lie in [0, 1]");
    require(std::isfinite(dt) && dt > 0.0, "dt", "must be > 0");
    require(std::isfinite(t_end) && t_end > 0.0, "t_end", "must be > 0");
    require(!chi_mode.is_constant() || (chi_mode.chi0 >= 0.0 && chi_mode.chi0 <= 1.0), "chi0",
            "must lie in [0, 1]");
}

double value_fn(double x, const ModelParams& params)
{
    if (params.value_fn_mode == ValueFnMode::identity)
        return x;
    if (x > 0.0)
        return std::pow(x, params.gamma + 0.05);
    if (x < 0.0)
        return -std::pow(-x, params.gamma - 0.05);
    return 0.0;
}

double weight_fn(double delta, const ModelParams& params)
{
    const double s = std::tanh(delta / params.alpha);
    return params.beta * (0.5 * s + 0.5) + (1.0 - params.beta) * (0.5 * -s + 0.5);
}

double fundamental_return(double price, const ModelParams& params)
{
    return fundamental_return(price, params.s_f, params);
}

double fundamental_return(double price, double s_f, const ModelParams& params)
{
    require_price(price);
    return value_fn(params.omega * (s_f - price) / price, params) - params.r;
}

double chartist_return(double price, double price_rate, const ModelParams& params)
{
    require_price(price);
    return value_fn((price_rate + params.dividend) / price, params) - params.r;
}

ReturnEstimate combined_return(double price, double price_rate, const ModelParams& params)
{
    return combined_return(price, price_rate, params.s_f, params);
}

ReturnEstimate combined_return(double price, double price_rate, double s_f, const ModelParams& params)
{
    ReturnEstimate est;
    est.k_f = fundamental_return(price, s_f, params);
    est.k_c = chartist_return(price, price_rate, params);
    est.chi = params.chi_mode.is_constant() ? params.chi_mode.chi0 : weight_fn(est.k_f - est.k_c, params);
    est.k = est.chi * est.k_f + (1.0 - est.chi) * est.k_c;
    return est;
}

double excess_demand_macro(double stock_wealth, double bond_wealth, const ReturnEstimate& est,
                           const ModelParams& params)
{
    if (est.k < 0.0)
        return est.k * stock_wealth / params.nu;
    if (est.k > 0.0)
        return est.k * bond_wealth / params.nu;
    return 0.0;
}

double rationality_degree(const RationalityConfig& cfg)
{
    if (!(cfg.dt > 0.0) || !(cfg.t_total >= 2.0 * cfg.dt))
        throw Error(ErrorCode::HorizonOutOfRange, "rationality degree needs dt > 0 and T >= 2 dt");
    const auto max_p = static_cast<std::int64_t>(std::floor(cfg.t_total / cfg.dt * (1.0 + 1e-12)));
    if (cfg.p < 1 || cfg.p > max_p)
        throw Error(ErrorCode::HorizonOutOfRange,
                    "horizon p=" + std::to_string(cfg.p) + " outside [1, " + std::to_string(max_p) + "]");
    const double horizon = static_cast<double>(cfg.p) * cfg.dt;
    return 1.0 - std::exp(1.0 / cfg.t_total - horizon / (cfg.dt * cfg.t_total));
}

} // namespace mfp
