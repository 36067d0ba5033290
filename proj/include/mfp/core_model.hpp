#pragma once

// Behavioural and market primitives of the heterogeneous-agent portfolio
// model: value function, weight function, fundamentalist/chartist return
// estimates, mean-field excess demand and the MPC rationality degree.

#include <cstdint>

namespace mfp {

enum class ValueFnMode { identity, prospect };

struct ChiMode {
    enum class Kind { dynamic, constant };
    Kind kind = Kind::dynamic;
    double chi0 = 0.5; // used only when kind == constant

    static ChiMode dynamic() { return {Kind::dynamic, 0.5}; }
    static ChiMode constant(double chi) { return {Kind::constant, chi}; }
    bool is_constant() const { return kind == Kind::constant; }
    bool operator==(const ChiMode&) const = default;
};

/// All market and behaviour constants. Call validate() after filling the
/// fields by hand; every entry point that consumes parameters re-validates.
/// The transaction-cost penalty is always nu * dt and is never stored.
struct ModelParams {
    double kappa = 0.1;    // market depth
    double nu = 5.0;       // transaction-cost rate
    double r = 0.01;       // bond interest rate
    double dividend = 0.01;
    double s_f = 5.5;      // fundamental price
    double omega = 20.0;   // mean-reversion speed
    double gamma = 0.35;   // risk tolerance
    double alpha = 0.5;    // return scale in the weight function
    double beta = 0.25;    // trust coefficient
    double dt = 1e-4;
    double t_end = 3.0;
    ChiMode chi_mode = ChiMode::dynamic();
    ValueFnMode value_fn_mode = ValueFnMode::prospect;

    /// Throws ValidationError naming the offending field.
    void validate() const;

    double penalty() const { return nu * dt; }

    /// Standard parameter table: dt=1e-4, D=r=0.01, alpha=0.5, omega=20,
    /// s_f=5.5, gamma=0.35, kappa=0.1, nu=5, T=3 (beta=0.25).
    static ModelParams standard() { return {}; }

    bool operator==(const ModelParams&) const = default;
};

struct ReturnEstimate {
    double k_f = 0.0;
    double k_c = 0.0;
    double chi = 0.0;
    double k = 0.0;
};

struct RationalityConfig {
    double t_total = 1.0;
    double dt = 1.0;
    std::int64_t p = 1;
};

double value_fn(double x, const ModelParams& params);

/// Weight of the fundamentalist estimate as a function of K^f - K^c.
double weight_fn(double delta, const ModelParams& params);

double fundamental_return(double price, const ModelParams& params);
double fundamental_return(double price, double s_f, const ModelParams& params);
double chartist_return(double price, double price_rate, const ModelParams& params);

ReturnEstimate combined_return(double price, double price_rate, const ModelParams& params);
ReturnEstimate combined_return(double price, double price_rate, double s_f, const ModelParams& params);

/// Mean-field excess demand: K*X/nu for K<0, K*Y/nu for K>0, 0 at K=0.
double excess_demand_macro(double stock_wealth, double bond_wealth, const ReturnEstimate& est,
                           const ModelParams& params);

/// theta = 1 - exp((1 - p) / T). Zero for the myopic horizon p = 1.
double rationality_degree(const RationalityConfig& cfg);

} // namespace mfp
