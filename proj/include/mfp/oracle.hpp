#pragma once

// Closed-form solutions of the constant-chi, identity-value-function model,
// evaluated by trapezoidal quadrature along a simulated trajectory.
//
// With A = chi*omega*s_f + (1-chi)*D and B = chi*omega + r, the implicit
// price equation becomes explicit:
//   dS/dt = (A - B S) g,   g = kappa W / (nu - (1-chi) kappa W),
// where W = Y while K > 0 and W = X while K < 0. Hence
//   S(t) = A/B + (S(t_a) - A/B) exp(-B int g).
// The return estimate itself is K = nu (A - B S) / (S (nu - (1-chi) kappa W)).
// Wealth forms: Y is linear in Y for K > 0 and affine in X for K < 0; X is
// affine (variation of constants) for K > 0 and a Bernoulli equation for K < 0.

#include "mfp/macro_sim.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace mfp {

struct OracleRegime {
    enum class Kind { fundamentalist, chartist, mixed };
    Kind kind = Kind::fundamentalist;
    double chi = 1.0;

    static OracleRegime fundamentalist() { return {Kind::fundamentalist, 1.0}; }
    static OracleRegime chartist() { return {Kind::chartist, 0.0}; }
    static OracleRegime mixed(double chi) { return {Kind::mixed, chi}; }
    /// Regime matching a constant-chi parameter set.
    static OracleRegime from_params(const ModelParams& params);
};

enum class Portfolio { stock, bond };
enum class CrossingPolicy { split, reject };

struct ClosedFormSeries {
    std::vector<double> values;
    /// Sample indices at which sign(K) changed; evaluation restarts there.
    std::vector<std::size_t> crossings;
};

/// Sign of K and the explicit-form rate g at one sample.
struct Branch {
    int sign = 0;
    double rate = 0.0; // g
    double k = 0.0;    // explicit K
};

Branch explicit_branch(const Sample& s, const ModelParams& params, double chi);

ClosedFormSeries stock_closed_form(const Trajectory& traj, const ModelParams& params, OracleRegime regime,
                                   CrossingPolicy policy = CrossingPolicy::split);

ClosedFormSeries wealth_closed_form(const Trajectory& traj, const ModelParams& params, Portfolio portfolio,
                                    CrossingPolicy policy = CrossingPolicy::split);

struct ChannelDeviation {
    std::string channel;
    double max_rel_dev = 0.0;
    double at_t = 0.0;
    std::size_t crossings = 0;
};

struct OracleReport {
    std::vector<ChannelDeviation> channels; // S, X, Y
    std::size_t crossings = 0;

    double worst() const;
    const ChannelDeviation& channel(const std::string& name) const;
};

OracleReport oracle_report(const Trajectory& traj, const ModelParams& params);

std::string to_json(const OracleReport& report, int indent = 2);

} // namespace mfp
