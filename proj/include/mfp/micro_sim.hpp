#pragma once

// Finite-N agent system under the closed-form myopic (one-step MPC) control,
// including the O(1/N) price-impact corrections.

#include "mfp/core_model.hpp"
#include "mfp/macro_sim.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace mfp {

/// Number of agents entering the kappa/N coefficients. mean_field() drops the
/// correction terms (N = infinity).
class AgentCount {
public:
    constexpr explicit AgentCount(std::size_t n) : n_(n) {}
    static constexpr AgentCount mean_field() { return AgentCount(0); }

    constexpr bool is_mean_field() const { return n_ == 0; }
    constexpr std::size_t value() const { return n_; }
    constexpr double inverse() const { return n_ == 0 ? 0.0 : 1.0 / static_cast<double>(n_); }

private:
    std::size_t n_;
};

struct AgentPopulation {
    std::vector<double> x; // stock wealth per agent
    std::vector<double> y; // bond wealth per agent
    double S = 0.0;
    double ed_prev = 0.0;
    double t = 0.0;

    std::size_t size() const { return x.size(); }
    void validate() const;

    static AgentPopulation homogeneous(std::size_t n, double x0, double y0, double S0);
    /// x_i, y_i independently uniform on [w_min, w_max], counter-based in seed.
    static AgentPopulation uniform_wealth(std::size_t n, double w_min, double w_max, double S0, std::uint64_t seed);
};

/// d K / d S at fixed dS/dt. Analytic for identity U with constant chi,
/// otherwise a central difference of combined_return with h = 1e-6 S.
double dK_dS_eval(double price, double price_rate, const ModelParams& params);
double dK_dS_eval(double price, double price_rate, double s_f, const ModelParams& params);
double dK_dS_finite_difference(double price, double price_rate, double s_f, const ModelParams& params);

/// Closed-form p = 1 control for one agent with wealth (x, y).
double myopic_control(double x, double y, double price, const ReturnEstimate& est, double dK_dS, AgentCount n,
                      const ModelParams& params);
double myopic_control(std::size_t i, const AgentPopulation& pop, const ReturnEstimate& est, double dK_dS,
                      const ModelParams& params);

/// Order-independent pairwise sum: values are sorted before the cascade.
double canonical_sum(std::span<const double> values);

/// ED_N: mean of the myopic controls of all agents.
double aggregate_demand(const AgentPopulation& pop, const ReturnEstimate& est, double dK_dS, const ModelParams& params);

struct MicroDemand {
    ReturnEstimate est;
    double dK_dS = 0.0;
    double ed = 0.0;
    bool fp_fallback = false;
};

MicroDemand evaluate_micro_demand(const AgentPopulation& pop, const ModelParams& params, const SchemeConfig& scheme,
                                  double s_f_current);

struct MicroStep {
    AgentPopulation pop;
    MicroDemand demand;
};

MicroStep micro_step(const AgentPopulation& pop, const ModelParams& params, const SchemeConfig& scheme,
                     double s_f_current, long long step_index = 0);

struct MicroRunOptions {
    std::size_t stride = 1;
    std::size_t max_steps = std::numeric_limits<std::size_t>::max(); // clip the run length
    std::size_t snapshot_every = 0; // 0 disables per-agent snapshots
};

struct AgentSnapshot {
    std::size_t step = 0;
    std::vector<double> x;
    std::vector<double> y;
};

struct MicroRun {
    Trajectory mean; // X, Y are population means, ED is ED_N
    std::vector<AgentSnapshot> snapshots;
};

MicroRun run_micro(const AgentPopulation& init, const ModelParams& params, const SchemeConfig& scheme,
                   const FundamentalPath& fundamental, MicroRunOptions options = {});

} // namespace mfp
