#pragma once

// Forward-Euler integration of the mean-field (X, Y, S) system. The stock
// price equation is implicit because the chartist estimate depends on dS/dt;
// the lagged scheme closes it with the previous step's demand, the
// fixed-point scheme solves e = ED(K(e)) within the step.

#include "mfp/core_model.hpp"
#include "mfp/stochastic.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mfp {

enum class Scheme { lagged_euler, fixed_point_euler };

const char* to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct SchemeConfig {
    Scheme scheme = Scheme::lagged_euler;
    double fp_tol = 1e-12;
    int fp_max_iter = 100;
    double fp_damping = 0.5;

    void validate() const;
    bool operator==(const SchemeConfig&) const = default;
};

struct MacroState {
    double t = 0.0;
    double X = 0.0;
    double Y = 0.0;
    double S = 0.0;
    double ed_prev = 0.0;
};

/// Demand evaluated at one state: the estimate, the excess demand and how
/// the dS/dt circularity was closed.
struct DemandEval {
    ReturnEstimate est;
    double ed = 0.0;
    bool fp_fallback = false; // fixed-point iteration failed, lagged value used
    int fp_iterations = 0;
};

struct MacroStep {
    MacroState state;
    DemandEval demand;
};

/// Solves e = demand(e) starting from e0: damped iteration first, then a
/// bracketed root search around e0. nullopt when both fail.
std::optional<double> solve_demand_fixed_point(const std::function<double(double)>& demand, double e0,
                                               const SchemeConfig& scheme, int* iterations = nullptr);

DemandEval evaluate_macro_demand(const MacroState& state, const ModelParams& params, const SchemeConfig& scheme,
                                 double s_f_current);

/// Applies one Euler step with an already evaluated demand. Throws
/// StepError(StepSizeTooLarge) if X or Y would turn negative or S nonpositive.
MacroState advance_macro(const MacroState& state, double ed, const ModelParams& params, long long step_index = 0);

MacroStep macro_step(const MacroState& state, const ModelParams& params, const SchemeConfig& scheme,
                     double s_f_current, long long step_index = 0);

struct Sample {
    double t = 0.0;
    double X = 0.0;
    double Y = 0.0;
    double S = 0.0;
    double ED = 0.0;
    double chi = 0.0;
    double K = 0.0;
    double sf = 0.0;
};

struct Trajectory {
    ModelParams params;
    SchemeConfig scheme;
    std::size_t stride = 1;
    std::size_t steps = 0;
    bool constant_fundamental = true;
    std::vector<Sample> samples;
    std::size_t fp_fallbacks = 0;
    /// max over steps of |dX + dY - dt [(kappa ED + D/S) X + r Y]| / scale
    double max_transfer_residual = 0.0;

    std::size_t size() const { return samples.size(); }
};

/// Number of Euler steps covering [0, t_end]; exact multiples are not
/// rounded up by floating noise.
std::size_t step_count(double t_end, double dt);

struct RunOptions {
    std::size_t stride = 1;
};

Trajectory run_macro(const MacroState& init, const ModelParams& params, const SchemeConfig& scheme,
                     const FundamentalPath& fundamental, RunOptions options = {});

/// Residual of the transfer-cancellation identity for one step, normalised
/// by the wealth scale |X| + |Y| + dt |rhs|.
double transfer_residual(const Sample& before, const Sample& after, const ModelParams& params);

} // namespace mfp
