#pragma once

#include "mfp/core_model.hpp"
#include "mfp/macro_sim.hpp"

#include <optional>
#include <string>

namespace mfp {

/// Root of K(S) = 0 at dS/dt = 0. With chi given, chi is held constant;
/// otherwise the configured chi mode is used. Identity U with constant chi
/// returns (chi omega s_f + (1-chi) D) / (chi omega + r); every other case
/// bisects on (0, 10 s_f] to relative 1e-12. Throws NoRoot when K has one
/// sign on the bracket.
double equilibrium_price(const ModelParams& params, std::optional<double> chi = std::nullopt);
double equilibrium_price_bisection(const ModelParams& params, std::optional<double> chi = std::nullopt);

enum class SteadyStateCase { i, ii, iii, iv, v, none };

const char* to_string(SteadyStateCase c);

/// First matching steady-state configuration (K at dS/dt = 0, equalities
/// tested to 1e-10):
///   i   X = 0, Y = 0
///   ii  K = 0, Y = 0, D = 0
///   iii K = 0, r = 0, D = 0
///   iv  K > 0, Y = 0, D = 0
///   v   K < 0, X = 0, r = 0
SteadyStateCase classify_steady_state(double X, double Y, double S, const ModelParams& params,
                                      double tol = 1e-10);

struct StabilityVerdict {
    bool stable = false;
    double equilibrium = 0.0;
    double initial_deviation = 0.0;
    double final_deviation = 0.0;
    double max_increase = 0.0; // largest step-to-step growth of |S - S_eq| after the transient
};

/// Runs the macro model from S_eq (1 + perturbation) (X0, Y0 as given) and
/// checks that |S - S_eq| is non-increasing after the first 1% of steps and
/// ends below 1% of its initial value. Needs r = D = 0, identity U and
/// constant chi.
StabilityVerdict stability_probe(const ModelParams& params, double perturbation, double X0 = 20.0, double Y0 = 20.0,
                                 const SchemeConfig& scheme = {});

} // namespace mfp
