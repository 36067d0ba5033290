#pragma once

// Re-derivation of the p = 1 control from the discrete optimality system:
// running-cost gradients, one backward-Euler step of the adjoint equations
// from zero terminal costates, and the stationarity condition
//   nu dt u = -lx - lx (kappa/N) x + ly - (kappa/N) S lS.
// Used as an independent check of the closed-form myopic_control.

#include "mfp/core_model.hpp"
#include "mfp/micro_sim.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mfp {

struct AdjointState {
    double lambda_x = 0.0;
    double lambda_y = 0.0;
    double lambda_S = 0.0;
};

/// Gradient of the running cost Psi = |K| x^2/2 (K<0), |K| y^2/2 (K>0), 0 (K=0).
struct PsiGradient {
    double d_x = 0.0;
    double d_y = 0.0;
    double d_S = 0.0;
    bool stock_active = false; // K < 0
    bool bond_active = false;  // K > 0
};

PsiGradient psi_gradient(double x, double y, const ReturnEstimate& est, double dK_dS);

/// State at the end of the one-step horizon, used by the adjoint equations.
struct AdjointInputs {
    double x = 0.0;
    double S = 0.0;
    double ed = 0.0;
    double dividend = 0.0;
    double kappa = 0.0;
    double r = 0.0;
};

/// lambda(tbar) from lambda(tbar + dt) by one backward-Euler step.
AdjointState backward_euler_costates(const AdjointState& terminal, const PsiGradient& grad, const AdjointInputs& in,
                                     double dt);

/// Stationarity condition solved for u.
double stationarity_control(const AdjointState& costates, double x, double S, AgentCount n, double kappa, double nu,
                            double dt);

double one_step_control(double x, double y, double S, const ModelParams& params, AgentCount n, double price_rate = 0.0);
double one_step_control(double x, double y, double S, double s_f, const ModelParams& params, AgentCount n,
                        double price_rate);

struct MpcCase {
    double x = 0.0;
    double y = 0.0;
    double S = 0.0;
    double price_rate = 0.0;
    std::size_t n = 0; // 0 = mean field
    std::string variant;
    double u_closed = 0.0;
    double u_adjoint = 0.0;
    double deviation = 0.0;
};

struct MpcVerification {
    std::size_t states = 0;
    std::size_t positive_k = 0;
    std::size_t negative_k = 0;
    MpcCase worst;
    double worst_dt_spread = 0.0; // max relative spread of u over dt in {1e-3, 1e-4, 1e-5}
    double tolerance = 1e-10;
    double dt_tolerance = 1e-14;

    bool passed() const;
};

/// Randomised sweep over states, both signs of K, N in {1, 10, 100} and the
/// parameter variants (identity/constant chi and the configured mode).
MpcVerification verify_mpc(const ModelParams& params, std::size_t states = 1000, std::uint64_t seed = 2024);

std::string to_json(const MpcVerification& v, int indent = 2);

} // namespace mfp
