#include "mfp/mpc_verify.hpp"

#include "mfp/error.hpp"
#include "mfp/stochastic.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace mfp {

PsiGradient psi_gradient(double x, double y, const ReturnEstimate& est, double dK_dS)
{
    PsiGradient g;
    if (est.k < 0.0) {
        // |K| = -K, d|K|/dS = -dK/dS
        g.stock_active = true;
        g.d_x = -est.k * x;
        g.d_S = -dK_dS * x * x / 2.0;
    } else if (est.k > 0.0) {
        g.bond_active = true;
        g.d_y = est.k * y;
        g.d_S = dK_dS * y * y / 2.0;
    }
    return g;
}

AdjointState backward_euler_costates(const AdjointState& terminal, const PsiGradient& grad, const AdjointInputs& in,
                                     double dt)
{
    // (l(t+dt) - l(t)) / dt = rhs evaluated at t + dt
    const double rhs_x = -in.kappa * in.ed * terminal.lambda_x - in.dividend / in.S * terminal.lambda_x - grad.d_x;
    const double rhs_y = -in.r * terminal.lambda_y - grad.d_y;
    const double rhs_S = terminal.lambda_x * in.dividend / (in.S * in.S) * in.x - in.kappa * in.ed * terminal.lambda_S -
                         grad.d_S;
    return {terminal.lambda_x - dt * rhs_x, terminal.lambda_y - dt * rhs_y, terminal.lambda_S - dt * rhs_S};
}

double stationarity_control(const AdjointState& l, double x, double S, AgentCount n, double kappa, double nu,
                            double dt)
{
    const double c = kappa * n.inverse();
    return (-l.lambda_x - l.lambda_x * c * x + l.lambda_y - c * S * l.lambda_S) / (nu * dt);
}

double one_step_control(double x, double y, double S, const ModelParams& params, AgentCount n, double price_rate)
{
    return one_step_control(x, y, S, params.s_f, params, n, price_rate);
}

double one_step_control(double x, double y, double S, double s_f, const ModelParams& params, AgentCount n,
                        double price_rate)
{
    if (!(S > 0.0))
        throw Error(ErrorCode::NonpositivePrice, "price must be > 0");
    const ReturnEstimate est = combined_return(S, price_rate, s_f, params);
    const double dk = dK_dS_eval(S, price_rate, s_f, params);
    const PsiGradient grad = psi_gradient(x, y, est, dk);
    const AdjointInputs in{x, S, 0.0, params.dividend, params.kappa, params.r};
    const AdjointState costates = backward_euler_costates(AdjointState{}, grad, in, params.dt);
    return stationarity_control(costates, x, S, n, params.kappa, params.nu, params.dt);
}

bool MpcVerification::passed() const
{
    return positive_k > 0 && negative_k > 0 && worst.deviation <= tolerance && worst_dt_spread <= dt_tolerance;
}

MpcVerification verify_mpc(const ModelParams& params, std::size_t states, std::uint64_t seed)
{
    params.validate();

    struct Variant {
        const char* name;
        ModelParams p;
    };
    std::vector<Variant> variants;
    {
        ModelParams a = params;
        a.value_fn_mode = ValueFnMode::identity;
        a.chi_mode = ChiMode::constant(1.0);
        variants.push_back({"identity/chi=1", a});
        ModelParams b = a;
        b.chi_mode = ChiMode::constant(0.5);
        variants.push_back({"identity/chi=0.5", b});
        ModelParams c = params;
        c.value_fn_mode = ValueFnMode::prospect;
        c.chi_mode = ChiMode::dynamic();
        if (c.gamma <= 0.05)
            c.gamma = 0.35;
        variants.push_back({"prospect/dynamic", c});
    }
    constexpr std::array<std::size_t, 4> agent_counts{1, 10, 100, 0};
    constexpr std::array<double, 3> dts{1e-3, 1e-4, 1e-5};

    MpcVerification v;
    v.states = states;
    std::uint64_t counter = 0;
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * uniform_open(seed, counter++); };

    for (std::size_t i = 0; i < states; ++i) {
        const Variant& var = variants[i % variants.size()];
        const ModelParams& p = var.p;
        MpcCase c;
        c.variant = var.name;
        c.x = uni(0.0, 40.0);
        c.y = uni(0.0, 40.0);
        // alternate below/above the fundamental to cover both signs of K
        c.S = (i / variants.size()) % 2 == 0 ? uni(0.3 * p.s_f, 0.97 * p.s_f) : uni(1.03 * p.s_f, 2.0 * p.s_f);
        c.price_rate = uni(-0.05, 0.05) * c.S;
        c.n = agent_counts[(i / 2) % agent_counts.size()];
        const AgentCount n(c.n);

        const ReturnEstimate est = combined_return(c.S, c.price_rate, p);
        if (est.k > 0.0)
            ++v.positive_k;
        else if (est.k < 0.0)
            ++v.negative_k;
        const double dk = dK_dS_eval(c.S, c.price_rate, p);
        c.u_closed = myopic_control(c.x, c.y, c.S, est, dk, n, p);
        c.u_adjoint = one_step_control(c.x, c.y, c.S, p, n, c.price_rate);
        c.deviation = std::abs(c.u_adjoint - c.u_closed) / (1.0 + std::abs(c.u_closed));
        if (i == 0 || c.deviation > v.worst.deviation)
            v.worst = c;

        double lo = c.u_adjoint;
        double hi = c.u_adjoint;
        for (double dt : dts) {
            ModelParams q = p;
            q.dt = dt;
            const double u = one_step_control(c.x, c.y, c.S, q, n, c.price_rate);
            lo = std::min(lo, u);
            hi = std::max(hi, u);
        }
        v.worst_dt_spread = std::max(v.worst_dt_spread, (hi - lo) / (1.0 + std::abs(c.u_adjoint)));
    }
    return v;
}

std::string to_json(const MpcVerification& v, int indent)
{
    const auto& w = v.worst;
    nlohmann::json j = {
        {"passed", v.passed()},
        {"states", v.states},
        {"positive_k", v.positive_k},
        {"negative_k", v.negative_k},
        {"tolerance", v.tolerance},
        {"worst_deviation", w.deviation},
        {"worst_state",
         {{"x", w.x}, {"y", w.y}, {"S", w.S}, {"S_dot", w.price_rate}, {"N", w.n}, {"variant", w.variant},
          {"u_closed_form", w.u_closed}, {"u_optimality_system", w.u_adjoint}}},
        {"dt_tolerance", v.dt_tolerance},
        {"worst_dt_spread", v.worst_dt_spread},
    };
    return j.dump(indent);
}

} // namespace mfp
