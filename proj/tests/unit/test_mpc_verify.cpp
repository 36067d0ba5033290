#include "support.hpp"

#include "mfp/error.hpp"
#include "mfp/micro_sim.hpp"
#include "mfp/mpc_verify.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <random>

using namespace mfp;
using test::identity_params;

TEST_CASE("psi_gradient examples")
{
    ReturnEstimate est;
    est.k = 0.0;
    auto g = psi_gradient(20.0, 20.0, est, -4.4);
    CHECK(g.d_x == 0.0);
    CHECK(g.d_y == 0.0);
    CHECK(g.d_S == 0.0);
    CHECK_FALSE(g.stock_active);
    CHECK_FALSE(g.bond_active);

    est.k = -0.5;
    g = psi_gradient(20.0, 7.0, est, 0.3);
    CHECK(g.d_x == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(g.d_y == 0.0);
    // d|K|/dS = sign(K) dK/dS = -0.3
    CHECK(g.d_S == doctest::Approx(-0.3 * 400.0 / 2.0).epsilon(1e-15));
    CHECK(g.stock_active);

    est.k = 1.99;
    g = psi_gradient(3.0, 20.0, est, -4.4);
    CHECK(g.d_y == doctest::Approx(39.8).epsilon(1e-15));
    CHECK(g.d_x == 0.0);
    CHECK(g.d_S == doctest::Approx(-4.4 * 400.0 / 2.0).epsilon(1e-15));
    CHECK(g.bond_active);
}

TEST_CASE("costates from zero terminal values are dt times the gradient")
{
    PsiGradient g;
    g.d_x = 1.5;
    g.d_y = -2.0;
    g.d_S = 0.25;
    const AdjointInputs in{10.0, 5.0, 3.0, 0.01, 0.1, 0.01};
    const auto l = backward_euler_costates(AdjointState{}, g, in, 1e-3);
    CHECK(l.lambda_x == doctest::Approx(1e-3 * 1.5).epsilon(1e-15));
    CHECK(l.lambda_y == doctest::Approx(1e-3 * -2.0).epsilon(1e-15));
    CHECK(l.lambda_S == doctest::Approx(1e-3 * 0.25).epsilon(1e-15));
}

TEST_CASE("one_step_control reproduces the closed form on random states")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> wealth(0.5, 60.0);
    std::uniform_real_distribution<double> price(2.0, 9.0);
    std::uniform_real_distribution<double> rate(-0.5, 0.5);
    ModelParams dyn;
    std::size_t pos = 0, neg = 0;
    for (const auto& p : {identity_params(1.0), identity_params(0.5), dyn}) {
        for (int i = 0; i < 400; ++i) {
            const double x = wealth(rng), y = wealth(rng), S = price(rng), sd = rate(rng);
            const auto est = combined_return(S, sd, p);
            (est.k > 0 ? pos : neg)++;
            const double dK = dK_dS_eval(S, sd, p);
            for (AgentCount n : {AgentCount(1), AgentCount(10), AgentCount(100), AgentCount::mean_field()}) {
                const double closed = myopic_control(x, y, S, est, dK, n, p);
                const double adj = one_step_control(x, y, S, p, n, sd);
                CHECK(std::abs(adj - closed) <= 1e-12 * std::abs(closed) + 1e-300);
            }
        }
    }
    CHECK(pos > 100);
    CHECK(neg > 100);
}

TEST_CASE("one_step_control: zero at K = 0, dt-invariant, linear in y")
{
    auto p = identity_params(1.0);
    p.r = 0.0;
    CHECK(one_step_control(20.0, 20.0, p.s_f, p, AgentCount(10)) == 0.0);

    ModelParams q;
    for (double S : {4.0, 6.5}) {
        q.dt = 1e-3;
        const double u0 = one_step_control(17.0, 23.0, S, q, AgentCount(10), 0.1);
        for (double dt : {1e-4, 1e-5}) {
            q.dt = dt;
            const double u = one_step_control(17.0, 23.0, S, q, AgentCount(10), 0.1);
            CHECK(std::abs(u - u0) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(u0));
        }
    }

    // K > 0 at S = 4 < s_f: mean-field u is exactly linear in y
    const double u1 = one_step_control(17.0, 10.0, 4.0, q, AgentCount::mean_field());
    const double u2 = one_step_control(17.0, 20.0, 4.0, q, AgentCount::mean_field());
    CHECK(u1 > 0.0);
    CHECK(u2 == doctest::Approx(2.0 * u1).epsilon(1e-14));

    CHECK_THROWS_AS(one_step_control(1.0, 1.0, 0.0, q, AgentCount(1)), Error);
}

TEST_CASE("verify_mpc sweep")
{
    const auto v = verify_mpc(ModelParams{});
    CHECK(v.states == 1000);
    CHECK(v.positive_k > 0);
    CHECK(v.negative_k > 0);
    CHECK(v.positive_k + v.negative_k == v.states);
    CHECK(v.worst.deviation <= 1e-10);
    CHECK(v.worst_dt_spread <= 1e-14);
    CHECK(v.passed());
    const auto j = nlohmann::json::parse(to_json(v));
    CHECK(j["passed"] == true);
    CHECK(j.contains("worst_state"));
    CHECK(j["worst_deviation"].get<double>() == v.worst.deviation);

    // deterministic in the seed
    const auto w = verify_mpc(ModelParams{});
    CHECK(w.worst.deviation == v.worst.deviation);
    CHECK(w.worst.x == v.worst.x);
}
