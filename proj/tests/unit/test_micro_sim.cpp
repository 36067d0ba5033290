#include "support.hpp"

#include "mfp/error.hpp"
#include "mfp/macro_sim.hpp"
#include "mfp/micro_sim.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace mfp;
using test::identity_params;
using test::rel;

TEST_CASE("myopic_control closed form")
{
    const auto p = identity_params(1.0);
    ReturnEstimate est;
    est.k = 0.0;
    CHECK(myopic_control(20.0, 20.0, 5.0, est, -4.4, AgentCount(1), p) == 0.0);

    est.k = 1.99;
    // N = 1, dK/dS = -chi omega s_f / S^2 = -20 * 5.5 / 25 = -4.4
    const double dK = dK_dS_eval(5.0, 0.0, p);
    CHECK(dK == doctest::Approx(-4.4).epsilon(1e-15));
    const double u1 = myopic_control(20.0, 20.0, 5.0, est, dK, AgentCount(1), p);
    CHECK(u1 == doctest::Approx((1.99 * 20.0 - 0.1 * 5.0 * (-4.4) * 400.0 / 2.0) / 5.0).epsilon(1e-14));
    CHECK(u1 == doctest::Approx(95.96).epsilon(1e-13));

    // mean field: u = K y / nu, linear in y
    const double umf = myopic_control(20.0, 20.0, 5.0, est, dK, AgentCount::mean_field(), p);
    CHECK(umf == doctest::Approx(1.99 * 20.0 / 5.0).epsilon(1e-15));
    CHECK(myopic_control(20.0, 40.0, 5.0, est, dK, AgentCount::mean_field(), p) == doctest::Approx(2 * umf));
    // large N approaches it with a 1/N correction
    const double u1000 = myopic_control(20.0, 20.0, 5.0, est, dK, AgentCount(1000), p);
    CHECK(u1000 - umf == doctest::Approx((u1 - umf) / 1000.0).epsilon(1e-10));

    // K < 0 branch
    est.k = -0.5;
    const double c = 0.1 / 10.0;
    const double expected = (-0.5 * 30.0 + -0.5 * c * 900.0 + c * 6.0 * 0.2 * 900.0 / 2.0) / 5.0;
    CHECK(myopic_control(30.0, 7.0, 6.0, est, 0.2, AgentCount(10), p) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("dK_dS: analytic and finite difference")
{
    CHECK(dK_dS_eval(5.0, 0.0, identity_params(1.0)) == doctest::Approx(-4.4).epsilon(1e-15));

    auto chartist = identity_params(0.0);
    chartist.dividend = 0.0;
    CHECK(dK_dS_eval(5.0, 0.7, chartist) == doctest::Approx(-0.7 / 25.0).epsilon(1e-15));

    for (double chi : {0.0, 0.3, 0.5, 1.0}) {
        const auto p = identity_params(chi);
        for (double S = 3.0; S < 8.0; S += 0.7) {
            for (double rate : {-0.5, 0.0, 0.4}) {
                const double a = dK_dS_eval(S, rate, p);
                const double fd = dK_dS_finite_difference(S, rate, p.s_f, p);
                CHECK(std::abs(a - fd) <= 1e-6 * std::abs(a));
            }
        }
    }
    CHECK_THROWS_AS(dK_dS_eval(0.0, 0.0, identity_params(1.0)), Error);
    CHECK_THROWS_AS(dK_dS_eval(-2.0, 0.0, ModelParams{}), Error);
}

TEST_CASE("aggregate_demand of homogeneous populations")
{
    const auto p = identity_params(1.0);
    const auto est = combined_return(5.0, 0.0, p);
    const double dK = dK_dS_eval(5.0, 0.0, p);
    const double ed = excess_demand_macro(20.0, 20.0, est, p);
    for (std::size_t n : {10u, 100u, 1000u, 10000u}) {
        const auto pop = AgentPopulation::homogeneous(n, 20.0, 20.0, 5.0);
        const double edn = aggregate_demand(pop, est, dK, p);
        // finite-N expansion: ED_N - ED = -(kappa / N) S K' Y^2 / (2 nu) for K > 0
        const double bound = p.kappa / static_cast<double>(n) * 5.0 * std::abs(dK) * 400.0 / (2.0 * p.nu);
        CHECK(std::abs(edn - ed) == doctest::Approx(bound).epsilon(1e-9));
    }

    const auto one = AgentPopulation::homogeneous(1, 20.0, 20.0, 5.0);
    CHECK(aggregate_demand(one, est, dK, p) == myopic_control(0, one, est, dK, p));

    ReturnEstimate zero;
    CHECK(aggregate_demand(AgentPopulation::homogeneous(50, 3.0, 4.0, 5.0), zero, dK, p) == 0.0);
}

TEST_CASE("micro_step symmetry and degenerate cases")
{
    ModelParams p;
    auto pop = AgentPopulation::homogeneous(25, 20.0, 20.0, 5.0);
    for (int k = 0; k < 200; ++k) {
        pop = micro_step(pop, p, {}, p.s_f, k).pop;
        for (std::size_t i = 1; i < pop.size(); ++i) {
            CHECK(pop.x[i] == pop.x[0]);
            CHECK(pop.y[i] == pop.y[0]);
        }
    }

    auto zero = AgentPopulation::homogeneous(10, 0.0, 0.0, 4.2);
    for (int k = 0; k < 50; ++k)
        zero = micro_step(zero, p, {}, p.s_f, k).pop;
    CHECK(zero.S == 4.2);
}

TEST_CASE("N = 1 differs from the macro model only through the 1/N terms")
{
    auto p = identity_params(1.0);
    p.t_end = 0.1;
    const auto path = FundamentalPath::constant(p.s_f);
    MacroState m;
    m.X = 20.0;
    m.Y = 20.0;
    m.S = 5.0;
    const auto macro = run_macro(m, p, {}, path);
    const auto micro = run_micro(AgentPopulation::homogeneous(1, 20.0, 20.0, 5.0), p, {}, path).mean;
    REQUIRE(micro.size() == macro.size());
    // at every sample the demand gap equals the correction term evaluated on the micro state
    for (std::size_t k = 0; k < micro.size(); k += 97) {
        const auto& s = micro.samples[k];
        const double rate = p.kappa * (k ? micro.samples[k - 1].ED : 0.0) * s.S;
        const auto est = combined_return(s.S, rate, p);
        const double dK = dK_dS_eval(s.S, rate, p);
        const double u_mf = myopic_control(s.X, s.Y, s.S, est, dK, AgentCount::mean_field(), p);
        const double u_1 = myopic_control(s.X, s.Y, s.S, est, dK, AgentCount(1), p);
        CHECK(s.ED == doctest::Approx(u_1).epsilon(1e-13));
        CHECK(s.ED - u_mf == doctest::Approx(u_1 - u_mf).epsilon(1e-9));
    }
}

TEST_CASE("mean-field convergence: max |ED_N - ED| ~ 1/N")
{
    auto p = identity_params(1.0);
    p.t_end = 0.1; // 1000 steps
    const auto path = FundamentalPath::constant(p.s_f);
    MacroState m;
    m.X = 20.0;
    m.Y = 20.0;
    m.S = 5.0;
    const auto macro = run_macro(m, p, {}, path);
    std::vector<double> lx, ly;
    for (std::size_t n : {10u, 100u, 1000u, 10000u}) {
        const auto micro = run_micro(AgentPopulation::homogeneous(n, 20.0, 20.0, 5.0), p, {}, path).mean;
        double gap = 0.0;
        double wealth_gap = 0.0;
        for (std::size_t k = 0; k < micro.size(); ++k) {
            gap = std::max(gap, std::abs(micro.samples[k].ED - macro.samples[k].ED));
            wealth_gap = std::max(wealth_gap, std::abs(micro.samples[k].X - macro.samples[k].X));
        }
        CHECK(wealth_gap < 20.0 * 1.0 / static_cast<double>(n));
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(gap));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / 4.0;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / 4.0;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    CHECK(slope == doctest::Approx(-1.0).epsilon(0.1));
}

TEST_CASE("permutation invariance is bitwise")
{
    ModelParams p;
    p.t_end = 0.02;
    const auto pop = AgentPopulation::uniform_wealth(301, 5.0, 40.0, 5.0, 11);
    auto shuffled = pop;
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(5);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < order.size(); ++i) {
        shuffled.x[i] = pop.x[order[i]];
        shuffled.y[i] = pop.y[order[i]];
    }
    const auto path = FundamentalPath::constant(p.s_f);
    const auto a = run_micro(pop, p, {}, path).mean;
    const auto b = run_micro(shuffled, p, {}, path).mean;
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.samples[k].ED == b.samples[k].ED);
        CHECK(a.samples[k].S == b.samples[k].S);
    }

    std::vector<double> v = {1e16, 1.0, -1e16, 3.0, 2.5};
    std::vector<double> w = {3.0, -1e16, 2.5, 1.0, 1e16};
    CHECK(canonical_sum(v) == canonical_sum(w));
}

TEST_CASE("populations: generator, validation, snapshots")
{
    const auto a = AgentPopulation::uniform_wealth(100, 2.0, 3.0, 5.0, 9);
    const auto b = AgentPopulation::uniform_wealth(100, 2.0, 3.0, 5.0, 9);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.x[i] > 2.0);
        CHECK(a.x[i] < 3.0);
    }
    CHECK(AgentPopulation::uniform_wealth(100, 2.0, 3.0, 5.0, 10).x != a.x);
    CHECK_THROWS_AS(AgentPopulation::uniform_wealth(3, 3.0, 2.0, 5.0, 1), Error);

    AgentPopulation bad = AgentPopulation::homogeneous(3, 1.0, 1.0, 5.0);
    bad.y.pop_back();
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = AgentPopulation::homogeneous(3, -1.0, 1.0, 5.0);
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = AgentPopulation::homogeneous(3, 1.0, 1.0, 0.0);
    CHECK_THROWS_AS(bad.validate(), Error);

    ModelParams p;
    p.t_end = 0.01; // 100 steps
    MicroRunOptions opts;
    opts.snapshot_every = 25;
    const auto run = run_micro(AgentPopulation::homogeneous(4, 20.0, 20.0, 5.0), p, {}, FundamentalPath::constant(5.5),
                               opts);
    REQUIRE(run.snapshots.size() == 5);
    CHECK(run.snapshots.front().step == 0);
    CHECK(run.snapshots.back().step == 100);
    CHECK(run.snapshots.back().x[0] == doctest::Approx(run.mean.samples.back().X).epsilon(1e-14));

    opts = {};
    opts.max_steps = 10;
    CHECK(run_micro(AgentPopulation::homogeneous(4, 20.0, 20.0, 5.0), p, {}, FundamentalPath::constant(5.5), opts)
              .mean.steps == 10);
}

TEST_CASE("fixed-point closure works for the agent system")
{
    ModelParams p;
    p.t_end = 0.05;
    SchemeConfig fp;
    fp.scheme = Scheme::fixed_point_euler;
    const auto run = run_micro(AgentPopulation::homogeneous(50, 20.0, 20.0, 5.0), p, fp, FundamentalPath::constant(5.5));
    CHECK(run.mean.fp_fallbacks == 0);
    for (std::size_t k = 1; k < run.mean.size(); ++k)
        CHECK(run.mean.samples[k].S > 0.0);
}
