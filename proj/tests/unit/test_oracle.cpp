#include "support.hpp"

#include "mfp/error.hpp"
#include "mfp/macro_analysis.hpp"
#include "mfp/macro_sim.hpp"
#include "mfp/oracle.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>

using namespace mfp;
using test::identity_params;
using test::rel;

namespace {

Trajectory run(const ModelParams& p, double X0 = 20.0, double Y0 = 20.0, double S0 = 5.0)
{
    MacroState s;
    s.X = X0;
    s.Y = Y0;
    s.S = S0;
    return run_macro(s, p, {}, FundamentalPath::constant(p.s_f));
}

Trajectory synthetic(const ModelParams& p, std::size_t n, double X, double Y, double S)
{
    Trajectory t;
    t.params = p;
    t.steps = n - 1;
    for (std::size_t k = 0; k < n; ++k)
        t.samples.push_back({static_cast<double>(k) * p.dt, X, Y, S, 0.0, p.chi_mode.chi0, 0.0, p.s_f});
    return t;
}

} // namespace

TEST_CASE("closed forms start at the initial state")
{
    for (double chi : {1.0, 0.5, 0.0}) {
        auto p = identity_params(chi);
        p.t_end = 0.01;
        const auto traj = run(p);
        const auto regime = OracleRegime::from_params(p);
        CHECK(stock_closed_form(traj, p, regime).values.front() == 5.0);
        CHECK(wealth_closed_form(traj, p, Portfolio::stock).values.front() == 20.0);
        CHECK(wealth_closed_form(traj, p, Portfolio::bond).values.front() == 20.0);
    }
    CHECK(OracleRegime::from_params(identity_params(1.0)).kind == OracleRegime::Kind::fundamentalist);
    CHECK(OracleRegime::from_params(identity_params(0.0)).kind == OracleRegime::Kind::chartist);
    CHECK(OracleRegime::from_params(identity_params(0.3)).kind == OracleRegime::Kind::mixed);
}

TEST_CASE("fundamentalist closed form tends to omega s_f / (omega + r)")
{
    auto p = identity_params(1.0);
    p.t_end = 20.0;
    p.dt = 1e-3;
    const auto traj = run(p);
    const auto s = stock_closed_form(traj, p, OracleRegime::fundamentalist());
    CHECK(s.values.back() == doctest::Approx(110.0 / 20.01).epsilon(1e-8));
    CHECK(s.crossings.empty());
}

TEST_CASE("chartist regime with D = r = 0 keeps S constant")
{
    auto p = identity_params(0.0);
    p.dividend = 0.0;
    p.r = 0.0;
    p.t_end = 0.5;
    const auto traj = run(p);
    const auto s = stock_closed_form(traj, p, OracleRegime::chartist());
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        CHECK(s.values[k] == 5.0);
        CHECK(traj.samples[k].S == 5.0);
    }
}

TEST_CASE("bond wealth is constant when K = nu r")
{
    // With K > 0 the bond equation is dY/dt = (r - K/nu) Y. For chi = 1,
    // K = A/S - B, so S = A / (B + nu r) makes the exponent vanish.
    auto p = identity_params(1.0);
    const double A = p.omega * p.s_f;
    const double B = p.omega + p.r;
    const double S = A / (B + p.nu * p.r);
    const auto traj = synthetic(p, 200, 20.0, 20.0, S);
    const auto br = explicit_branch(traj.samples[0], p, 1.0);
    CHECK(br.k == doctest::Approx(p.nu * p.r).epsilon(1e-12));
    const auto y = wealth_closed_form(traj, p, Portfolio::bond);
    for (double v : y.values)
        CHECK(v == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("explicit K matches the implicit definition along a run")
{
    for (double chi : {1.0, 0.5}) {
        auto p = identity_params(chi);
        p.t_end = 0.5;
        const auto traj = run(p);
        for (std::size_t k = 1; k < traj.size(); k += 50) {
            const auto& s = traj.samples[k];
            const auto br = explicit_branch(s, p, chi);
            // implicit: K = chi K_f + (1 - chi) K_c(dS/dt) with dS/dt = kappa ED(K) S
            const double W = br.k > 0 ? s.Y : s.X;
            const double rate = p.kappa * br.k * W / p.nu * s.S;
            const auto est = combined_return(s.S, rate, p);
            CHECK(br.k == doctest::Approx(est.k).epsilon(1e-11));
        }
    }
}

TEST_CASE("standard-parameter runs match the closed forms")
{
    for (double chi : {1.0, 0.5}) {
        const auto p = identity_params(chi);
        const auto rep = oracle_report(run(p), p);
        CHECK(rep.channel("S").max_rel_dev < 1e-3);
        CHECK(rep.channel("X").max_rel_dev < 1e-3);
        CHECK(rep.channel("Y").max_rel_dev < 1e-3);
        CHECK(rep.worst() > 0.0);

        auto half = p;
        half.dt = p.dt / 2.0;
        const auto rep_half = oracle_report(run(half), half);
        CHECK(rep.worst() / rep_half.worst() >= 1.8);
    }
}

TEST_CASE("stationary trajectories have zero deviation")
{
    auto p = identity_params(0.5);
    p.r = 0.0;
    p.dividend = 0.0;
    p.t_end = 0.2;
    const auto traj = run(p, 20.0, 20.0, p.s_f);
    const auto rep = oracle_report(traj, p);
    CHECK(rep.worst() == 0.0);
    CHECK(rep.crossings == 0);
}

TEST_CASE("the closed form is a fixed point of its own output")
{
    const auto p = identity_params(0.5);
    auto traj = run(p);
    const auto s1 = stock_closed_form(traj, p, OracleRegime::mixed(0.5));
    for (std::size_t k = 0; k < traj.size(); ++k)
        traj.samples[k].S = s1.values[k];
    const auto s2 = stock_closed_form(traj, p, OracleRegime::mixed(0.5));
    REQUIRE(s2.crossings.empty());
    for (std::size_t k = 0; k < traj.size(); ++k)
        CHECK(s2.values[k] == doctest::Approx(s1.values[k]).epsilon(1e-15));
}

TEST_CASE("branch crossings are split or rejected")
{
    const auto p = identity_params(1.0);
    const double s_star = equilibrium_price(p);
    Trajectory traj = synthetic(p, 10, 20.0, 20.0, 0.99 * s_star);
    for (std::size_t k = 5; k < 10; ++k)
        traj.samples[k].S = 1.01 * s_star;
    const auto split = stock_closed_form(traj, p, OracleRegime::fundamentalist());
    REQUIRE(split.crossings.size() == 1);
    CHECK(split.crossings[0] == 5);
    CHECK(split.values[5] == traj.samples[5].S);
    try {
        stock_closed_form(traj, p, OracleRegime::fundamentalist(), CrossingPolicy::reject);
        FAIL("expected BranchCrossing");
    } catch (const StepError& e) {
        CHECK(e.code() == ErrorCode::BranchCrossing);
        CHECK(e.step() == 5);
    }
    const auto rep = oracle_report(traj, p);
    CHECK(rep.crossings == 1);
    CHECK(rep.channel("S").crossings == 1);
}

TEST_CASE("regime mismatches are errors")
{
    auto p = identity_params(1.0);
    p.t_end = 0.01;
    const auto traj = run(p);
    auto expect_mismatch = [](auto&& f) {
        try {
            f();
            FAIL("expected RegimeMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::RegimeMismatch);
        }
    };
    expect_mismatch([&] { stock_closed_form(traj, p, OracleRegime::mixed(0.5)); });
    ModelParams dyn;
    dyn.t_end = 0.01;
    expect_mismatch([&] { OracleRegime::from_params(dyn); });
    expect_mismatch([&] { oracle_report(run(dyn), dyn); });
    auto prospect = identity_params(1.0);
    prospect.value_fn_mode = ValueFnMode::prospect;
    prospect.t_end = 0.01;
    expect_mismatch([&] { oracle_report(run(prospect), prospect); });

    auto gbm_traj = traj;
    gbm_traj.constant_fundamental = false;
    expect_mismatch([&] { oracle_report(gbm_traj, p); });
}

TEST_CASE("deviation report JSON")
{
    const auto p = identity_params(1.0);
    auto q = p;
    q.t_end = 0.1;
    const auto rep = oracle_report(run(q), q);
    const auto j = nlohmann::json::parse(to_json(rep));
    REQUIRE(j.size() == 3);
    CHECK(j[0]["channel"] == "S");
    CHECK(j[1]["channel"] == "X");
    CHECK(j[2]["channel"] == "Y");
    CHECK(j[0]["max_rel_dev"].get<double>() == rep.channel("S").max_rel_dev);
    CHECK(j[0].contains("at_t"));
    CHECK(j[0].contains("crossings"));
}
