#include "support.hpp"

#include "mfp/error.hpp"
#include "mfp/stats.hpp"
#include "mfp/stochastic.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace mfp;

TEST_CASE("sigma = 0 gives the constant fundamental")
{
    ModelParams p;
    const auto path = generate_path(p, 100, 1, 0.0);
    CHECK(path.is_constant());
    CHECK(path.at(0) == 5.5);
    CHECK(path.at(100) == 5.5);
}

TEST_CASE("paths are reproducible per seed")
{
    ModelParams p;
    const auto a = generate_path(p, 1000, 767);
    const auto b = generate_path(p, 1000, 767);
    const auto c = generate_path(p, 1000, 768);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
    REQUIRE(a.samples.size() == 1001);
    CHECK(a.samples[0] == 5.5);
    for (double s : a.samples)
        CHECK(s > 0.0);
    // the k-th variate depends only on (seed, k)
    CHECK(NormalStream(3).at(12345) == NormalStream(3).at(12345));
    CHECK(NormalStream(3).at(0) != NormalStream(4).at(0));
}

TEST_CASE("log increments follow the exact GBM law")
{
    ModelParams p; // dt = 1e-4
    const double sigma = 1.0;
    const std::size_t n = 30000;
    const auto path = generate_path(p, n, 2024, sigma);
    const auto inc = log_returns(path.samples);
    REQUIRE(inc.size() == n);
    const double var_true = sigma * sigma * p.dt;
    const double mean_true = -0.5 * var_true;
    const double se_mean = std::sqrt(var_true / static_cast<double>(n));
    CHECK(std::abs(sample_mean(inc) - mean_true) < 3.0 * se_mean);
    CHECK(std::abs(sample_variance(inc) / var_true - 1.0) < 0.1);
    CHECK(std::abs(skewness(inc)) < 5.0 * skewness_se(n));
    CHECK(std::abs(excess_kurtosis(inc)) < 5.0 * kurtosis_se(n));
}

TEST_CASE("several seeds pass the Gaussian increment checks")
{
    ModelParams p;
    for (std::uint64_t seed : {1u, 2u, 3u, 767u, 1000003u}) {
        const auto inc = log_returns(generate_path(p, 30000, seed, 0.5).samples);
        CHECK(std::abs(skewness(inc)) < 5.0 * skewness_se(inc.size()));
        CHECK(std::abs(excess_kurtosis(inc)) < 5.0 * kurtosis_se(inc.size()));
    }
}

TEST_CASE("halving dt with coupled normals reproduces the coarse path")
{
    const NormalStream stream(42);
    const std::size_t n_coarse = 5000;
    std::vector<double> fine_z(2 * n_coarse), coarse_z(n_coarse);
    for (std::size_t k = 0; k < 2 * n_coarse; ++k)
        fine_z[k] = stream.at(k);
    for (std::size_t k = 0; k < n_coarse; ++k)
        coarse_z[k] = (fine_z[2 * k] + fine_z[2 * k + 1]) / std::sqrt(2.0);
    const double dt = 1e-4;
    const auto fine = gbm_from_normals(5.5, 0.8, dt, fine_z);
    const auto coarse = gbm_from_normals(5.5, 0.8, 2 * dt, coarse_z);
    for (std::size_t k = 0; k <= n_coarse; ++k)
        CHECK(fine[2 * k] == doctest::Approx(coarse[k]).epsilon(1e-11));

    // and the coupled normals are standard normal themselves
    CHECK(std::abs(sample_mean(coarse_z)) < 5.0 / std::sqrt(static_cast<double>(n_coarse)));
    CHECK(std::abs(sample_variance(coarse_z) - 1.0) < 0.1);
}

TEST_CASE("uniform variates stay inside (0, 1)")
{
    double lo = 1.0, hi = 0.0, sum = 0.0;
    for (std::uint64_t k = 0; k < 100000; ++k) {
        const double u = uniform_open(9, k);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("generate_path argument errors")
{
    ModelParams p;
    CHECK_THROWS_AS(generate_path(p, 0, 1), Error);
    CHECK_THROWS_AS(generate_path(p, 10, 1, -1.0), Error);
    const auto path = generate_path(p, 10, 1);
    CHECK_THROWS(path.at(11));
}
