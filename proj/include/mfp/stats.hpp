#pragma once

#include "mfp/macro_sim.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mfp {

std::vector<double> log_returns(std::span<const double> series);

double sample_mean(std::span<const double> sample);
/// Population (1/n) variance.
double sample_variance(std::span<const double> sample);
double skewness(std::span<const double> sample);

/// m4 / m2^2 - 3 with population central moments (no small-sample
/// correction). Needs at least 4 points and nonzero variance.
double excess_kurtosis(std::span<const double> sample);

/// Large-sample standard errors of skewness and excess kurtosis for a
/// Gaussian sample of size n: sqrt(6/n) and sqrt(24/n).
double skewness_se(std::size_t n);
double kurtosis_se(std::size_t n);

struct QQPair {
    double p = 0.0;
    double theoretical = 0.0;
    double empirical = 0.0;
};

/// Standard-normal quantiles against empirical quantiles of the standardised
/// sample at probabilities (k - 0.5) / count, k = 1..count.
std::vector<QQPair> qq_pairs(std::span<const double> sample, std::size_t count);

std::vector<double> price_series(const Trajectory& traj);
std::vector<double> fundamental_series(const Trajectory& traj);

struct AsymptoticRange {
    double min_S = 0.0;
    double max_S = 0.0;
    double mean_S = 0.0;
    std::size_t window = 0;
    bool converged = false;

    double width() const { return max_S - min_S; }
    double center() const { return 0.5 * (min_S + max_S); }
    const char* label() const { return converged ? "converged" : "oscillatory"; }
};

/// Default tail fraction: last 200k of 700k steps.
inline constexpr double default_tail_fraction = 2.0 / 7.0;
inline constexpr double default_convergence_tol = 1e-6;

/// Range of S over the final ceil(tail_fraction * n_samples) samples;
/// "converged" when max - min < tol * mean.
AsymptoticRange asymptotic_range(const Trajectory& traj, double tail_fraction = default_tail_fraction,
                                 double convergence_tol = default_convergence_tol);
AsymptoticRange asymptotic_range(std::span<const double> values, double tail_fraction,
                                 double convergence_tol = default_convergence_tol);

struct OscillationMetrics {
    double amplitude = 0.0;
    double period = 0.0;
    double center = 0.0;
    std::size_t upward_crossings = 0;
};

/// Amplitude (max - min)/2 and mean spacing of upward mean crossings in the
/// tail window; crossing times are linearly interpolated between samples.
/// NotOscillatory when the window is converged or has < 2 upward crossings.
OscillationMetrics oscillation_metrics(const Trajectory& traj, double tail_fraction = default_tail_fraction,
                                       double convergence_tol = default_convergence_tol);
OscillationMetrics oscillation_metrics(std::span<const double> t, std::span<const double> values,
                                       double tail_fraction, double convergence_tol = default_convergence_tol);

} // namespace mfp
