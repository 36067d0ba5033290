#include "mfp/stats.hpp"

#include "mfp/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>

namespace mfp {

std::vector<double> log_returns(std::span<const double> series)
{
    if (series.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "log returns need at least two prices");
    for (double s : series)
        if (!(s > 0.0))
            throw Error(ErrorCode::NonpositivePrice, "log returns need positive prices");
    std::vector<double> out(series.size() - 1);
    for (std::size_t k = 0; k + 1 < series.size(); ++k)
        out[k] = std::log(series[k + 1] / series[k]);
    return out;
}

double sample_mean(std::span<const double> sample)
{
    if (sample.empty())
        throw Error(ErrorCode::DegenerateSample, "empty sample");
    double s = 0.0;
    for (double v : sample)
        s += v;
    return s / static_cast<double>(sample.size());
}

namespace {

struct Moments {
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
};

Moments central_moments(std::span<const double> sample)
{
    Moments m;
    m.mean = sample_mean(sample);
    for (double v : sample) {
        const double d = v - m.mean;
        const double d2 = d * d;
        m.m2 += d2;
        m.m3 += d2 * d;
        m.m4 += d2 * d2;
    }
    const double n = static_cast<double>(sample.size());
    m.m2 /= n;
    m.m3 /= n;
    m.m4 /= n;
    return m;
}

} // namespace

double sample_variance(std::span<const double> sample)
{
    return central_moments(sample).m2;
}

double skewness(std::span<const double> sample)
{
    const Moments m = central_moments(sample);
    if (!(m.m2 > 0.0))
        throw Error(ErrorCode::DegenerateSample, "zero variance");
    return m.m3 / std::pow(m.m2, 1.5);
}

double excess_kurtosis(std::span<const double> sample)
{
    if (sample.size() < 4)
        throw Error(ErrorCode::DegenerateSample, "kurtosis needs at least 4 points");
    const Moments m = central_moments(sample);
    if (!(m.m2 > 0.0))
        throw Error(ErrorCode::DegenerateSample, "zero variance");
    return m.m4 / (m.m2 * m.m2) - 3.0;
}

double skewness_se(std::size_t n)
{
    return std::sqrt(6.0 / static_cast<double>(n));
}

double kurtosis_se(std::size_t n)
{
    return std::sqrt(24.0 / static_cast<double>(n));
}

std::vector<QQPair> qq_pairs(std::span<const double> sample, std::size_t count)
{
    if (count < 2 || count > sample.size())
        throw Error(ErrorCode::DegenerateSample, "quantile count must lie in [2, sample size]");
    const Moments m = central_moments(sample);
    if (!(m.m2 > 0.0))
        throw Error(ErrorCode::DegenerateSample, "zero variance");
    const double sd = std::sqrt(m.m2);
    std::vector<double> z(sample.begin(), sample.end());
    for (double& v : z)
        v = (v - m.mean) / sd;
    std::sort(z.begin(), z.end());

    const boost::math::normal_distribution<double> normal;
    const double n = static_cast<double>(z.size());
    std::vector<QQPair> out;
    out.reserve(count);
    for (std::size_t k = 1; k <= count; ++k) {
        const double p = (static_cast<double>(k) - 0.5) / static_cast<double>(count);
        // Hazen plotting position: order statistic i (0-based) sits at (i + 0.5)/n
        const double pos = std::clamp(p * n - 0.5, 0.0, n - 1.0);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, z.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        out.push_back({p, boost::math::quantile(normal, p), z[lo] + frac * (z[hi] - z[lo])});
    }
    return out;
}

std::vector<double> price_series(const Trajectory& traj)
{
    std::vector<double> out;
    out.reserve(traj.samples.size());
    for (const auto& s : traj.samples)
        out.push_back(s.S);
    return out;
}

std::vector<double> fundamental_series(const Trajectory& traj)
{
    std::vector<double> out;
    out.reserve(traj.samples.size());
    for (const auto& s : traj.samples)
        out.push_back(s.sf);
    return out;
}

namespace {

std::vector<double> times_of(const Trajectory& traj)
{
    std::vector<double> out;
    out.reserve(traj.samples.size());
    for (const auto& s : traj.samples)
        out.push_back(s.t);
    return out;
}

std::size_t window_size(std::size_t n, double tail_fraction)
{
    if (!(tail_fraction > 0.0))
        throw Error(ErrorCode::InvalidArgument, "tail fraction must be > 0");
    if (tail_fraction > 1.0 || n < 2)
        throw Error(ErrorCode::WindowTooLarge, "tail window exceeds the trajectory");
    const auto w = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n) - 1e-9));
    return std::clamp<std::size_t>(w, 1, n);
}

} // namespace

AsymptoticRange asymptotic_range(std::span<const double> values, double tail_fraction, double convergence_tol)
{
    const std::size_t w = window_size(values.size(), tail_fraction);
    const auto tail = values.subspan(values.size() - w);
    AsymptoticRange out;
    out.window = w;
    out.min_S = *std::min_element(tail.begin(), tail.end());
    out.max_S = *std::max_element(tail.begin(), tail.end());
    out.mean_S = sample_mean(tail);
    out.converged = out.max_S - out.min_S < convergence_tol * std::abs(out.mean_S);
    return out;
}

AsymptoticRange asymptotic_range(const Trajectory& traj, double tail_fraction, double convergence_tol)
{
    const auto s = price_series(traj);
    return asymptotic_range(s, tail_fraction, convergence_tol);
}

OscillationMetrics oscillation_metrics(std::span<const double> t, std::span<const double> values,
                                       double tail_fraction, double convergence_tol)
{
    if (t.size() != values.size())
        throw Error(ErrorCode::InvalidArgument, "time and value series differ in length");
    const AsymptoticRange range = asymptotic_range(values, tail_fraction, convergence_tol);
    if (range.converged)
        throw Error(ErrorCode::NotOscillatory, "tail window has converged");
    const std::size_t start = values.size() - range.window;
    const double level = range.mean_S;

    std::vector<double> ups;
    for (std::size_t j = start + 1; j < values.size(); ++j) {
        const double a = values[j - 1] - level;
        const double b = values[j] - level;
        if (a < 0.0 && b >= 0.0)
            ups.push_back(t[j - 1] + (t[j] - t[j - 1]) * (-a / (b - a)));
    }
    if (ups.size() < 2)
        throw Error(ErrorCode::NotOscillatory,
                    "fewer than two upward mean crossings in the tail window (" + std::to_string(ups.size()) + ")");
    OscillationMetrics out;
    out.amplitude = 0.5 * range.width();
    out.period = (ups.back() - ups.front()) / static_cast<double>(ups.size() - 1);
    out.center = range.center();
    out.upward_crossings = ups.size();
    return out;
}

OscillationMetrics oscillation_metrics(const Trajectory& traj, double tail_fraction, double convergence_tol)
{
    const auto t = times_of(traj);
    const auto s = price_series(traj);
    return oscillation_metrics(t, s, tail_fraction, convergence_tol);
}

} // namespace mfp
