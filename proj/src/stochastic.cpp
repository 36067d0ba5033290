#include "mfp/stochastic.hpp"

#include "mfp/error.hpp"

#include <cmath>
#include <numbers>

namespace mfp {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double uniform_open(std::uint64_t seed, std::uint64_t counter)
{
    const std::uint64_t h = splitmix64(splitmix64(seed) ^ (counter * 0xD1B54A32D192ED03ULL + 1));
    // 53 random bits, shifted by half an ulp so 0 and 1 are never produced
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::at(std::uint64_t index) const
{
    const double u1 = uniform_open(seed_, 2 * index);
    const double u2 = uniform_open(seed_, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> gbm_from_normals(double s0, double sigma, double dt, std::span<const double> normals)
{
    std::vector<double> out;
    out.reserve(normals.size() + 1);
    out.push_back(s0);
    const double drift = -0.5 * sigma * sigma * dt;
    const double scale = sigma * std::sqrt(dt);
    double log_s = std::log(s0);
    for (double z : normals) {
        log_s += drift + scale * z;
        out.push_back(std::exp(log_s));
    }
    return out;
}

FundamentalPath generate_path(const ModelParams& params, std::size_t steps, std::uint64_t seed, double sigma)
{
    if (steps < 1)
        throw Error(ErrorCode::InvalidArgument, "fundamental path needs at least one step");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
    if (sigma == 0.0)
        return FundamentalPath::constant(params.s_f);

    const NormalStream stream(seed);
    std::vector<double> z(steps);
    for (std::size_t k = 0; k < steps; ++k)
        z[k] = stream.at(k);

    FundamentalPath path;
    path.mode = FundamentalPath::Mode::gbm;
    path.s0 = params.s_f;
    path.sigma = sigma;
    path.seed = seed;
    path.samples = gbm_from_normals(params.s_f, sigma, params.dt, z);
    return path;
}

} // namespace mfp
