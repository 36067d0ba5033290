#pragma once

#include "mfp/core_model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mfp {

/// Counter-based standard normal stream: the k-th variate depends only on
/// (seed, k). Uniforms come from a SplitMix64 hash of seed and counter and
/// are mapped through the cosine branch of Box-Muller.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : seed_(seed) {}
    double at(std::uint64_t index) const;
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Uniform variate in (0, 1) for (seed, counter).
double uniform_open(std::uint64_t seed, std::uint64_t counter);

/// Fundamental price on the simulation grid: either constant or a geometric
/// Brownian motion ds = sigma * s dW sampled with the exact log update.
struct FundamentalPath {
    enum class Mode { constant, gbm };

    Mode mode = Mode::constant;
    double s0 = 5.5;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> samples; // gbm only, size steps + 1

    static FundamentalPath constant(double s_f) { return {Mode::constant, s_f, 0.0, 0, {}}; }

    /// Price at grid index k; constant paths ignore k.
    double at(std::size_t k) const { return mode == Mode::constant ? s0 : samples.at(k); }
    bool is_constant() const { return mode == Mode::constant; }
};

/// Exact GBM path with s_{k+1} = s_k exp(-sigma^2 dt / 2 + sigma sqrt(dt) Z_k),
/// Z_k = NormalStream(seed).at(k), starting from params.s_f. sigma = 0 gives a
/// constant path.
FundamentalPath generate_path(const ModelParams& params, std::size_t steps, std::uint64_t seed,
                              double sigma = 1.0);

/// Same update driven by caller-supplied normals (one per step).
std::vector<double> gbm_from_normals(double s0, double sigma, double dt, std::span<const double> normals);

} // namespace mfp
