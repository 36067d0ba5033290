#pragma once

// Plain-text exports. All writers are deterministic: the same input gives the
// same bytes.

#include "mfp/macro_sim.hpp"
#include "mfp/micro_sim.hpp"
#include "mfp/stats.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <span>
#include <vector>

namespace mfp {

inline constexpr const char* trajectory_header = "t,X,Y,S,ED,chi,K,sf";

/// One row per sample, each value printed with `precision` significant digits.
std::string trajectory_csv(const Trajectory& traj, int precision = 12);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj, int precision = 12);

/// Reads samples back; params and scheme are left at their defaults.
Trajectory parse_trajectory_csv(std::string_view text);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// step,agent,x,y
std::string snapshots_csv(std::span<const AgentSnapshot> snapshots, int precision = 12);

/// p,theoretical,empirical
std::string qq_csv(std::span<const QQPair> pairs, int precision = 12);

struct SweepCell {
    double value = 0.0;
    std::uint64_t seed = 0;
    AsymptoticRange range;
    bool oscillatory = false; // oscillation_metrics succeeded
    OscillationMetrics oscillation;
    std::size_t fp_fallbacks = 0;
    std::string error; // non-empty when the cell's run failed
};

/// param,min_S,max_S,class
std::string sweep_csv(std::span<const SweepCell> cells, int precision = 12);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

} // namespace mfp
