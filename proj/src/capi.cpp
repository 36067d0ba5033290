#include "mfp/mfp.h"

#include "mfp/commands.hpp"
#include "mfp/core_model.hpp"
#include "mfp/error.hpp"
#include "mfp/macro_analysis.hpp"

#include <exception>
#include <new>
#include <string>
#include <vector>

struct mfp_config {
    mfp::Config value;
};

struct mfp_trajectory {
    mfp::Trajectory value;
};

struct mfp_text {
    std::string value;
};

namespace {

thread_local std::string last_error;
thread_local long long last_step = -1;

mfp_status status_of(mfp::ErrorCode code)
{
    using mfp::ErrorCode;
    switch (code) {
    case ErrorCode::InvalidArgument: return MFP_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return MFP_ERR_PARSE;
    case ErrorCode::Validation: return MFP_ERR_VALIDATION;
    case ErrorCode::NonpositivePrice: return MFP_ERR_NONPOSITIVE_PRICE;
    case ErrorCode::HorizonOutOfRange: return MFP_ERR_HORIZON_OUT_OF_RANGE;
    case ErrorCode::StepSizeTooLarge: return MFP_ERR_STEP_SIZE_TOO_LARGE;
    case ErrorCode::FixedPointDivergence: return MFP_ERR_FIXED_POINT_DIVERGENCE;
    case ErrorCode::RegimeMismatch: return MFP_ERR_REGIME_MISMATCH;
    case ErrorCode::BranchCrossing: return MFP_ERR_BRANCH_CROSSING;
    case ErrorCode::DegenerateSample: return MFP_ERR_DEGENERATE_SAMPLE;
    case ErrorCode::WindowTooLarge: return MFP_ERR_WINDOW_TOO_LARGE;
    case ErrorCode::NotOscillatory: return MFP_ERR_NOT_OSCILLATORY;
    case ErrorCode::NoRoot: return MFP_ERR_NO_ROOT;
    case ErrorCode::Io: return MFP_ERR_IO;
    }
    return MFP_ERR_INTERNAL;
}

template <class F>
mfp_status guarded(F&& f)
{
    last_error.clear();
    last_step = -1;
    try {
        f();
        return MFP_OK;
    } catch (const mfp::StepError& e) {
        last_error = e.what();
        last_step = e.step();
        return status_of(e.code());
    } catch (const mfp::Error& e) {
        last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return MFP_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return MFP_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return MFP_ERR_INTERNAL;
    }
}

void require(bool ok, const char* what)
{
    if (!ok)
        throw mfp::Error(mfp::ErrorCode::InvalidArgument, what);
}

mfp_text* make_text(std::string s)
{
    return new mfp_text{std::move(s)};
}

} // namespace

extern "C" {

const char* mfp_version(void)
{
    return "0.1.0";
}

const char* mfp_status_name(mfp_status status)
{
    switch (status) {
    case MFP_OK: return "ok";
    case MFP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case MFP_ERR_PARSE: return "parse_error";
    case MFP_ERR_VALIDATION: return "validation_error";
    case MFP_ERR_NONPOSITIVE_PRICE: return "nonpositive_price";
    case MFP_ERR_HORIZON_OUT_OF_RANGE: return "horizon_out_of_range";
    case MFP_ERR_STEP_SIZE_TOO_LARGE: return "step_size_too_large";
    case MFP_ERR_FIXED_POINT_DIVERGENCE: return "fixed_point_divergence";
    case MFP_ERR_REGIME_MISMATCH: return "regime_mismatch";
    case MFP_ERR_BRANCH_CROSSING: return "branch_crossing";
    case MFP_ERR_DEGENERATE_SAMPLE: return "degenerate_sample";
    case MFP_ERR_WINDOW_TOO_LARGE: return "window_too_large";
    case MFP_ERR_NOT_OSCILLATORY: return "not_oscillatory";
    case MFP_ERR_NO_ROOT: return "no_root";
    case MFP_ERR_IO: return "io_error";
    case MFP_ERR_INTERNAL: return "internal_error";
    }
    return "unknown";
}

const char* mfp_last_error_message(void)
{
    return last_error.c_str();
}

long long mfp_last_error_step(void)
{
    return last_step;
}

const char* mfp_text_data(const mfp_text* text)
{
    return text ? text->value.c_str() : "";
}

size_t mfp_text_size(const mfp_text* text)
{
    return text ? text->value.size() : 0;
}

void mfp_text_free(mfp_text* text)
{
    delete text;
}

mfp_status mfp_config_default(mfp_config** out)
{
    return guarded([&] {
        require(out, "out is null");
        *out = new mfp_config{mfp::default_config()};
    });
}

mfp_status mfp_config_parse(const char* text, mfp_config** out)
{
    return guarded([&] {
        require(text && out, "null argument");
        *out = new mfp_config{mfp::parse_config(text)};
    });
}

mfp_status mfp_config_load(const char* path, mfp_config** out)
{
    return guarded([&] {
        require(path && out, "null argument");
        *out = new mfp_config{mfp::load_config(path)};
    });
}

mfp_status mfp_config_clone(const mfp_config* config, mfp_config** out)
{
    return guarded([&] {
        require(config && out, "null argument");
        *out = new mfp_config{config->value};
    });
}

mfp_status mfp_config_set(mfp_config* config, const char* key, const char* value)
{
    return guarded([&] {
        require(config && key && value, "null argument");
        mfp::Config updated = config->value;
        mfp::apply_override(updated, key, value);
        config->value = std::move(updated);
    });
}

mfp_status mfp_config_set_assignment(mfp_config* config, const char* assignment)
{
    return guarded([&] {
        require(config && assignment, "null argument");
        mfp::Config updated = config->value;
        mfp::apply_override(updated, assignment);
        config->value = std::move(updated);
    });
}

mfp_status mfp_config_set_many(mfp_config* config, const char* const* assignments, size_t count)
{
    return guarded([&] {
        require(config && (assignments || count == 0), "null argument");
        std::vector<std::string> list;
        for (size_t i = 0; i < count; ++i) {
            require(assignments[i] != nullptr, "null assignment");
            list.emplace_back(assignments[i]);
        }
        mfp::apply_overrides(config->value, list);
    });
}

mfp_status mfp_config_echo(const mfp_config* config, mfp_text** out)
{
    return guarded([&] {
        require(config && out, "null argument");
        *out = make_text(mfp::echo(config->value));
    });
}

mfp_status mfp_config_seed(const mfp_config* config, uint64_t* out)
{
    return guarded([&] {
        require(config && out, "null argument");
        *out = config->value.run.seed;
    });
}

mfp_status mfp_config_agents(const mfp_config* config, size_t* out)
{
    return guarded([&] {
        require(config && out, "null argument");
        *out = config->value.run.agents;
    });
}

mfp_status mfp_config_precision(const mfp_config* config, int* out)
{
    return guarded([&] {
        require(config && out, "null argument");
        *out = config->value.run.precision;
    });
}

void mfp_config_free(mfp_config* config)
{
    delete config;
}

const char* mfp_default_config_text(void)
{
    return mfp::default_config_text().data();
}

mfp_status mfp_run(const mfp_config* config, mfp_trajectory** out, mfp_text** report)
{
    return guarded([&] {
        require(config && out, "null argument");
        auto result = mfp::simulate(config->value);
        if (report)
            *report = make_text(mfp::to_json(result.report));
        *out = new mfp_trajectory{std::move(result.traj)};
    });
}

size_t mfp_trajectory_size(const mfp_trajectory* traj)
{
    return traj ? traj->value.size() : 0;
}

size_t mfp_trajectory_steps(const mfp_trajectory* traj)
{
    return traj ? traj->value.steps : 0;
}

mfp_status mfp_trajectory_sample(const mfp_trajectory* traj, size_t index, mfp_sample* out)
{
    return guarded([&] {
        require(traj && out, "null argument");
        require(index < traj->value.size(), "sample index out of range");
        const auto& s = traj->value.samples[index];
        *out = {s.t, s.X, s.Y, s.S, s.ED, s.chi, s.K, s.sf};
    });
}

double mfp_trajectory_max_transfer_residual(const mfp_trajectory* traj)
{
    return traj ? traj->value.max_transfer_residual : 0.0;
}

mfp_status mfp_trajectory_csv(const mfp_trajectory* traj, int precision, mfp_text** out)
{
    return guarded([&] {
        require(traj && out, "null argument");
        require(precision >= 1 && precision <= 17, "precision must lie in [1, 17]");
        *out = make_text(mfp::trajectory_csv(traj->value, precision));
    });
}

mfp_status mfp_trajectory_write_csv(const mfp_trajectory* traj, const char* path, int precision)
{
    return guarded([&] {
        require(traj && path, "null argument");
        require(precision >= 1 && precision <= 17, "precision must lie in [1, 17]");
        mfp::write_trajectory_csv(path, traj->value, precision);
    });
}

mfp_status mfp_trajectory_read_csv(const char* path, mfp_trajectory** out)
{
    return guarded([&] {
        require(path && out, "null argument");
        *out = new mfp_trajectory{mfp::read_trajectory_csv(path)};
    });
}

void mfp_trajectory_free(mfp_trajectory* traj)
{
    delete traj;
}

mfp_status mfp_sweep(const mfp_config* config, const char* key, const char* grid, double tail_fraction,
                     unsigned jobs, mfp_text** csv, mfp_text** report)
{
    return guarded([&] {
        require(config && key && grid && csv, "null argument");
        const auto values = mfp::parse_grid(grid);
        const auto result = mfp::run_sweep(config->value, key, values, tail_fraction, jobs);
        *csv = make_text(mfp::sweep_csv(result.cells, config->value.run.precision));
        if (report)
            *report = make_text(mfp::to_json(result));
    });
}

mfp_status mfp_verify(const mfp_config* config, int* passed, mfp_text** report)
{
    return guarded([&] {
        require(config && passed, "null argument");
        const auto result = mfp::run_verify(config->value);
        *passed = result.passed() ? 1 : 0;
        if (report)
            *report = make_text(mfp::to_json(result));
    });
}

mfp_status mfp_micro(const mfp_config* config, size_t agents, size_t max_steps, mfp_trajectory** micro,
                     mfp_text** gap_report, mfp_text** snapshots)
{
    return guarded([&] {
        require(config && micro && gap_report, "null argument");
        auto result = mfp::run_micro_comparison(config->value, agents,
                                                max_steps ? std::optional<std::size_t>(max_steps) : std::nullopt);
        *gap_report = make_text(mfp::to_json(result.gap));
        if (snapshots)
            *snapshots = make_text(mfp::snapshots_csv(result.micro.snapshots, config->value.run.precision));
        *micro = new mfp_trajectory{std::move(result.micro.mean)};
    });
}

mfp_status mfp_stats(const mfp_config* config, const mfp_trajectory* traj, double tail_fraction, size_t qq_count,
                     mfp_text** report, mfp_text** qq_csv)
{
    return guarded([&] {
        require(config && report, "null argument");
        mfp::Trajectory simulated;
        const mfp::Trajectory* source = traj ? &traj->value : nullptr;
        if (!source) {
            simulated = mfp::simulate(config->value).traj;
            source = &simulated;
        }
        auto json = mfp::stats_json(*source, config->value, tail_fraction);
        std::string qq;
        if (qq_count > 0)
            qq = mfp::qq_csv(mfp::stock_qq(*source, qq_count), config->value.run.precision);
        *report = make_text(std::move(json));
        if (qq_csv)
            *qq_csv = qq_count > 0 ? make_text(std::move(qq)) : nullptr;
    });
}

double mfp_default_tail_fraction(void)
{
    return mfp::default_tail_fraction;
}

mfp_status mfp_value_fn(const mfp_config* config, double x, double* out)
{
    return guarded([&] {
        require(config && out, "null argument");
        *out = mfp::value_fn(x, config->value.params);
    });
}

mfp_status mfp_weight_fn(const mfp_config* config, double delta, double* out)
{
    return guarded([&] {
        require(config && out, "null argument");
        *out = mfp::weight_fn(delta, config->value.params);
    });
}

mfp_status mfp_equilibrium_price(const mfp_config* config, double* out)
{
    return guarded([&] {
        require(config && out, "null argument");
        *out = mfp::equilibrium_price(config->value.params);
    });
}

mfp_status mfp_excess_kurtosis(const double* sample, size_t n, double* out)
{
    return guarded([&] {
        require(sample && out, "null argument");
        *out = mfp::excess_kurtosis(std::span<const double>(sample, n));
    });
}

} // extern "C"
