#pragma once

#include "mfp/core_model.hpp"

#include <cmath>

namespace test {

inline mfp::ModelParams identity_params(double chi)
{
    mfp::ModelParams p;
    p.value_fn_mode = mfp::ValueFnMode::identity;
    p.chi_mode = mfp::ChiMode::constant(chi);
    return p;
}

inline double rel(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

} // namespace test
