#include "mfp/oracle.hpp"

#include "mfp/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace mfp {

OracleRegime OracleRegime::from_params(const ModelParams& params)
{
    if (!params.chi_mode.is_constant())
        throw Error(ErrorCode::RegimeMismatch, "closed forms need a constant weight chi");
    const double chi = params.chi_mode.chi0;
    if (chi == 1.0)
        return fundamentalist();
    if (chi == 0.0)
        return chartist();
    return mixed(chi);
}

namespace {

void check_regime(const Trajectory& traj, const ModelParams& params, double chi)
{
    if (traj.params.value_fn_mode != ValueFnMode::identity || params.value_fn_mode != ValueFnMode::identity)
        throw Error(ErrorCode::RegimeMismatch, "closed forms need the identity value function");
    if (!traj.params.chi_mode.is_constant() || traj.params.chi_mode.chi0 != chi)
        throw Error(ErrorCode::RegimeMismatch, "trajectory was not produced with constant chi = " + std::to_string(chi));
    if (!traj.constant_fundamental)
        throw Error(ErrorCode::RegimeMismatch, "closed forms need a constant fundamental price");
    if (traj.samples.empty())
        throw Error(ErrorCode::InvalidArgument, "empty trajectory");
}

double regime_chi(OracleRegime regime)
{
    switch (regime.kind) {
    case OracleRegime::Kind::fundamentalist: return 1.0;
    case OracleRegime::Kind::chartist: return 0.0;
    case OracleRegime::Kind::mixed: return regime.chi;
    }
    return regime.chi;
}

// Splits [0, n) into maximal runs of constant sign(K). A zero sign continues
// the current run. Returns the start index of every run after the first.
std::vector<std::size_t> branch_starts(const std::vector<Branch>& branches, CrossingPolicy policy)
{
    std::vector<std::size_t> starts;
    int current = 0;
    for (std::size_t j = 0; j < branches.size(); ++j) {
        const int s = branches[j].sign;
        if (s == 0)
            continue;
        if (current != 0 && s != current) {
            if (policy == CrossingPolicy::reject)
                throw StepError(ErrorCode::BranchCrossing, static_cast<long long>(j),
                                "sign of K changes at sample " + std::to_string(j));
            starts.push_back(j);
        }
        current = s;
    }
    return starts;
}

std::vector<Branch> all_branches(const Trajectory& traj, const ModelParams& params, double chi)
{
    std::vector<Branch> out;
    out.reserve(traj.samples.size());
    for (const auto& s : traj.samples)
        out.push_back(explicit_branch(s, params, chi));
    return out;
}

// Calls eval(a, b) for every segment [a, b) of constant branch.
template <class Eval>
void for_each_segment(std::size_t n, const std::vector<std::size_t>& starts, Eval eval)
{
    std::size_t a = 0;
    for (std::size_t s : starts) {
        eval(a, s);
        a = s;
    }
    eval(a, n);
}

double branch_sign_of_segment(const std::vector<Branch>& br, std::size_t a, std::size_t b)
{
    for (std::size_t j = a; j < b; ++j)
        if (br[j].sign != 0)
            return br[j].sign;
    return 0;
}

} // namespace

Branch explicit_branch(const Sample& s, const ModelParams& params, double chi)
{
    const double A = chi * params.omega * params.s_f + (1.0 - chi) * params.dividend;
    const double B = chi * params.omega + params.r;
    const double drive = A - B * s.S;
    Branch b;
    b.sign = drive > 0.0 ? 1 : (drive < 0.0 ? -1 : 0);
    const double W = b.sign >= 0 ? s.Y : s.X;
    const double denom = params.nu - (1.0 - chi) * params.kappa * W;
    if (!(denom > 0.0))
        throw Error(ErrorCode::RegimeMismatch,
                    "explicit price equation singular: nu - (1-chi) kappa W <= 0 at t=" + std::to_string(s.t));
    b.rate = params.kappa * W / denom;
    b.k = b.sign == 0 ? 0.0 : params.nu * drive / (s.S * denom);
    return b;
}

ClosedFormSeries stock_closed_form(const Trajectory& traj, const ModelParams& params, OracleRegime regime,
                                   CrossingPolicy policy)
{
    const double chi = regime_chi(regime);
    check_regime(traj, params, chi);
    const auto& smp = traj.samples;
    const auto br = all_branches(traj, params, chi);

    ClosedFormSeries out;
    out.crossings = branch_starts(br, policy);
    out.values.resize(smp.size());

    const double A = chi * params.omega * params.s_f + (1.0 - chi) * params.dividend;
    const double B = chi * params.omega + params.r;
    for_each_segment(smp.size(), out.crossings, [&](std::size_t a, std::size_t b) {
        const double s0 = smp[a].S;
        double integral = 0.0;
        out.values[a] = s0;
        for (std::size_t j = a + 1; j < b; ++j) {
            integral += 0.5 * (br[j - 1].rate + br[j].rate) * (smp[j].t - smp[j - 1].t);
            if (B == 0.0)
                out.values[j] = s0 + A * integral;
            else
                out.values[j] = A / B + (s0 - A / B) * std::exp(-B * integral);
        }
    });
    return out;
}

ClosedFormSeries wealth_closed_form(const Trajectory& traj, const ModelParams& params, Portfolio portfolio,
                                    CrossingPolicy policy)
{
    const OracleRegime regime = OracleRegime::from_params(traj.params);
    const double chi = regime_chi(regime);
    check_regime(traj, params, chi);
    const auto& smp = traj.samples;
    const auto br = all_branches(traj, params, chi);
    const double nu = params.nu;
    const double kappa = params.kappa;
    const double D = params.dividend;
    const double r = params.r;

    ClosedFormSeries out;
    out.crossings = branch_starts(br, policy);
    out.values.resize(smp.size());

    for_each_segment(smp.size(), out.crossings, [&](std::size_t a, std::size_t b) {
        const double sign = branch_sign_of_segment(br, a, b);
        const double x0 = smp[a].X;
        const double y0 = smp[a].Y;
        out.values[a] = portfolio == Portfolio::stock ? x0 : y0;
        // Running quadratures of the exponent and of the inhomogeneous term.
        double exponent = 0.0;
        double source = 0.0;
        auto trap = [&](double f0, double f1, std::size_t j) { return 0.5 * (f0 + f1) * (smp[j].t - smp[j - 1].t); };

        for (std::size_t j = a + 1; j < b; ++j) {
            const Sample& p = smp[j - 1];
            const Sample& c = smp[j];
            const double kp = br[j - 1].k;
            const double kc = br[j].k;
            if (portfolio == Portfolio::bond) {
                if (sign >= 0) {
                    // dY = (r - K/nu) Y
                    exponent += trap(r - kp / nu, r - kc / nu, j);
                    out.values[j] = y0 * std::exp(exponent);
                } else {
                    // dY = r Y - K X / nu
                    const double tp = p.t - smp[a].t;
                    const double tc = c.t - smp[a].t;
                    source += trap(kp * p.X / nu * std::exp(-r * tp), kc * c.X / nu * std::exp(-r * tc), j);
                    out.values[j] = std::exp(r * tc) * (y0 - source);
                }
            } else {
                if (sign >= 0) {
                    // dX = (kappa K Y / nu + D/S) X + K Y / nu
                    const double ep = exponent;
                    exponent += trap(kappa * kp * p.Y / nu + D / p.S, kappa * kc * c.Y / nu + D / c.S, j);
                    source += trap(kp * p.Y / nu * std::exp(-ep), kc * c.Y / nu * std::exp(-exponent), j);
                    out.values[j] = std::exp(exponent) * (x0 + source);
                } else {
                    // dX = (K/nu + D/S) X + (kappa K / nu) X^2
                    const double ep = exponent;
                    exponent += trap(kp / nu + D / p.S, kc / nu + D / c.S, j);
                    source += trap(kappa * kp / nu * std::exp(ep), kappa * kc / nu * std::exp(exponent), j);
                    out.values[j] = x0 * std::exp(exponent) / (1.0 - x0 * source);
                }
            }
        }
    });
    return out;
}

double OracleReport::worst() const
{
    double w = 0.0;
    for (const auto& c : channels)
        w = std::max(w, c.max_rel_dev);
    return w;
}

const ChannelDeviation& OracleReport::channel(const std::string& name) const
{
    for (const auto& c : channels)
        if (c.channel == name)
            return c;
    throw Error(ErrorCode::InvalidArgument, "no oracle channel " + name);
}

namespace {

ChannelDeviation deviation(const std::string& name, const Trajectory& traj, const ClosedFormSeries& oracle,
                           double Sample::*field)
{
    ChannelDeviation dev;
    dev.channel = name;
    dev.crossings = oracle.crossings.size();
    std::size_t next_crossing = 0;
    for (std::size_t j = 0; j < traj.samples.size(); ++j) {
        if (next_crossing < oracle.crossings.size() && oracle.crossings[next_crossing] == j) {
            ++next_crossing;
            continue;
        }
        const double sim = traj.samples[j].*field;
        const double ref = oracle.values[j];
        const double scale = std::abs(ref);
        const double d = scale > 0.0 ? std::abs(sim - ref) / scale : std::abs(sim - ref);
        if (d > dev.max_rel_dev) {
            dev.max_rel_dev = d;
            dev.at_t = traj.samples[j].t;
        }
    }
    return dev;
}

} // namespace

OracleReport oracle_report(const Trajectory& traj, const ModelParams& params)
{
    const OracleRegime regime = OracleRegime::from_params(traj.params);
    const auto s = stock_closed_form(traj, params, regime);
    const auto x = wealth_closed_form(traj, params, Portfolio::stock);
    const auto y = wealth_closed_form(traj, params, Portfolio::bond);
    OracleReport rep;
    rep.channels.push_back(deviation("S", traj, s, &Sample::S));
    rep.channels.push_back(deviation("X", traj, x, &Sample::X));
    rep.channels.push_back(deviation("Y", traj, y, &Sample::Y));
    rep.crossings = s.crossings.size();
    return rep;
}

std::string to_json(const OracleReport& report, int indent)
{
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : report.channels)
        j.push_back({{"channel", c.channel}, {"max_rel_dev", c.max_rel_dev}, {"at_t", c.at_t}, {"crossings", c.crossings}});
    return j.dump(indent);
}

} // namespace mfp
