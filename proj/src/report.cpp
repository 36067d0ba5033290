#include "mfp/report.hpp"

#include "mfp/error.hpp"

#include <nlohmann/json.hpp>

namespace mfp {

using nlohmann::json;

namespace {

bool same_sample(const Sample& a, const Sample& b)
{
    return a.t == b.t && a.X == b.X && a.Y == b.Y && a.S == b.S && a.ED == b.ED && a.chi == b.chi && a.K == b.K &&
           a.sf == b.sf;
}

json optional_json(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_double(const json& j, const char* key)
{
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    return j.at(key).get<double>();
}

} // namespace

bool RunReport::operator==(const RunReport& o) const
{
    return command == o.command && config_echo == o.config_echo && scheme == o.scheme && seed == o.seed &&
           fundamental == o.fundamental && steps == o.steps && samples == o.samples && stride == o.stride &&
           wall_time_s == o.wall_time_s && same_sample(terminal, o.terminal) && stats == o.stats &&
           fp_fallbacks == o.fp_fallbacks && max_transfer_residual == o.max_transfer_residual &&
           warnings == o.warnings && overrides == o.overrides;
}

std::string to_json(const RunReport& r, int indent)
{
    json j;
    j["command"] = r.command;
    j["config_echo"] = r.config_echo;
    j["scheme"] = r.scheme;
    j["seed"] = r.seed;
    j["fundamental"] = r.fundamental;
    j["steps"] = r.steps;
    j["samples"] = r.samples;
    j["stride"] = r.stride;
    j["wall_time_s"] = r.wall_time_s;
    const auto& s = r.terminal;
    j["terminal"] = {{"t", s.t}, {"X", s.X}, {"Y", s.Y}, {"S", s.S}, {"ED", s.ED},
                     {"chi", s.chi}, {"K", s.K}, {"sf", s.sf}};
    const auto& st = r.stats;
    j["stats"] = {{"min_S", st.min_S},
                  {"max_S", st.max_S},
                  {"mean_S", st.mean_S},
                  {"window", st.window},
                  {"class", st.range_class},
                  {"amplitude", optional_json(st.amplitude)},
                  {"period", optional_json(st.period)},
                  {"center", optional_json(st.center)},
                  {"stock_excess_kurtosis", optional_json(st.stock_excess_kurtosis)},
                  {"fundamental_excess_kurtosis", optional_json(st.fundamental_excess_kurtosis)}};
    j["fp_fallbacks"] = r.fp_fallbacks;
    j["max_transfer_residual"] = r.max_transfer_residual;
    j["warnings"] = r.warnings;
    j["overrides"] = r.overrides;
    return j.dump(indent);
}

RunReport report_from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Parse, std::string("report: ") + e.what());
    }
    try {
        RunReport r;
        r.command = j.at("command").get<std::string>();
        r.config_echo = j.at("config_echo").get<std::string>();
        r.scheme = j.at("scheme").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.fundamental = j.at("fundamental").get<std::string>();
        r.steps = j.at("steps").get<std::size_t>();
        r.samples = j.at("samples").get<std::size_t>();
        r.stride = j.at("stride").get<std::size_t>();
        r.wall_time_s = j.at("wall_time_s").get<double>();
        const auto& t = j.at("terminal");
        r.terminal = {t.at("t").get<double>(),  t.at("X").get<double>(),   t.at("Y").get<double>(),
                      t.at("S").get<double>(),  t.at("ED").get<double>(),  t.at("chi").get<double>(),
                      t.at("K").get<double>(),  t.at("sf").get<double>()};
        const auto& st = j.at("stats");
        r.stats.min_S = st.at("min_S").get<double>();
        r.stats.max_S = st.at("max_S").get<double>();
        r.stats.mean_S = st.at("mean_S").get<double>();
        r.stats.window = st.at("window").get<std::size_t>();
        r.stats.range_class = st.at("class").get<std::string>();
        r.stats.amplitude = optional_double(st, "amplitude");
        r.stats.period = optional_double(st, "period");
        r.stats.center = optional_double(st, "center");
        r.stats.stock_excess_kurtosis = optional_double(st, "stock_excess_kurtosis");
        r.stats.fundamental_excess_kurtosis = optional_double(st, "fundamental_excess_kurtosis");
        r.fp_fallbacks = j.at("fp_fallbacks").get<std::size_t>();
        r.max_transfer_residual = j.at("max_transfer_residual").get<double>();
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
        r.overrides = j.at("overrides").get<std::vector<std::string>>();
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("report: ") + e.what());
    }
}

} // namespace mfp
