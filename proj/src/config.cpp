#include "mfp/config.hpp"

#include "mfp/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace mfp {

namespace {

constexpr std::string_view kDefaultConfig = R"(# Standard parameter setting of the portfolio model.
[market]
kappa = 0.1
nu = 5
r = 0.01
dividend = 0.01
s_f = 5.5
omega = 20

[behavior]
gamma = 0.35
alpha = 0.5
beta = 0.25
chi_mode = dynamic
value_fn = prospect

[run]
dt = 0.0001
t_end = 3
X0 = 20
Y0 = 20
S0 = 5
stride = 1
seed = 767
fundamental = constant
sigma = 1
precision = 12

[scheme]
scheme = lagged_euler
fp_tol = 1e-12
fp_max_iter = 100
fp_damping = 0.5

[micro]
agents = 1000
snapshot_every = 0
)";

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Value conversion failures surface as this and are re-thrown with context.
struct BadValue {
    std::string what;
};

double to_double(std::string_view v)
{
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end)
        throw BadValue{"expected a number, got '" + std::string(v) + "'"};
    return out;
}

template <class Int>
Int to_int(std::string_view v)
{
    Int out = 0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end)
        throw BadValue{"expected an integer, got '" + std::string(v) + "'"};
    return out;
}

std::string fmt_double(double v)
{
    return fmt::format("{}", v); // shortest round-trip representation
}

struct KeySpec {
    const char* section;
    const char* name;
    bool required;
    std::function<void(Config&, std::string_view)> set;
    std::function<std::optional<std::string>(const Config&)> get;
};

const std::vector<KeySpec>& key_table()
{
    using C = Config;
    static const std::vector<KeySpec> table = {
        {"market", "kappa", true, [](C& c, std::string_view v) { c.params.kappa = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.params.kappa)); }},
        {"market", "nu", true, [](C& c, std::string_view v) { c.params.nu = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.params.nu)); }},
        {"market", "r", true, [](C& c, std::string_view v) { c.params.r = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.params.r)); }},
        {"market", "dividend", true, [](C& c, std::string_view v) { c.params.dividend = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.params.dividend)); }},
        {"market", "s_f", true, [](C& c, std::string_view v) { c.params.s_f = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.params.s_f)); }},
        {"market", "omega", true, [](C& c, std::string_view v) { c.params.omega = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.params.omega)); }},

        {"behavior", "gamma", true, [](C& c, std::string_view v) { c.params.gamma = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.params.gamma)); }},
        {"behavior", "alpha", true, [](C& c, std::string_view v) { c.params.alpha = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.params.alpha)); }},
        {"behavior", "beta", true, [](C& c, std::string_view v) { c.params.beta = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.params.beta)); }},
        {"behavior", "chi_mode", true,
         [](C& c, std::string_view v) {
             if (v == "dynamic")
                 c.params.chi_mode.kind = ChiMode::Kind::dynamic;
             else if (v == "constant")
                 c.params.chi_mode.kind = ChiMode::Kind::constant;
             else
                 throw BadValue{"expected dynamic or constant, got '" + std::string(v) + "'"};
         },
         [](const C& c) {
             return std::optional<std::string>(c.params.chi_mode.is_constant() ? "constant" : "dynamic");
         }},
        {"behavior", "chi0", false, [](C& c, std::string_view v) { c.params.chi_mode.chi0 = to_double(v); },
         [](const C& c) {
             return c.params.chi_mode.is_constant() ? std::optional(fmt_double(c.params.chi_mode.chi0)) : std::nullopt;
         }},
        {"behavior", "value_fn", true,
         [](C& c, std::string_view v) {
             if (v == "identity")
                 c.params.value_fn_mode = ValueFnMode::identity;
             else if (v == "prospect")
                 c.params.value_fn_mode = ValueFnMode::prospect;
             else
                 throw BadValue{"expected identity or prospect, got '" + std::string(v) + "'"};
         },
         [](const C& c) {
             return std::optional<std::string>(c.params.value_fn_mode == ValueFnMode::identity ? "identity"
                                                                                                 : "prospect");
         }},

        {"run", "dt", true, [](C& c, std::string_view v) { c.params.dt = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.params.dt)); }},
        {"run", "t_end", true, [](C& c, std::string_view v) { c.params.t_end = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.params.t_end)); }},
        {"run", "X0", true, [](C& c, std::string_view v) { c.run.X0 = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.run.X0)); }},
        {"run", "Y0", true, [](C& c, std::string_view v) { c.run.Y0 = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.run.Y0)); }},
        {"run", "S0", true, [](C& c, std::string_view v) { c.run.S0 = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.run.S0)); }},
        {"run", "stride", false, [](C& c, std::string_view v) { c.run.stride = to_int<std::size_t>(v); },
         [](const C& c) { return std::optional(std::to_string(c.run.stride)); }},
        {"run", "seed", false, [](C& c, std::string_view v) { c.run.seed = to_int<std::uint64_t>(v); },
         [](const C& c) { return std::optional(std::to_string(c.run.seed)); }},
        {"run", "fundamental", false,
         [](C& c, std::string_view v) {
             if (v == "constant")
                 c.run.fundamental = FundamentalMode::constant;
             else if (v == "gbm")
                 c.run.fundamental = FundamentalMode::gbm;
             else
                 throw BadValue{"expected constant or gbm, got '" + std::string(v) + "'"};
         },
         [](const C& c) {
             return std::optional<std::string>(c.run.fundamental == FundamentalMode::gbm ? "gbm" : "constant");
         }},
        {"run", "sigma", false, [](C& c, std::string_view v) { c.run.sigma = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.run.sigma)); }},
        {"run", "precision", false, [](C& c, std::string_view v) { c.run.precision = to_int<int>(v); },
         [](const C& c) { return std::optional(std::to_string(c.run.precision)); }},

        {"scheme", "scheme", false, [](C& c, std::string_view v) { c.scheme.scheme = scheme_from_string(std::string(v)); },
         [](const C& c) { return std::optional<std::string>(to_string(c.scheme.scheme)); }},
        {"scheme", "fp_tol", false, [](C& c, std::string_view v) { c.scheme.fp_tol = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.scheme.fp_tol)); }},
        {"scheme", "fp_max_iter", false, [](C& c, std::string_view v) { c.scheme.fp_max_iter = to_int<int>(v); },
         [](const C& c) { return std::optional(std::to_string(c.scheme.fp_max_iter)); }},
        {"scheme", "fp_damping", false, [](C& c, std::string_view v) { c.scheme.fp_damping = to_double(v); },
         [](const C& c) { return std::optional(fmt_double(c.scheme.fp_damping)); }},

        {"micro", "agents", false, [](C& c, std::string_view v) { c.run.agents = to_int<std::size_t>(v); },
         [](const C& c) { return std::optional(std::to_string(c.run.agents)); }},
        {"micro", "snapshot_every", false,
         [](C& c, std::string_view v) { c.run.snapshot_every = to_int<std::size_t>(v); },
         [](const C& c) { return std::optional(std::to_string(c.run.snapshot_every)); }},
        {"micro", "w_min", false, [](C& c, std::string_view v) { c.run.w_min = to_double(v); },
         [](const C& c) { return c.run.w_min ? std::optional(fmt_double(*c.run.w_min)) : std::nullopt; }},
        {"micro", "w_max", false, [](C& c, std::string_view v) { c.run.w_max = to_double(v); },
         [](const C& c) { return c.run.w_max ? std::optional(fmt_double(*c.run.w_max)) : std::nullopt; }},
    };
    return table;
}

const KeySpec* find_key(std::string_view section, std::string_view name)
{
    for (const auto& k : key_table())
        if (section == k.section && name == k.name)
            return &k;
    return nullptr;
}

const KeySpec& resolve_override_key(std::string_view key)
{
    const auto dot = key.find('.');
    if (dot != std::string_view::npos) {
        if (const auto* k = find_key(key.substr(0, dot), key.substr(dot + 1)))
            return *k;
        throw ValidationError(std::string(key), "unknown configuration key");
    }
    const KeySpec* match = nullptr;
    for (const auto& k : key_table()) {
        if (key == k.name) {
            if (match)
                throw ValidationError(std::string(key), "ambiguous key; use section.key");
            match = &k;
        }
    }
    if (!match)
        throw ValidationError(std::string(key), "unknown configuration key");
    return *match;
}

} // namespace

void Config::validate() const
{
    params.validate();
    scheme.validate();
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok)
            throw ValidationError(field, what);
    };
    require(run.X0 >= 0.0, "X0", "must be >= 0");
    require(run.Y0 >= 0.0, "Y0", "must be >= 0");
    require(run.S0 > 0.0, "S0", "must be > 0");
    require(run.stride >= 1, "stride", "must be >= 1");
    require(run.sigma >= 0.0, "sigma", "must be >= 0");
    require(run.precision >= 1 && run.precision <= 17, "precision", "must lie in [1, 17]");
    require(run.agents >= 1, "agents", "must be >= 1");
    require(run.w_min.has_value() == run.w_max.has_value(), "w_min", "w_min and w_max must be given together");
    if (run.w_min)
        require(*run.w_min >= 0.0 && *run.w_max >= *run.w_min, "w_max", "needs 0 <= w_min <= w_max");
}

std::string_view default_config_text()
{
    return kDefaultConfig;
}

Config default_config()
{
    return parse_config(kDefaultConfig);
}

Config parse_config(std::string_view text)
{
    Config config;
    std::set<std::string> seen;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError(line_no, "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            const bool known = std::any_of(key_table().begin(), key_table().end(),
                                           [&](const KeySpec& k) { return section == k.section; });
            if (!known)
                throw ParseError(line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(line_no, "expected key = value");
        if (section.empty())
            throw ParseError(line_no, "key outside of a section");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const KeySpec* spec = find_key(section, key);
        if (!spec)
            throw ParseError(line_no, "unknown key '" + std::string(key) + "' in [" + section + "]");
        const std::string full = section + "." + std::string(key);
        if (!seen.insert(full).second)
            throw ParseError(line_no, "duplicate key " + full);
        if (value.empty())
            throw ParseError(line_no, "empty value for " + full);
        try {
            spec->set(config, value);
        } catch (const BadValue& e) {
            throw ParseError(line_no, full + ": " + e.what);
        }
    }

    for (const auto& k : key_table()) {
        const std::string full = std::string(k.section) + "." + k.name;
        if (k.required && !seen.count(full))
            throw ValidationError(full, "missing required key");
    }
    if (config.params.chi_mode.is_constant() && !seen.count("behavior.chi0"))
        throw ValidationError("behavior.chi0", "required when chi_mode = constant");
    config.validate();
    return config;
}

Config load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

void set_unvalidated(Config& config, std::string_view key, std::string_view value)
{
    const KeySpec& spec = resolve_override_key(trim(key));
    const std::string full = std::string(spec.section) + "." + spec.name;
    try {
        spec.set(config, trim(value));
    } catch (const BadValue& e) {
        throw ValidationError(full, e.what);
    }
    config.overrides.push_back(full + "=" + std::string(trim(value)));
}

std::pair<std::string_view, std::string_view> split_assignment(std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ValidationError(std::string(assignment), "override must look like key=value");
    return {assignment.substr(0, eq), assignment.substr(eq + 1)};
}

} // namespace

void apply_override(Config& config, std::string_view key, std::string_view value)
{
    Config updated = config;
    set_unvalidated(updated, key, value);
    updated.validate();
    config = std::move(updated);
}

void apply_override(Config& config, std::string_view assignment)
{
    const auto [key, value] = split_assignment(assignment);
    apply_override(config, key, value);
}

void apply_overrides(Config& config, std::span<const std::string> assignments)
{
    Config updated = config;
    for (const auto& a : assignments) {
        const auto [key, value] = split_assignment(a);
        set_unvalidated(updated, key, value);
    }
    updated.validate();
    config = std::move(updated);
}

std::string echo(const Config& config)
{
    std::string out;
    std::string section;
    for (const auto& k : key_table()) {
        if (section != k.section) {
            if (!section.empty())
                out += "\n";
            section = k.section;
            out += "[" + section + "]\n";
        }
        if (auto v = k.get(config))
            out += fmt::format("{} = {}\n", k.name, *v);
    }
    return out;
}

MacroState initial_state(const Config& config)
{
    MacroState s;
    s.X = config.run.X0;
    s.Y = config.run.Y0;
    s.S = config.run.S0;
    return s;
}

} // namespace mfp
