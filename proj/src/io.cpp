#include "mfp/io.hpp"

#include "mfp/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

namespace mfp {

namespace {

void append(fmt::memory_buffer& buf, double v, int precision)
{
    fmt::format_to(std::back_inserter(buf), "{:.{}g}", v, precision);
}

} // namespace

std::string trajectory_csv(const Trajectory& traj, int precision)
{
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "{}\n", trajectory_header);
    for (const auto& s : traj.samples) {
        const double row[] = {s.t, s.X, s.Y, s.S, s.ED, s.chi, s.K, s.sf};
        for (std::size_t j = 0; j < std::size(row); ++j) {
            if (j)
                buf.push_back(',');
            append(buf, row[j], precision);
        }
        buf.push_back('\n');
    }
    return fmt::to_string(buf);
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj, int precision)
{
    write_file(path, trajectory_csv(traj, precision));
}

Trajectory parse_trajectory_csv(std::string_view text)
{
    Trajectory traj;
    int line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (!header_seen) {
            if (line != trajectory_header)
                throw ParseError(line_no, "expected trajectory header '" + std::string(trajectory_header) + "'");
            header_seen = true;
            continue;
        }
        if (line.empty())
            continue;
        double row[8];
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int j = 0; j < 8; ++j) {
            auto res = std::from_chars(p, end, row[j]);
            if (res.ec != std::errc())
                throw ParseError(line_no, fmt::format("bad number in column {}", j + 1));
            p = res.ptr;
            if (j < 7) {
                if (p == end || *p != ',')
                    throw ParseError(line_no, "expected 8 comma-separated columns");
                ++p;
            }
        }
        if (p != end)
            throw ParseError(line_no, "trailing characters after column 8");
        traj.samples.push_back({row[0], row[1], row[2], row[3], row[4], row[5], row[6], row[7]});
    }
    if (!header_seen)
        throw ParseError(1, "empty trajectory file");
    traj.steps = traj.samples.empty() ? 0 : traj.samples.size() - 1;
    traj.constant_fundamental = true;
    for (const auto& s : traj.samples)
        if (s.sf != traj.samples.front().sf)
            traj.constant_fundamental = false;
    return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path)
{
    return parse_trajectory_csv(read_file(path));
}

std::string snapshots_csv(std::span<const AgentSnapshot> snapshots, int precision)
{
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "step,agent,x,y\n");
    for (const auto& snap : snapshots) {
        for (std::size_t i = 0; i < snap.x.size(); ++i) {
            fmt::format_to(std::back_inserter(buf), "{},{},", snap.step, i);
            append(buf, snap.x[i], precision);
            buf.push_back(',');
            append(buf, snap.y[i], precision);
            buf.push_back('\n');
        }
    }
    return fmt::to_string(buf);
}

std::string qq_csv(std::span<const QQPair> pairs, int precision)
{
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "p,theoretical,empirical\n");
    for (const auto& q : pairs) {
        append(buf, q.p, precision);
        buf.push_back(',');
        append(buf, q.theoretical, precision);
        buf.push_back(',');
        append(buf, q.empirical, precision);
        buf.push_back('\n');
    }
    return fmt::to_string(buf);
}

std::string sweep_csv(std::span<const SweepCell> cells, int precision)
{
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "param,min_S,max_S,class\n");
    for (const auto& c : cells) {
        append(buf, c.value, precision);
        buf.push_back(',');
        if (!c.error.empty()) {
            fmt::format_to(std::back_inserter(buf), "nan,nan,failed\n");
            continue;
        }
        append(buf, c.range.min_S, precision);
        buf.push_back(',');
        append(buf, c.range.max_S, precision);
        fmt::format_to(std::back_inserter(buf), ",{}\n", c.range.label());
    }
    return fmt::to_string(buf);
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
        throw Error(ErrorCode::Io, "write failed for " + path.string());
}

} // namespace mfp
