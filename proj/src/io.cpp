#include "episim/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "episim/errors.hpp"

namespace episim {
namespace {

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open '" + path.string() + "' for writing");
    return out;
}

void write_grid_csv(std::ostream& out, const std::string& col_prefix,
                    const std::vector<double>& times,
                    const std::vector<StateVector>& rows)
{
    const std::size_t n = rows.empty() ? 0 : rows.front().size();
    out << 't';
    for (std::size_t i = 0; i < n; ++i)
        out << ',' << col_prefix << i;
    out << '\n';
    for (std::size_t k = 0; k < times.size(); ++k) {
        out << fmt17(times[k]);
        for (double v : rows[k])
            out << ',' << fmt17(v);
        out << '\n';
    }
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_double(const std::string& field, std::size_t lineno)
{
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0')
        throw parse_error("CSV line " + std::to_string(lineno) +
                          ": '" + field + "' is not a number");
    return v;
}

} // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj)
{
    write_grid_csv(out, "x_", traj.times, traj.states);
    if (!out)
        throw io_error("trajectory CSV write failed");
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj)
{
    auto out = open_out(path);
    write_trajectory_csv(out, traj);
}

Trajectory read_trajectory_csv(std::istream& in)
{
    Trajectory traj;
    traj.scheme = "csv";
    std::string line;
    std::size_t lineno = 0;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (lineno == 1) {
            const auto header = split_csv_line(line);
            if (header.empty() || header.front() != "t")
                throw parse_error("trajectory CSV must start with a 't' column");
            columns = header.size();
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != columns)
            throw parse_error("CSV line " + std::to_string(lineno) + ": expected " +
                              std::to_string(columns) + " fields, got " +
                              std::to_string(fields.size()));
        traj.times.push_back(parse_double(fields[0], lineno));
        StateVector state(fields.size() - 1);
        for (std::size_t i = 1; i < fields.size(); ++i)
            state[i - 1] = parse_double(fields[i], lineno);
        traj.states.push_back(std::move(state));
    }
    if (traj.times.empty())
        throw parse_error("trajectory CSV has no data rows");
    if (traj.times.size() >= 2)
        traj.dt = traj.times[1] - traj.times[0];
    return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open '" + path.string() + "' for reading");
    return read_trajectory_csv(in);
}

void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats)
{
    const std::size_t n = stats.mean.empty() ? 0 : stats.mean.front().size();
    out << 't';
    for (std::size_t i = 0; i < n; ++i)
        out << ",mean_" << i;
    out << ",q05_norm,q50_norm,q95_norm,norm_mean\n";
    for (std::size_t k = 0; k < stats.times.size(); ++k) {
        out << fmt17(stats.times[k]);
        for (double v : stats.mean[k])
            out << ',' << fmt17(v);
        out << ',' << fmt17(stats.norm_q05[k]) << ',' << fmt17(stats.norm_q50[k])
            << ',' << fmt17(stats.norm_q95[k]) << ',' << fmt17(stats.norm_mean[k])
            << '\n';
    }
    if (!out)
        throw io_error("ensemble CSV write failed");
}

void write_ensemble_csv(const std::filesystem::path& path, const EnsembleStats& stats)
{
    auto out = open_out(path);
    write_ensemble_csv(out, stats);
}

void write_marginals_csv(const std::filesystem::path& csv_path,
                         const std::filesystem::path& ci_path,
                         const MarginalCurve& curve)
{
    {
        auto out = open_out(csv_path);
        write_grid_csv(out, "x_", curve.times, curve.probs);
        if (!out)
            throw io_error("marginals CSV write failed");
    }
    {
        auto out = open_out(ci_path);
        write_grid_csv(out, "ci_", curve.times, curve.ci_halfwidth);
        if (!out)
            throw io_error("marginals CI sidecar write failed");
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    auto out = open_out(path);
    out << content;
    if (!out)
        throw io_error("write to '" + path.string() + "' failed");
}

void write_gnuplot_script(const std::filesystem::path& path, const PlotSpec& spec)
{
    auto out = open_out(path);
    out << "# Render with: gnuplot " << path.filename().string() << "\n"
        << "set terminal svg size 960,600 enhanced\n"
        << "set output '" << spec.svg << "'\n"
        << "set datafile separator ','\n"
        << "set title '" << spec.title << "'\n"
        << "set xlabel 't'\n"
        << "set ylabel '" << spec.ylabel << "'\n"
        << "set grid\n"
        << "plot ";
    for (std::size_t i = 0; i < spec.series.size(); ++i) {
        const auto& s = spec.series[i];
        if (i > 0)
            out << ", \\\n     ";
        out << "'" << s.csv << "' using 1:" << s.column << " skip 1 with lines title '"
            << s.title << "'";
    }
    out << '\n';
    if (!out)
        throw io_error("gnuplot script write failed");
}

} // namespace episim
