#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "episim/ensemble.hpp"
#include "episim/exact.hpp"
#include "episim/model.hpp"

namespace episim {

// All numeric CSV output uses 17 significant digits, enough for a
// lossless double round-trip through the reader below.

// Header `t,x_0,...,x_{N-1}`, one row per saved grid point.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

// Reads a trajectory CSV back (times + states; scheme is set to "csv").
Trajectory read_trajectory_csv(const std::filesystem::path& path);
Trajectory read_trajectory_csv(std::istream& in);

// Header `t,mean_0,...,mean_{N-1},q05_norm,q50_norm,q95_norm,norm_mean`.
void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats);
void write_ensemble_csv(const std::filesystem::path& path, const EnsembleStats& stats);

// Marginals use the trajectory layout; confidence half-widths go to a
// sidecar file of the same shape.
void write_marginals_csv(const std::filesystem::path& csv_path,
                         const std::filesystem::path& ci_path,
                         const MarginalCurve& curve);

void write_text_file(const std::filesystem::path& path, const std::string& content);

struct PlotSeries {
    std::string csv;
    int column = 2; // 1-based gnuplot column plotted against column 1 (t)
    std::string title;
};

struct PlotSpec {
    std::string svg;
    std::string title;
    std::string ylabel = "infection probability";
    std::vector<PlotSeries> series;
};

// Standalone gnuplot script that renders the CSV(s) to SVG.
void write_gnuplot_script(const std::filesystem::path& path, const PlotSpec& spec);

} // namespace episim
