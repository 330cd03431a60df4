#pragma once

// File emission: trajectory table, plot script.
//
// The trajectory table is plain CSV with the header
//   t,tau,x1..xn,u,y,xi,u_hat,eta,nu_bar
// and 17 significant digits per value, so every double round-trips exactly.

#include <iosfwd>
#include <optional>
#include <string>

#include "ptesc/sim.hpp"

namespace ptesc {

/// v with 17 significant digits, enough to read back the identical double.
std::string format_double(double v);

std::string csv_header(std::size_t n);
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// Throws Error naming the path on IO failure.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

struct PlotOptions {
    std::string title;
    /// Data file referenced by the script, relative to the script.
    std::string csv_name = "trajectory.csv";
    /// Reference line drawn on the output panel.
    std::optional<double> y_star;
};

/// Gnuplot script: a three-panel figure (x2, x1, y against t; x1 and y only
/// for scalar plants) and a single-panel figure of xi. Diverged runs are cut
/// at the divergence time and annotated.
std::string plot_script(const Trajectory& traj, const PlotOptions& options);

/// Writes plots.gp into out_dir and returns its path. Throws Error on IO failure.
std::string emit_plots(const Trajectory& traj, const std::string& out_dir,
                       const PlotOptions& options = {});

}  // namespace ptesc
