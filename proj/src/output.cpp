#include "ptesc/output.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "ptesc/errors.hpp"

namespace ptesc {

namespace {

std::ofstream open_for_write(const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write '" + path + "'");
    return os;
}

void finish(std::ofstream& os, const std::string& path) {
    os.flush();
    if (!os) throw Error("write failed for '" + path + "'");
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string csv_header(std::size_t n) {
    std::string h = "t,tau";
    for (std::size_t j = 0; j < n; ++j) h += ",x" + std::to_string(j + 1);
    h += ",u,y,xi,u_hat,eta,nu_bar";
    return h;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << csv_header(traj.n) << '\n';
    std::string line;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        line.clear();
        auto put = [&](double v) {
            if (!line.empty()) line += ',';
            line += format_double(v);
        };
        put(traj.t[i]);
        put(traj.tau[i]);
        for (std::size_t j = 0; j < traj.n; ++j) put(traj.x[j][i]);
        put(traj.u[i]);
        put(traj.y[i]);
        put(traj.xi[i]);
        put(traj.u_hat[i]);
        put(traj.eta[i]);
        put(traj.nu_bar[i]);
        line += '\n';
        os << line;
    }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    auto os = open_for_write(path);
    write_trajectory_csv(os, traj);
    finish(os, path);
}

std::string plot_script(const Trajectory& traj, const PlotOptions& options) {
    std::ostringstream s;
    const std::string data = "'" + options.csv_name + "'";
    const bool diverged = !traj.completed();
    const double t_end = traj.size() > 0 ? traj.t.back() : 0.0;

    s << "# Generated by ptesc. Run with: gnuplot plots.gp\n";
    s << "set datafile separator comma\n";
    s << "set key autotitle columnhead\n";
    s << "set terminal pngcairo size 900,900\n";
    s << "set grid\n";
    s << "set xlabel 't'\n";
    if (traj.size() > 1) s << "set xrange [0:" << format_double(t_end) << "]\n";
    if (diverged) {
        s << "# Partial trajectory: the run diverged at t = " << format_double(traj.diverged_at)
          << " (" << traj.reason << ")\n";
    }
    auto annotate = [&]() {
        if (diverged) {
            s << "set label 1 'diverged at t = " << format_double(traj.diverged_at)
              << "' at graph 0.02, graph 0.9 textcolor rgb 'red'\n";
        }
    };

    s << "\nset output 'trajectories.png'\n";
    const int panels = traj.n >= 2 ? 3 : 2;
    s << "set multiplot layout " << panels << ",1";
    if (!options.title.empty()) s << " title '" << options.title << "'";
    s << "\n";
    if (traj.n >= 2) {
        s << "set ylabel 'x_2'\n";
        annotate();
        s << "plot " << data << " using \"t\":\"x2\" with lines lw 2 notitle\n";
    }
    s << "set ylabel 'x_1'\n";
    annotate();
    s << "plot " << data << " using \"t\":\"x1\" with lines lw 2 notitle\n";
    s << "set ylabel 'y'\n";
    annotate();
    s << "plot " << data << " using \"t\":\"y\" with lines lw 2 notitle";
    if (options.y_star) {
        s << ", " << format_double(*options.y_star) << " with lines dt 2 title 'y*'";
    }
    s << "\n";
    s << "unset multiplot\n";
    s << "unset label 1\n";

    s << "\nset terminal pngcairo size 900,400\n";
    s << "set output 'xi.png'\n";
    s << "set title 'Estimate of the output ξ'\n";
    s << "set ylabel 'ξ'\n";
    annotate();
    s << "plot " << data << " using \"t\":\"xi\" with lines lw 2 notitle\n";
    s << "unset output\n";
    return s.str();
}

std::string emit_plots(const Trajectory& traj, const std::string& out_dir,
                       const PlotOptions& options) {
    const std::string path = (std::filesystem::path(out_dir) / "plots.gp").string();
    auto os = open_for_write(path);
    os << plot_script(traj, options);
    finish(os, path);
    return path;
}

}  // namespace ptesc
