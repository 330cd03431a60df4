#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ptesc/errors.hpp"
#include "ptesc/output.hpp"
#include "ptesc/sim.hpp"

using namespace ptesc;
namespace fs = std::filesystem;

namespace {

EscParams scalar_params() {
    EscParams p;
    p.pt.T = 5.0;
    p.A = 0.1;
    p.omega = 150.0;
    p.omega_h = 2000.0;
    p.omega_l = 3.0;
    p.k = 1.0;
    p.tau_I = 0.5;
    return p;
}

Trajectory short_run(const PlantModel& plant, std::vector<double> x0) {
    IntegratorConfig c;
    c.output_samples = 200;
    auto p = scalar_params();
    p.A = 1.0;
    return simulate_esc(plant, p, x0, c);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("csv header") {
    CHECK(csv_header(1) == "t,tau,x1,u,y,xi,u_hat,eta,nu_bar");
    CHECK(csv_header(2) == "t,tau,x1,x2,u,y,xi,u_hat,eta,nu_bar");
}

TEST_CASE("format_double round-trips with 17 significant digits") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 4.995}) {
        CAPTURE(v);
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
    CHECK(format_double(1.0) == "1");
}

TEST_CASE("trajectory csv is rectangular, increasing in t and exact") {
    const auto gn = plants::general_nonlinear();
    const auto tr = short_run(gn, {1.0, 2.0});
    REQUIRE(tr.completed());
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == csv_header(2));
    std::size_t row = 0;
    double prev_t = -1.0;
    while (std::getline(is, line)) {
        const auto cells = split(line);
        REQUIRE(cells.size() == 10);
        for (const auto& c : cells) REQUIRE(c.find('"') == std::string::npos);
        const double t = std::strtod(cells[0].c_str(), nullptr);
        REQUIRE(t > prev_t);
        prev_t = t;
        REQUIRE(t == tr.t[row]);
        REQUIRE(std::strtod(cells[1].c_str(), nullptr) == tr.tau[row]);
        REQUIRE(std::strtod(cells[2].c_str(), nullptr) == tr.x[0][row]);
        REQUIRE(std::strtod(cells[3].c_str(), nullptr) == tr.x[1][row]);
        REQUIRE(std::strtod(cells[4].c_str(), nullptr) == tr.u[row]);
        REQUIRE(std::strtod(cells[5].c_str(), nullptr) == tr.y[row]);
        REQUIRE(std::strtod(cells[6].c_str(), nullptr) == tr.xi[row]);
        REQUIRE(std::strtod(cells[7].c_str(), nullptr) == tr.u_hat[row]);
        REQUIRE(std::strtod(cells[8].c_str(), nullptr) == tr.eta[row]);
        REQUIRE(std::strtod(cells[9].c_str(), nullptr) == tr.nu_bar[row]);
        ++row;
    }
    CHECK(row == tr.size());
}

TEST_CASE("plot script follows the figure layout") {
    const auto gn = plants::general_nonlinear();
    const auto tr = short_run(gn, {1.0, 2.0});
    PlotOptions o;
    o.title = "general_nonlinear";
    o.y_star = 1.0;
    const auto s = plot_script(tr, o);
    CHECK(contains(s, "trajectory.csv"));
    CHECK(contains(s, "multiplot layout 3,1"));
    const auto x2 = s.find("\"t\":\"x2\"");
    const auto x1 = s.find("\"t\":\"x1\"");
    const auto y = s.find("\"t\":\"y\"");
    REQUIRE(x2 != std::string::npos);
    REQUIRE(x1 != std::string::npos);
    REQUIRE(y != std::string::npos);
    CHECK(x2 < x1);
    CHECK(x1 < y);
    CHECK(contains(s, "Estimate of the output ξ"));
    CHECK(contains(s, "\"t\":\"xi\""));
    CHECK_FALSE(contains(s, "diverged"));

    const auto sq = plants::scalar_quadratic();
    const auto one = plot_script(short_run(sq, {3.0}), o);
    CHECK(contains(one, "multiplot layout 2,1"));
    CHECK_FALSE(contains(one, "\"x2\""));
}

TEST_CASE("plot script of a diverged run is truncated and annotated") {
    PlantModel p;
    p.name = "blow_up";
    p.n = 1;
    p.drift = [](std::span<const double> x, std::span<double> out) { out[0] = x[0] * x[0]; };
    p.input_map = [](std::span<const double>, std::span<double> out) { out[0] = 1.0; };
    p.cost = [](std::span<const double> x) { return x[0] * x[0]; };
    p.box = {{-10.0}, {10.0}};
    p.u_range = {-1.0, 1.0};
    auto params = scalar_params();
    params.k = 0.0;
    const auto tr = simulate_target(p, params, std::vector<double>{2.0});
    REQUIRE_FALSE(tr.completed());
    const auto s = plot_script(tr, {});
    CHECK(contains(s, "diverged at t = "));
    CHECK(contains(s, "set xrange [0:" + format_double(tr.t.back()) + "]"));
}

TEST_CASE("emit_plots writes the script next to the data") {
    const auto dir = fs::temp_directory_path() / "ptesc_test_output";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto sq = plants::scalar_quadratic();
    const auto tr = short_run(sq, {3.0});
    const auto path = emit_plots(tr, dir.string());
    CHECK(fs::path(path).filename() == "plots.gp");
    CHECK(fs::exists(path));
    write_trajectory_csv((dir / "trajectory.csv").string(), tr);
    CHECK(fs::file_size(dir / "trajectory.csv") > 0);
    CHECK_THROWS_AS(write_trajectory_csv((dir / "missing" / "x.csv").string(), tr), Error);
    fs::remove_all(dir);
}
