#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = PTESC_CLI_PATH;
const std::string kConfigDir = PTESC_CONFIG_DIR;

struct Invocation {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct Workspace {
    fs::path root;
    explicit Workspace(const std::string& name) : root(fs::temp_directory_path() / name) {
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~Workspace() { fs::remove_all(root); }

    Invocation run(const std::string& args) const {
        const auto out = root / "stdout.txt";
        const auto err = root / "stderr.txt";
        const std::string cmd =
            "'" + kCli + "' " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
        const int status = std::system(cmd.c_str());
        Invocation r;
        r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    fs::path write(const std::string& name, const std::string& text) const {
        const auto p = root / name;
        std::ofstream(p) << text;
        return p;
    }
};

std::string config_text(const std::string& name) { return slurp(kConfigDir + "/" + name); }

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("help documents the exit codes") {
    Workspace ws("ptesc_cli_help");
    const auto r = ws.run("--help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("Exit codes") != std::string::npos);
    CHECK(r.out.find("diverged") != std::string::npos);
    CHECK(ws.run("").exit_code == 1);
    CHECK(ws.run("frobnicate").exit_code == 1);
    CHECK(ws.run("run").exit_code == 1);
}

TEST_CASE("run writes trajectory, report and plot script") {
    Workspace ws("ptesc_cli_run");
    const auto out = ws.root / "out";
    const auto r = ws.run("run '" + kConfigDir + "/scalar_quadratic.cfg' --out '" + out.string() + "'");
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(out / "trajectory.csv"));
    CHECK(fs::exists(out / "plots.gp"));
    REQUIRE(fs::exists(out / "report.json"));
    const auto j = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(j["status"] == "completed");
    CHECK(j["convergence"]["reduction_ratio"].get<double>() <= 1e-6);
    CHECK(slurp(out / "trajectory.csv").rfind("t,tau,x1,u,y,xi,u_hat,eta,nu_bar\n", 0) == 0);
}

TEST_CASE("stride and mode flags are applied") {
    Workspace ws("ptesc_cli_flags");
    const auto out = ws.root / "out";
    const auto r = ws.run("run '" + kConfigDir + "/scalar_quadratic.cfg' --mode averaged --stride 10 --out '" +
                          out.string() + "'");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(j["scenario"]["mode"] == "averaged");
    CHECK(j["samples"] == 201);
    CHECK(ws.run("run '" + kConfigDir + "/scalar_quadratic.cfg' --mode fast").exit_code == 1);
}

TEST_CASE("bad configuration exits 1 and writes nothing") {
    Workspace ws("ptesc_cli_bad");
    const auto out = ws.root / "out";
    const auto cfg = ws.write("bad.cfg", replace(config_text("scalar_quadratic.cfg"),
                                                 "name: scalar_quadratic", "name: nope"));
    const auto r = ws.run("run '" + cfg.string() + "' --out '" + out.string() + "'");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("unknown plant 'nope'") != std::string::npos);
    CHECK_FALSE(fs::exists(out));

    const auto typo = ws.write("typo.cfg", replace(config_text("scalar_quadratic.cfg"), "omega_l:", "omega1:"));
    const auto t = ws.run("run '" + typo.string() + "' --out '" + out.string() + "'");
    CHECK(t.exit_code == 1);
    CHECK(t.err.find("line") != std::string::npos);
    CHECK(t.err.find("omega1") != std::string::npos);
    CHECK_FALSE(fs::exists(out));

    CHECK(ws.run("run '" + (ws.root / "missing.cfg").string() + "'").exit_code == 1);
}

TEST_CASE("a diverged run exits 2 and keeps its partial outputs") {
    Workspace ws("ptesc_cli_diverged");
    const auto out = ws.root / "out";
    auto text = config_text("general_nonlinear.cfg");
    text = replace(text, "k: 25", "k: 0");
    text = replace(text, "mode: esc", "mode: target");
    const auto cfg = ws.write("open_loop.cfg", text);
    const auto r = ws.run("run '" + cfg.string() + "' --out '" + out.string() + "'");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("DIVERGED") != std::string::npos);
    CHECK(fs::exists(out / "trajectory.csv"));
    const auto j = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(j["status"] == "diverged");
    CHECK(slurp(out / "plots.gp").find("diverged at t = ") != std::string::npos);
}

TEST_CASE("sweep summaries are byte-identical across invocations") {
    Workspace ws("ptesc_cli_sweep");
    const std::string cfg = "'" + kConfigDir + "/scalar_quadratic.cfg'";
    const auto a = ws.run("sweep " + cfg + " --set k=0.5,1,2 --set x0=[3],[-1] --workers 3 --out '" +
                          (ws.root / "a").string() + "'");
    const auto b = ws.run("sweep " + cfg + " --set k=0.5,1,2 --set x0=[3],[-1] --workers 1 --out '" +
                          (ws.root / "b").string() + "'");
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    const auto sa = slurp(ws.root / "a" / "summary.csv");
    CHECK_FALSE(sa.empty());
    CHECK(sa == slurp(ws.root / "b" / "summary.csv"));
    std::size_t rows = 0;
    for (char c : sa) rows += c == '\n';
    CHECK(rows == 7);

    const auto none = ws.run("sweep " + cfg + " --set k=-1,-2 --out '" + (ws.root / "c").string() + "'");
    CHECK(none.exit_code == 1);
    CHECK(ws.run("sweep " + cfg + " --set k=1,2,3 --max-cells 2").exit_code == 1);
}

TEST_CASE("validate prints the assumption report") {
    Workspace ws("ptesc_cli_validate");
    const auto r = ws.run("validate '" + kConfigDir + "/scalar_quadratic.cfg'");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["beta1"].get<double>() == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(j["violation_count"] == 0);
}

TEST_CASE("compare reports differences between two runs") {
    Workspace ws("ptesc_cli_compare");
    const auto a = kConfigDir + "/scalar_quadratic.cfg";
    const auto b = ws.write("b.cfg", replace(config_text("scalar_quadratic.cfg"), "x0: [3]", "x0: [2]"));
    const auto r = ws.run("compare '" + a + "' '" + b.string() + "' --out '" + ws.root.string() + "'");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(ws.root / "compare.json"));
    CHECK(j["sup_error"].get<double>() > 0.0);
    REQUIRE(j["signals"][0]["signal"] == "x1");
    CHECK(j["signals"][0]["sup_error"].get<double>() == doctest::Approx(1.0));
    const auto same = ws.run("compare '" + a + "' '" + a + "'");
    CHECK(same.exit_code == 0);
}
