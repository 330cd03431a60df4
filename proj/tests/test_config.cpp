#include "doctest.h"

#include <string>
#include <vector>

#include "ptesc/config.hpp"
#include "ptesc/errors.hpp"

using namespace ptesc;

namespace {

const std::string kConfigDir = PTESC_CONFIG_DIR;

const char* kMinimal = R"(mode: esc
plant:
  name: general_nonlinear
  x0: [1, 2]
params:
  T: 5
  A: 25
  omega: 150
  omega_h: 2000
  omega_l: 3
  k: 25
  tau_I: 0.5
)";

ConfigError parse_error(const std::string& text, const std::vector<FieldOverride>& overrides = {}) {
    try {
        (void)parse_config(text, "test.cfg", overrides);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected ConfigError");
    return ConfigError("unreachable");
}

}  // namespace

TEST_CASE("bundled general_nonlinear config carries the first example's parameters") {
    const auto c = load_config(kConfigDir + "/general_nonlinear.cfg");
    CHECK(c.mode == Mode::Esc);
    CHECK(c.plant == "general_nonlinear");
    CHECK(c.x0 == std::vector<double>{1.0, 2.0});
    CHECK(c.params.pt.T == 5.0);
    CHECK(c.params.A == 25.0);
    CHECK(c.params.omega == 150.0);
    CHECK(c.params.omega_h == 2000.0);
    CHECK(c.params.omega_l == 3.0);
    CHECK(c.params.k == 25.0);
    CHECK(c.params.tau_I == 0.5);
}

TEST_CASE("bundled bioreactor config carries the second example's parameters") {
    const auto c = load_config(kConfigDir + "/bioreactor.cfg");
    CHECK(c.mode == Mode::Esc);
    CHECK(c.plant == "fed_batch_bioreactor");
    CHECK(c.x0 == std::vector<double>{1.0, 1.0});
    CHECK(c.params.pt.T == 50.0);
    CHECK(c.params.A == 0.5);
    CHECK(c.params.omega == 150.0);
    CHECK(c.params.omega_h == 2000.0);
    CHECK(c.params.omega_l == 3.0);
    CHECK(c.params.k == 2.0);
    CHECK(c.params.tau_I == 0.5);
}

TEST_CASE("bundled scalar_quadratic config is a target run") {
    const auto c = load_config(kConfigDir + "/scalar_quadratic.cfg");
    CHECK(c.mode == Mode::Target);
    CHECK(c.x0 == std::vector<double>{3.0});
    CHECK(c.params.k == 1.0);
    CHECK(c.integrator.rtol == 1e-10);
}

TEST_CASE("defaults fill absent sections") {
    const auto c = parse_config(kMinimal);
    CHECK(c.integrator == IntegratorConfig{});
    CHECK(c.outputs == OutputConfig{});
    CHECK(c.params.pt.stop_fraction == 1e-3);
    CHECK_FALSE(c.params.pt.gain_clamp.has_value());
    CHECK_FALSE(c.box.has_value());
}

TEST_CASE("round trip through to_yaml is exact") {
    for (const char* name : {"general_nonlinear", "bioreactor", "scalar_quadratic"}) {
        CAPTURE(name);
        const auto c = load_config(kConfigDir + "/" + name + ".cfg");
        CHECK(parse_config(to_yaml(c)) == c);
    }
    auto c = parse_config(kMinimal);
    c.params.A = 0.1 + 0.2;
    c.params.pt.gain_clamp = 1e6;
    c.params.u_hat0 = -1.0 / 3.0;
    c.box = StateBox{{-1.5, -2.5}, {1.5, 2.5}};
    c.integrator.method = Method::Rk4;
    c.integrator.record_stride = 3;
    c.outputs.gnuplot = false;
    c.outputs.dir = "some dir/with: colon";
    CHECK(parse_config(to_yaml(c)) == c);
}

TEST_CASE("unknown keys are rejected with their position") {
    const auto e = parse_error(std::string(kMinimal) + "  omega1: 4\n");
    CHECK(e.line() == 12);
    CHECK(e.column() == 2);
    CHECK(std::string(e.what()).find("omega1") != std::string::npos);
    CHECK(std::string(e.what()).find("test.cfg: line 13, column 3") == 0);

    const auto top = parse_error(std::string(kMinimal) + "extra: 1\n");
    CHECK(top.line() == 12);
}

TEST_CASE("dither amplitude is required in esc mode only") {
    std::string text = kMinimal;
    text.replace(text.find("A: 25"), 5, "A: 0");
    const auto e = parse_error(text);
    CHECK(e.detail().find("A must be > 0") != std::string::npos);
    CHECK(e.line() == 6);

    std::string target = text;
    target.replace(0, 9, "mode: target");
    CHECK(parse_config(target).params.A == 0.0);
    CHECK(parse_config(text, "x", {{"mode", "averaged"}}).mode == Mode::Averaged);
}

TEST_CASE("syntax errors carry positions") {
    const auto e = parse_error("mode: esc\nplant: [1, 2\n");
    CHECK(e.line() >= 1);
    CHECK(e.column() >= 0);
}

TEST_CASE("cross-field validation") {
    std::string text = kMinimal;
    text.replace(text.find("general_nonlinear"), 17, "no_such_plant");
    const auto bad_plant = parse_error(text);
    CHECK(bad_plant.detail().find("general_nonlinear") != std::string::npos);

    text = kMinimal;
    text.replace(text.find("[1, 2]"), 6, "[1]");
    CHECK(parse_error(text).detail().find("x0") != std::string::npos);

    text = kMinimal;
    text.replace(text.find("k: 25"), 5, "k: -1");
    CHECK(parse_error(text).line() == 10);

    CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "integrator:\n  method: euler\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "outputs:\n  formats: [pdf]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "mode2: esc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("params:\n  T: abc\n"), ConfigError);
}

TEST_CASE("missing files raise an error") {
    CHECK_THROWS_AS(load_config(kConfigDir + "/does_not_exist.cfg"), Error);
}

TEST_CASE("field names qualify") {
    CHECK(qualify_field("omega") == "params.omega");
    CHECK(qualify_field("params.omega") == "params.omega");
    CHECK(qualify_field("rtol") == "integrator.rtol");
    CHECK(qualify_field("x0") == "plant.x0");
    CHECK(qualify_field("mode") == "mode");
    CHECK_THROWS_AS(qualify_field("omega_x"), ConfigError);
    CHECK_THROWS_AS(qualify_field("params.rtol"), ConfigError);
}

TEST_CASE("overrides replace fields and revalidate once") {
    const auto base = parse_config(kMinimal);
    const auto c = with_overrides(base, {{"omega", "300"}, {"plant.x0", "[0.5, -0.5]"}});
    CHECK(c.params.omega == 300.0);
    CHECK(c.x0 == std::vector<double>{0.5, -0.5});
    CHECK(c.params.A == base.params.A);

    // Switching plant and x0 together is only valid as a pair.
    const auto sq = with_overrides(base, {{"plant", "scalar_quadratic"}, {"x0", "[3]"}});
    CHECK(sq.plant == "scalar_quadratic");
    const auto sq2 = with_overrides(base, {{"x0", "[3]"}, {"plant.name", "scalar_quadratic"}});
    CHECK(sq == sq2);

    CHECK(with_override(base, "mode", "target").mode == Mode::Target);
    CHECK_THROWS_AS(with_override(base, "A", "-1"), ConfigError);
    CHECK_THROWS_AS(with_override(base, "no_such", "1"), ConfigError);
    try {
        (void)with_override(base, "omega", "fast");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == -1);
        CHECK(std::string(e.what()).find("override params.omega=fast") != std::string::npos);
    }
}

TEST_CASE("overrides apply before validation when loading") {
    std::string text = kMinimal;
    text.replace(text.find("A: 25"), 5, "A: 0");
    CHECK_THROWS_AS(parse_config(text), ConfigError);
    CHECK(parse_config(text, "x", {{"mode", "target"}}).mode == Mode::Target);
    CHECK(parse_config(text, "x", {{"A", "1"}}).params.A == 1.0);
}
