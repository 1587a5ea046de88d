#include "etdelay/scenarios.hpp"

#include "etdelay/error.hpp"

namespace etdelay {

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> values) {
    Matrix m(static_cast<Eigen::Index>(values.size()),
             static_cast<Eigen::Index>(values.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& row : values) {
        Eigen::Index k = 0;
        for (double v : row) m(i, k++) = v;
        ++i;
    }
    return m;
}

// Scalar system with a long constant delay and a gain fixed in advance.
ScenarioConfig example1() {
    ScenarioConfig cfg;
    cfg.name = "example1";
    cfg.A1 = rows({{0.0}});
    cfg.A2 = rows({{-0.1}});
    cfg.B = rows({{1.0}});
    cfg.tau = "16";
    cfg.tau_bar = 16.0;
    cfg.phi = {"1"};
    cfg.synthesis = {0.1, 0.2};
    cfg.trigger = {0.09, 0.11, 0.1, BaselineMode::HistorySup};
    cfg.controller.mode = "verify";
    cfg.controller.P = rows({{1.0}});
    cfg.controller.K = rows({{-0.2}});
    cfg.sim.step = 0.01;
    cfg.sim.horizon = 40.0;
    cfg.output.dir = "out/example1";
    return cfg;
}

// Unstable open loop with a fast-varying delay; reference P and R.
ScenarioConfig example2(const std::string& name, std::vector<std::string> phi) {
    ScenarioConfig cfg;
    cfg.name = name;
    cfg.A1 = rows({{-1.0, -0.5}, {3.0, 2.5}});
    cfg.A2 = rows({{1.2, 2.0}, {-0.4, -1.2}});
    cfg.B = rows({{1.0}, {1.0}});
    cfg.tau = "2 - sin(t^2)";
    cfg.tau_bar = 3.0;
    cfg.phi = std::move(phi);
    cfg.synthesis = {1.1, 0.21};
    cfg.trigger = {0.1, 1.0, 0.1, BaselineMode::HistorySup};
    cfg.controller.mode = "verify";
    cfg.controller.P = rows({{1.5274, 1.4575}, {1.4575, 4.1300}});
    cfg.controller.R = rows({{-0.8221, -0.7204}});
    cfg.sim.step = 0.01;
    cfg.sim.horizon = 20.0;
    cfg.output.dir = "out/" + name;
    return cfg;
}

} // namespace

std::vector<std::string> builtin_scenario_names() {
    return {"example1", "example2-fig2", "example2-fig3"};
}

ScenarioConfig builtin_scenario(const std::string& name) {
    if (name == "example1") return example1();
    if (name == "example2-fig2") return example2(name, {"0.1", "1"});
    if (name == "example2-fig3") {
        return example2(name, {"-0.15*cos(3*pi*s/2)", "0.12*cos(pi*s)"});
    }
    throw ConfigError("scenario", "unknown built-in scenario '" + name + "'");
}

} // namespace etdelay
