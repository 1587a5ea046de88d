#include <cmath>

#include <doctest.h>

#include "etdelay/ddesim.hpp"
#include "etdelay/error.hpp"
#include "etdelay/lmi.hpp"
#include "etdelay/trigger.hpp"

using namespace etdelay;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }

Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

LinearDelaySystem scalar_system(double a1, double a2, double b, const std::string& tau, double tau_bar,
                                const std::string& phi) {
    return {{m1(a1), m1(a2), m1(b)}, parse_expr(tau, "t"), tau_bar, {parse_expr(phi, "s")}};
}

LinearDelaySystem example1() { return scalar_system(0.0, -0.1, 1.0, "16", 16.0, "1"); }

LinearDelaySystem example2(const std::string& phi1, const std::string& phi2) {
    Matrix A1(2, 2), A2(2, 2), B(2, 1);
    A1 << -2, 0, 0, -0.9;
    A2 << -1, 0, -1, -1;
    B << 1, 1;
    return {{A1, A2, B}, parse_expr("2 - sin(t^2)", "t"), 3.0, {parse_expr(phi1, "s"), parse_expr(phi2, "s")}};
}

ControllerDesign example2_design() {
    Matrix P(2, 2), R(1, 2);
    P << 1.5274, 1.4575, 1.4575, 4.1300;
    R << -0.8221, -0.7204;
    const LinearDelaySystem sys = example2("0.1", "1");
    return design_from_qr(sys.matrices, {1.1, 0.21}, spd_inverse(P), R);
}

SimResult run_example1(double horizon = 40.0) {
    const LinearDelaySystem sys = example1();
    const ControllerDesign d = design_from_pk(sys.matrices, {0.1, 0.2}, m1(1.0), m1(-0.2));
    const TriggerConfig cfg = make_trigger_config({0.09, 0.11, 0.1, BaselineMode::HistorySup}, d.P, d.K,
                                                  sys.matrices.B);
    SimConfig sc;
    sc.horizon = horizon;
    return simulate(sys, d, cfg, sc);
}

} // namespace

TEST_CASE("history buffer evaluation") {
    const LinearDelaySystem sys = example2("0.1", "1");
    HistoryBuffer hb([&](double s) { return sys.initial_state(s); }, 5.0, Interp::Linear);
    const Vector x0 = hb.eval(0.0);
    CHECK(x0(0) == 0.1);
    CHECK(x0(1) == 1.0);
    CHECK(hb.eval(-2.5)(1) == 1.0);

    const Vector zero = Vector::Zero(2);
    hb.push(0.0, v2(0, 0), zero, zero);
    hb.push(1.0, v2(1, 2), zero, zero);
    hb.push(2.0, v2(3, 1), zero, zero);
    CHECK(hb.eval(1.0) == v2(1, 2));
    CHECK(hb.eval(2.0) == v2(3, 1));
    CHECK(hb.eval(0.5)(0) == doctest::Approx(0.5));
    CHECK(hb.eval(1.5)(1) == doctest::Approx(1.5));

    // Push far ahead so early samples fall out of the retention window.
    hb.push(10.0, v2(0, 0), zero, zero);
    hb.push(11.0, v2(0, 0), zero, zero);
    CHECK_THROWS_AS(hb.eval(1.5), NumericError);
    CHECK_THROWS_AS(hb.push(11.0, v2(0, 0), zero, zero), NumericError);
}

TEST_CASE("cubic Hermite reproduces a cubic") {
    auto f = [](double t) { return t * t * t - 2 * t; };
    auto df = [](double t) { return 3 * t * t - 2; };
    HistoryBuffer hb([&](double) { return Vector::Constant(1, f(0)); }, 100.0, Interp::CubicHermite);
    for (int i = 0; i <= 4; ++i) {
        const double t = 0.5 * i;
        hb.push(t, Vector::Constant(1, f(t)), Vector::Constant(1, df(t)), Vector::Constant(1, df(t)));
    }
    for (double t : {0.1, 0.37, 0.9, 1.234, 1.99}) CHECK(hb.eval(t)(0) == doctest::Approx(f(t)).epsilon(1e-12));
}

TEST_CASE("right-hand side") {
    const LinearDelaySystem sys = example1();
    CHECK(rhs(m1(1.0), m1(1.0), m1(-0.2), sys.matrices)(0) == doctest::Approx(-0.3).epsilon(1e-15));
    const LinearDelaySystem sys2 = example2("0.1", "1");
    CHECK(rhs(Vector::Zero(2), Vector::Zero(2), Vector::Zero(1), sys2.matrices).isZero());
}

TEST_CASE("RK4 is fourth order") {
    auto f = [](double, const Vector& x) -> Vector { return -x; };
    auto error_at = [&](double h) {
        Vector x = Vector::Constant(1, 1.0);
        const int n = static_cast<int>(std::lround(1.0 / h));
        for (int i = 0; i < n; ++i) x = rk4_step(f, i * h, x, h);
        return std::abs(x(0) - std::exp(-1.0));
    };
    const double e1 = error_at(0.1), e2 = error_at(0.05), e3 = error_at(0.025);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.25));
    CHECK(e2 / e3 == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("open loop with B = 0 matches the closed form and never triggers") {
    const LinearDelaySystem sys = scalar_system(-1.0, 0.0, 0.0, "1", 1.0, "1");
    const ControllerDesign d = design_from_pk(sys.matrices, {0.1, 0.5}, m1(1.0), m1(0.0));
    const TriggerConfig cfg = make_trigger_config({0.1, 0.05, 0.1, BaselineMode::HistorySup}, d.P, d.K,
                                                  sys.matrices.B);
    SimConfig sc;
    sc.horizon = 5.0;
    const SimResult r = simulate(sys, d, cfg, sc);
    REQUIRE_FALSE(r.aborted);
    CHECK(r.events.size() == 1);  // only the initial sample at t = 0
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        CHECK(r.states[i](0) == doctest::Approx(std::exp(-r.times[i])).epsilon(1e-8));
    }
}

TEST_CASE("example 1 simulation") {
    const SimResult r = run_example1();
    REQUIRE_FALSE(r.aborted);
    REQUIRE(r.events.size() >= 2);
    CHECK(r.events[0].t == 0.0);
    CHECK(r.events[1].t > 3.0);
    CHECK(r.v0_baseline == doctest::Approx(1.0));

    // V = x^T P x with P = 1.
    for (std::size_t i = 0; i < r.times.size(); ++i) CHECK(r.V[i] == doctest::Approx(r.states[i](0) * r.states[i](0)));

    // Held input equals K x(t_k) of the latest event.
    std::size_t k = 0;
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        while (k + 1 < r.events.size() && r.events[k + 1].t <= r.times[i]) ++k;
        CHECK(r.inputs[i](0) == doctest::Approx(r.events[k].u(0)).epsilon(1e-12));
    }
    for (const EventRecord& e : r.events) {
        std::size_t j = 0;
        while (j < r.times.size() && r.times[j] != e.t) ++j;
        REQUIRE(j < r.times.size());
        CHECK(e.u(0) == doctest::Approx(-0.2 * r.states[j](0)).epsilon(1e-12));
    }
}

TEST_CASE("events sit on the threshold crossing") {
    const LinearDelaySystem sys = example2("0.1", "1");
    const ControllerDesign d = example2_design();
    const TriggerConfig cfg = make_trigger_config({0.1, 1.0, 0.1, BaselineMode::HistorySup}, d.P, d.K,
                                                  sys.matrices.B);
    SimConfig sc;
    sc.horizon = 20.0;
    const SimResult r = simulate(sys, d, cfg, sc);
    REQUIRE_FALSE(r.aborted);
    REQUIRE(r.events.size() > 10);
    for (std::size_t k = 1; k < r.events.size(); ++k) {
        const double tk = r.events[k].t;
        std::size_t j = 0;
        while (r.times[j] != tk) ++j;
        const Vector x = r.states[j];
        std::size_t jp = 0;
        while (r.times[jp] != r.events[k - 1].t) ++jp;
        const Vector e = r.states[jp] - x;  // x(t_{k-1}) - x(t_k)
        const double g = trigger_value(x, e, cfg) - threshold(tk, r.v0_baseline, cfg);
        CHECK(std::abs(g) <= 1e-6 * (1.0 + threshold(tk, r.v0_baseline, cfg)));
    }
}

TEST_CASE("simulation is deterministic") {
    const SimResult a = run_example1(20.0);
    const SimResult b = run_example1(20.0);
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        CHECK(a.times[i] == b.times[i]);
        CHECK(a.states[i] == b.states[i]);
    }
}

TEST_CASE("delay above its bound is an error") {
    const LinearDelaySystem sys = scalar_system(0.0, -0.1, 1.0, "5", 3.0, "1");
    const ControllerDesign d = design_from_pk(sys.matrices, {0.1, 0.2}, m1(1.0), m1(-0.2));
    const TriggerConfig cfg = make_trigger_config({0.09, 0.11, 0.1, BaselineMode::HistorySup}, d.P, d.K,
                                                  sys.matrices.B);
    CHECK_THROWS_AS(simulate(sys, d, cfg, SimConfig{}), NumericError);
}

TEST_CASE("Zeno guard stops dense triggering") {
    const LinearDelaySystem sys = example2("0.1", "1");
    const ControllerDesign d = example2_design();
    const TriggerConfig cfg = make_trigger_config({0.1, 1.0, 0.1, BaselineMode::HistorySup}, d.P, d.K,
                                                  sys.matrices.B);
    SimConfig sc;
    sc.horizon = 20.0;
    sc.max_events = 2;
    const SimResult r = simulate(sys, d, cfg, sc);
    CHECK(r.zeno_guard_hit);
    CHECK(r.diagnostic.find("events within one time unit") != std::string::npos);
}

TEST_CASE("baseline modes") {
    const LinearDelaySystem sys = example2("-0.15*cos(3*pi*s/2)", "0.12*cos(pi*s)");
    const auto samples = initial_lyapunov_samples(sys, example2_design().P, 0.01);
    CHECK(samples.size() == 301);
    CHECK(samples.front().t == doctest::Approx(-3.0));
    CHECK(samples.back().t == 0.0);
    const double sup = baseline_value(samples, BaselineMode::HistorySup);
    const double at0 = baseline_value(samples, BaselineMode::InitialValue);
    CHECK(sup >= at0);
    CHECK(at0 == doctest::Approx(samples.back().v));
}
