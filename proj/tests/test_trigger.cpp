#include <cmath>
#include <random>

#include <doctest.h>

#include "etdelay/error.hpp"
#include "etdelay/halanay.hpp"
#include "etdelay/trigger.hpp"
#include "oracles.hpp"

using namespace etdelay;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }

TriggerConfig example1_trigger(double alpha = 0.09, double beta = 0.11) {
    return make_trigger_config({alpha, beta, 0.1, BaselineMode::HistorySup}, m1(1.0), m1(-0.2), m1(1.0));
}

SystemMatrices example1_system() { return {m1(0.0), m1(-0.1), m1(1.0)}; }

double example1_lambda() {
    return oracle::bisect([](double l) { return 0.1 * std::exp(16.0 * l) + l + 0.09 - 0.2; }, 0.0, 1.0);
}

} // namespace

TEST_CASE("trigger value") {
    const TriggerConfig cfg = example1_trigger();
    CHECK(trigger_value(m1(1.0), m1(0.5), cfg) == doctest::Approx(-0.3).epsilon(1e-15));
    CHECK(trigger_value(m1(2.0), m1(0.0), cfg) == doctest::Approx(-0.4));

    const TriggerConfig no_sigma =
        make_trigger_config({0.09, 0.11, 0.0, BaselineMode::HistorySup}, m1(1.0), m1(-0.2), m1(1.0));
    CHECK(trigger_value(m1(3.7), m1(0.0), no_sigma) == 0.0);
    CHECK_THROWS_AS(trigger_value(Vector::Zero(2), m1(0.0), cfg), InputError);
}

TEST_CASE("trigger value is linear in eps and non-positive at eps = 0") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix P(2, 2), K(1, 2), B(2, 1);
    P << 1.5274, 1.4575, 1.4575, 4.1300;
    K << -2.3056, -4.1733;
    B << 1.0, 1.0;
    const TriggerConfig cfg = make_trigger_config({0.1, 1.0, 0.1, BaselineMode::HistorySup}, P, K, B);
    for (int i = 0; i < 100; ++i) {
        const Vector x = Vector::NullaryExpr(2, [&] { return normal(rng); });
        const Vector e1 = Vector::NullaryExpr(2, [&] { return normal(rng); });
        const Vector e2 = Vector::NullaryExpr(2, [&] { return normal(rng); });
        const double c = normal(rng);
        const double at_zero = trigger_value(x, Vector::Zero(2), cfg);
        CHECK(at_zero <= 0.0);
        const double lhs = trigger_value(x, e1 + c * e2, cfg) - at_zero;
        const double rhs = (trigger_value(x, e1, cfg) - at_zero) + c * (trigger_value(x, e2, cfg) - at_zero);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("threshold decays from alpha times the baseline") {
    const TriggerConfig cfg = example1_trigger();
    CHECK(threshold(0.0, 2.5, cfg) == doctest::Approx(0.09 * 2.5));
    CHECK(threshold(10.0, 1.0, cfg) == doctest::Approx(0.09 * std::exp(-1.1)).epsilon(1e-14));
    CHECK(threshold(10.0, 1.0, cfg) == doctest::Approx(0.0299577).epsilon(1e-5));
    double prev = threshold(0.0, 1.0, cfg);
    for (int i = 1; i <= 400; ++i) {
        const double cur = threshold(0.5 * i, 1.0, cfg);
        CHECK(cur > 0.0);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("dwell constants for the scalar example") {
    const double eta = example1_lambda();
    const DwellConstants dc = dwell_constants(example1_system(), example1_trigger(), eta, 16.0);
    const double expected_delta1 = 0.2 * (4.0 / eta) * (0.1 * std::exp(eta * 8.0));
    CHECK(dc.delta1 == doctest::Approx(expected_delta1).epsilon(1e-12));
    CHECK(dc.delta1 == doctest::Approx(21.84417772907281).epsilon(1e-9));
    CHECK(dc.delta2 == doctest::Approx(0.08).epsilon(1e-14));

    const SystemMatrices zero{m1(0.0), m1(0.0), m1(1.0)};
    CHECK(dwell_constants(zero, example1_trigger(), eta, 16.0).delta1 == 0.0);

    const DwellConstants doubled = dwell_constants(example1_system(), example1_trigger(), 2.0 * eta, 16.0);
    const double factor = 0.5 * std::exp(2.0 * eta * 8.0) / std::exp(eta * 8.0);
    CHECK(doubled.delta1 == doctest::Approx(dc.delta1 * factor).epsilon(1e-12));
    CHECK(doubled.delta2 == dc.delta2);

    CHECK_THROWS_AS(dwell_constants(example1_system(), example1_trigger(), 0.0, 16.0), ParameterError);
}

TEST_CASE("minimum dwell time from g2") {
    const double lambda = example1_lambda();
    const DwellConstants dc = dwell_constants(example1_system(), example1_trigger(), lambda, 16.0);

    // The example itself has beta = 0.11 > lambda: no uniform bound.
    const MinDwell actual = min_dwell_time(dc, example1_trigger(), lambda);
    CHECK(actual.regime == DwellRegime::ZenoExcludedOnly);
    CHECK_FALSE(actual.t_tilde.has_value());

    // What-if with beta' = lambda.
    const TriggerConfig what_if = example1_trigger(0.09, lambda);
    const MinDwell md = min_dwell_time(dc, what_if, lambda);
    REQUIRE(md.t_tilde.has_value());
    CHECK(md.regime == DwellRegime::UniformBound);
    const double oracle_root =
        oracle::bisect([&](double T) { return dwell_function(T, dc, 0.09, lambda); }, 0.0, 10.0);
    CHECK(*md.t_tilde == doctest::Approx(oracle_root).epsilon(1e-10));
    CHECK(*md.t_tilde == doctest::Approx(0.7415513258264533).epsilon(1e-8));
    CHECK(std::abs(dwell_function(*md.t_tilde, dc, 0.09, lambda)) <= 1e-12 * 0.09);

    // g2 changes sign exactly once on a fine grid.
    int sign_changes = 0;
    double prev = dwell_function(0.0, dc, 0.09, lambda);
    for (int i = 1; i <= 20000; ++i) {
        const double cur = dwell_function(i * 1e-3, dc, 0.09, lambda);
        if ((cur > 0) != (prev > 0)) ++sign_changes;
        prev = cur;
    }
    CHECK(sign_changes == 1);

    // Larger alpha pushes the root out.
    const MinDwell bigger = min_dwell_time(dc, example1_trigger(0.18, lambda), lambda);
    REQUIRE(bigger.t_tilde.has_value());
    CHECK(*bigger.t_tilde > *md.t_tilde);
}

TEST_CASE("no dynamics means unbounded dwell") {
    const MinDwell md = min_dwell_time({0.0, 0.0}, example1_trigger(0.09, 0.01), 0.01);
    CHECK(md.unbounded);
    CHECK_FALSE(md.t_tilde.has_value());
    CHECK(md.regime == DwellRegime::UniformBound);
}

TEST_CASE("invalid trigger parameters") {
    CHECK_THROWS_AS(make_trigger_config({0.0, 1.0, 0.1, BaselineMode::HistorySup}, m1(1), m1(1), m1(1)),
                    ParameterError);
    CHECK_THROWS_AS(make_trigger_config({0.1, 1.0, -0.1, BaselineMode::HistorySup}, m1(1), m1(1), m1(1)),
                    ParameterError);
    CHECK_THROWS_AS(make_trigger_config({0.1, 1.0, 0.1, BaselineMode::HistorySup}, m1(1), Matrix::Zero(1, 2), m1(1)),
                    InputError);
}
