// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "etdelay/config.hpp"
#include "etdelay/ddesim.hpp"
#include "etdelay/halanay.hpp"
#include "etdelay/lmi.hpp"
#include "etdelay/output.hpp"
#include "etdelay/pipeline.hpp"
#include "etdelay/scenarios.hpp"
#include "oracles.hpp"

using namespace etdelay;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

DesignReport run_scenario(const ScenarioConfig& cfg, bool with_sim) {
    std::optional<SimConfig> sim;
    if (with_sim) sim = cfg.sim;
    return design_controller(build_system(cfg), cfg.synthesis, cfg.trigger, build_mode(cfg), sim);
}

Outcome gain_reproduction() {
    Outcome o;
    const ScenarioConfig cfg = builtin_scenario("example2-fig2");
    Matrix P(2, 2), R(1, 2);
    P << 1.5274, 1.4575, 1.4575, 4.1300;
    R << -0.8221, -0.7204;
    VerifyMode mode;
    mode.P = P;
    mode.R = R;
    const DesignReport r = design_controller(build_system(cfg), {1.1, 0.21}, cfg.trigger, mode);
    const Matrix& K = r.controller->K;
    o.require(std::abs(K(0, 0) + 2.3056) <= 1e-3 && std::abs(K(0, 1) + 4.1733) <= 1e-3,
              fmt::format("K = [{:.6f}, {:.6f}]", K(0, 0), K(0, 1)));
    o.require(r.lmi_max_eig < 0.0, fmt::format("lambda_max = {:.4g}", r.lmi_max_eig));
    if (o.pass) o.detail = fmt::format("K = [{:.4f}, {:.4f}], lambda_max = {:.4g}", K(0, 0), K(0, 1), r.lmi_max_eig);
    return o;
}

Outcome lmi_synthesis() {
    Outcome o;
    for (const char* name : {"example1", "example2-fig2"}) {
        const ScenarioConfig cfg = builtin_scenario(name);
        const auto start = std::chrono::steady_clock::now();
        const SynthesisOutcome out = synthesize_gain(build_system(cfg).matrices, cfg.synthesis);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!out.design) {
            o.require(false, std::string(name) + ": no feasible point");
            continue;
        }
        const Matrix M = build_lmi(build_system(cfg).matrices, cfg.synthesis, out.design->Q, out.design->R);
        o.require(oracle::negative_definite_by_cholesky(M), std::string(name) + ": oracle rejects LMI");
        o.require(oracle::negative_definite_by_cholesky(-out.design->Q), std::string(name) + ": Q not positive definite");
        o.require(secs < 10.0, fmt::format("{}: {:.2f} s", name, secs));
        if (!o.detail.empty()) o.detail += ", ";
        o.detail += fmt::format("{} lambda_max = {:.3g}", name, out.design->lmi_max_eig);
    }
    return o;
}

Outcome example1_sparsity(const DesignReport& r) {
    Outcome o;
    const auto& ev = r.sim->events;
    o.require(!r.sim->aborted, "simulation aborted");
    o.require(ev.size() >= 2, "no event after t = 0");
    if (ev.size() >= 2) {
        o.require(ev[1].t > 3.0, fmt::format("first event at {:.4f}", ev[1].t));
        if (o.pass) o.detail = fmt::format("first event after 0 at t = {:.4f}", ev[1].t);
    }
    return o;
}

Outcome lyapunov_bound(const std::vector<std::pair<std::string, DesignReport>>& runs) {
    Outcome o;
    for (const auto& [name, r] : runs) {
        const ScenarioConfig cfg = builtin_scenario(name);
        // Independent of the pipeline's own certification: lambda from the oracle root finder.
        const double a = cfg.synthesis.b + cfg.synthesis.h - cfg.trigger.sigma;
        const double lambda = oracle::bisect(
            [&](double l) { return cfg.synthesis.b * std::exp(l * cfg.tau_bar) + l + cfg.trigger.alpha - a; }, 0.0,
            10.0);
        const double eta = std::min(lambda, cfg.trigger.beta);
        double sup0 = 0.0;
        for (const TimedSample& s : r.sim->history_V) sup0 = std::max(sup0, s.v);
        double worst = 0.0;
        for (std::size_t i = 0; i < r.sim->times.size(); ++i) {
            worst = std::max(worst, r.sim->V[i] / (sup0 * std::exp(-eta * r.sim->times[i])));
        }
        o.require(worst <= 1.0 + 1e-6, fmt::format("{}: max ratio {:.8f}", name, worst));
        o.require(r.bound_certification && r.bound_certification->pass, name + ": pipeline certification failed");
        if (!o.detail.empty()) o.detail += ", ";
        o.detail += fmt::format("{} max ratio {:.6f}", name, worst);
    }
    return o;
}

Outcome dwell_bound() {
    Outcome o;
    ScenarioConfig cfg = builtin_scenario("example2-fig2");
    const DesignReport base = run_scenario(cfg, false);
    cfg.trigger.beta = base.rate->lambda / 2.0;
    const DesignReport r = run_scenario(cfg, true);
    o.require(r.dwell && r.dwell->regime == DwellRegime::UniformBound, "regime is not uniform-bound");
    o.require(r.dwell && r.dwell->t_tilde.has_value(), "no T~");
    if (!o.pass) return o;
    const double t_tilde = *r.dwell->t_tilde;
    const auto gaps = r.sim->inter_event_gaps();
    o.require(!gaps.empty(), "no inter-event gaps");
    double min_gap = INFINITY;
    for (double g : gaps) min_gap = std::min(min_gap, g);
    o.require(min_gap >= t_tilde, fmt::format("gap {:.4g} < T~ {:.4g}", min_gap, t_tilde));
    if (o.pass) o.detail = fmt::format("{} gaps, min {:.4g} >= T~ = {:.4g}", gaps.size(), min_gap, t_tilde);
    return o;
}

Outcome halanay_certification() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.05, 1.5);
    int certified = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const double b = u(rng), alpha = u(rng);
        const HalanayParams p{b + alpha + u(rng), b, alpha, u(rng), 4.0 * u(rng)};
        const HalanayRate rate = solve_lambda(p);
        const double residual = std::abs(rate_residual(p, rate.lambda));
        o.require(residual <= 1e-12 * std::max(1.0, p.a), fmt::format("trial {}: residual {:.3g}", trial, residual));

        HalanayParams q = p;
        q.a *= 1.05;
        o.require(solve_lambda(q).lambda > rate.lambda, fmt::format("trial {}: not increasing in a", trial));
        q = p;
        q.b *= 1.05;
        if (q.a > q.b + q.alpha) o.require(solve_lambda(q).lambda < rate.lambda, fmt::format("trial {}: b", trial));
        q = p;
        q.alpha *= 1.05;
        if (q.a > q.b + q.alpha) o.require(solve_lambda(q).lambda < rate.lambda, fmt::format("trial {}: alpha", trial));
        q = p;
        q.r *= 1.05;
        o.require(solve_lambda(q).lambda < rate.lambda, fmt::format("trial {}: r", trial));

        const ComparisonRun run = integrate_comparison(p, 1.0, 0.01, 20.0);
        const BoundCertification c = certify_bound(run.samples, p, rate, BaselineMode::HistorySup);
        o.require(c.pass, fmt::format("trial {}: ratio {:.8f}", trial, c.max_ratio));
        certified += c.pass ? 1 : 0;
    }
    if (o.pass) o.detail = fmt::format("{}/50 comparison trajectories certified", certified);
    return o;
}

Outcome numerics_oracles() {
    Outcome o;
    std::mt19937_64 rng(99);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> dim(1, 8);
    int agree = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = dim(rng);
        Matrix G(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) G(i, j) = normal(rng);
        }
        const Matrix M = symmetrize(G) - 1.5 * std::sqrt(n) * normal(rng) * Matrix::Identity(n, n);
        agree += verify_feasible(M, 0.0).feasible == oracle::negative_definite_by_cholesky(M) ? 1 : 0;
    }
    o.require(agree == 200, fmt::format("verify_feasible agrees on {}/200", agree));

    auto f = [](double, const Vector& x) -> Vector { return -x; };
    auto error_at = [&](double h) {
        Vector x = Vector::Constant(1, 1.0);
        const int steps = static_cast<int>(std::lround(1.0 / h));
        for (int i = 0; i < steps; ++i) x = rk4_step(f, i * h, x, h);
        return std::abs(x(0) - std::exp(-1.0));
    };
    const double e1 = error_at(0.1), e2 = error_at(0.05), e3 = error_at(0.025);
    const double r1 = e1 / e2, r2 = e2 / e3;
    o.require(std::abs(r1 - 16.0) <= 4.0 && std::abs(r2 - 16.0) <= 4.0,
              fmt::format("RK4 ratios {:.3f}, {:.3f}", r1, r2));

    for (Interp interp : {Interp::Linear, Interp::CubicHermite}) {
        HistoryBuffer hb([](double) { return Vector::Zero(2); }, 100.0, interp);
        std::vector<std::pair<double, Vector>> stored;
        for (int i = 0; i <= 50; ++i) {
            Vector x(2), d(2);
            x << normal(rng), normal(rng);
            d << normal(rng), normal(rng);
            if (i == 0) x.setZero();  // x(0) = phi(0)
            const double t = 0.013 * i;
            hb.push(t, x, d, d);
            stored.emplace_back(t, x);
        }
        bool exact = true;
        for (const auto& [t, x] : stored) exact = exact && (hb.eval(t) == x);
        o.require(exact, "interpolation not exact at grid points (" + to_string(interp) + ")");
    }
    if (o.pass) o.detail = fmt::format("200/200 oracle agreement, RK4 ratios {:.2f}, {:.2f}", r1, r2);
    return o;
}

Outcome determinism_io() {
    Outcome o;
    for (const std::string& name : builtin_scenario_names()) {
        const ScenarioConfig cfg = builtin_scenario(name);
        std::string first_traj, first_events;
        for (int rep = 0; rep < 2; ++rep) {
            const DesignReport r = run_scenario(cfg, true);
            std::ostringstream traj, events;
            write_trajectory_csv(traj, *r.sim);
            write_events_csv(events, *r.sim);
            if (rep == 0) {
                first_traj = traj.str();
                first_events = events.str();
            } else {
                o.require(traj.str() == first_traj, name + ": trajectory CSV differs");
                o.require(events.str() == first_events, name + ": events CSV differs");
            }
        }
        const ScenarioConfig back = config_from_json_text(config_to_json_text(cfg));
        o.require(back == cfg, name + ": dump -> load changed the config");
    }
    if (o.pass) o.detail = "CSV bytes identical, config round-trip exact for all builtins";
    return o;
}

} // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* title, const std::function<Outcome()>& body) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        fmt::print("[{}] C{} {} ({:.2f} s): {}\n", o.pass ? "PASS" : "FAIL", id, title, secs, o.detail);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    };

    // Criteria 3 and 4 share the simulation runs.
    std::vector<std::pair<std::string, DesignReport>> runs;
    auto ensure_runs = [&] {
        if (runs.empty()) {
            for (const std::string& name : builtin_scenario_names()) runs.emplace_back(name, run_scenario(builtin_scenario(name), true));
        }
    };

    report(1, "gain reproduction", gain_reproduction);
    report(2, "LMI synthesis", lmi_synthesis);
    report(3, "example 1 event sparsity", [&] {
        ensure_runs();
        return example1_sparsity(runs.front().second);
    });
    report(4, "Lyapunov exponential bound", [&] {
        ensure_runs();
        return lyapunov_bound(runs);
    });
    report(5, "dwell-time bound", dwell_bound);
    report(6, "Halanay certification", halanay_certification);
    report(7, "numerics oracles", numerics_oracles);
    report(8, "determinism and I/O", determinism_io);

    fmt::print("{} of 8 criteria passed\n", 8 - failures);
    return failures == 0 ? 0 : 1;
}
