#pragma once

// Closed-loop simulation of
//
//   x'(t) = A1 x(t) + A2 x(t - tau(t)) + B u(t),   u(t) = K x(t_k) on [t_k, t_{k+1}),
//
// with event times chosen by the exponential-threshold triggering rule.

#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "etdelay/expr.hpp"
#include "etdelay/halanay.hpp"
#include "etdelay/lmi.hpp"
#include "etdelay/trigger.hpp"

namespace etdelay {

enum class Interp { Linear, CubicHermite };

std::string to_string(Interp interp);
Interp interp_from_string(const std::string& text);

struct LinearDelaySystem {
    SystemMatrices matrices;
    ScalarExpr tau;               // in t
    double tau_bar = 0.0;
    std::vector<ScalarExpr> phi;  // one per state coordinate, in s on [-tau_bar, 0]

    /// phi(s) as a vector.
    Vector initial_state(double s) const;

    void validate() const;
};

struct SimConfig {
    double step = 0.01;
    double horizon = 10.0;
    double event_tol = 1e-10;
    int max_events = 10000;  // per unit-length window
    Interp interp = Interp::Linear;

    void validate() const;
    bool operator==(const SimConfig&) const = default;
};

struct EventRecord {
    double t = 0.0;
    Vector u;  // K x(t_k), held until the next event
};

struct SimResult {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<double> V;
    std::vector<Vector> inputs;  // input in effect from each sample onward
    std::vector<EventRecord> events;

    double v0_baseline = 0.0;
    std::vector<TimedSample> history_V;  // V on the baseline grid over [-tau_bar, 0]

    bool zeno_guard_hit = false;
    bool aborted = false;
    std::string diagnostic;

    /// history_V followed by (times, V) for t > 0, ready for certify_bound.
    std::vector<TimedSample> lyapunov_samples() const;

    /// Gaps t_{k+1} - t_k between consecutive events.
    std::vector<double> inter_event_gaps() const;
};

/// Stored solution plus the initial function. Samples older than the
/// retention window are discarded; querying them is an internal error.
class HistoryBuffer {
public:
    using InitialFunction = std::function<Vector(double)>;

    HistoryBuffer(InitialFunction phi, double retention, Interp interp);

    /// Appends a sample; times must be strictly increasing. `dx_left` and
    /// `dx_right` are the one-sided derivatives (they differ at events).
    void push(double t, const Vector& x, const Vector& dx_left, const Vector& dx_right);

    /// phi(t) for t <= 0; the interpolated solution for stored t > 0; a
    /// first-order extrapolation past the last sample (stage lookups inside
    /// the current step when tau(t) is small).
    Vector eval(double t) const;

    double last_time() const;
    std::size_t size() const { return times_.size(); }

private:
    InitialFunction phi_;
    double retention_;
    Interp interp_;
    std::deque<double> times_;
    std::deque<Vector> states_;
    std::deque<Vector> dleft_;
    std::deque<Vector> dright_;
};

/// A1 x + A2 x_delayed + B u.
Vector rhs(const Vector& x, const Vector& x_delayed, const Vector& u_held,
           const SystemMatrices& sys);

/// One classical RK4 step of x' = f(t, x).
template <class F>
Vector rk4_step(F&& f, double t, const Vector& x, double h) {
    const Vector k1 = f(t, x);
    const Vector k2 = f(t + 0.5 * h, x + (0.5 * h) * k1);
    const Vector k3 = f(t + 0.5 * h, x + (0.5 * h) * k2);
    const Vector k4 = f(t + h, x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// V0 grid: ceil(tau_bar / step) + 1 points spanning [-tau_bar, 0].
std::vector<TimedSample> initial_lyapunov_samples(const LinearDelaySystem& sys, const Matrix& P,
                                                  double step);

/// ||V_0||_taubar (max over the grid) or V(0), per mode.
double baseline_value(std::span<const TimedSample> history_V, BaselineMode mode);

SimResult simulate(const LinearDelaySystem& sys, const ControllerDesign& design,
                   const TriggerConfig& cfg, const SimConfig& sim);

} // namespace etdelay
