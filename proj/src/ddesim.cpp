#include "etdelay/ddesim.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>

#include "etdelay/error.hpp"

namespace etdelay {

std::string to_string(Interp interp) {
    return interp == Interp::Linear ? "linear" : "cubic-hermite";
}

Interp interp_from_string(const std::string& text) {
    if (text == "linear") return Interp::Linear;
    if (text == "cubic-hermite") return Interp::CubicHermite;
    throw InputError("unknown interpolation '" + text + "' (expected linear or cubic-hermite)");
}

Vector LinearDelaySystem::initial_state(double s) const {
    Vector x(static_cast<Eigen::Index>(phi.size()));
    for (std::size_t i = 0; i < phi.size(); ++i) x(static_cast<Eigen::Index>(i)) = phi[i](s);
    return x;
}

void LinearDelaySystem::validate() const {
    matrices.validate();
    if (!(tau_bar >= 0.0) || !std::isfinite(tau_bar)) {
        throw InputError("tau_bar must be finite and non-negative");
    }
    if (static_cast<Eigen::Index>(phi.size()) != matrices.n()) {
        throw InputError("phi has " + std::to_string(phi.size()) + " components but A1 is " +
                         std::to_string(matrices.n()) + "x" + std::to_string(matrices.n()));
    }
}

void SimConfig::validate() const {
    if (!(step > 0.0) || !std::isfinite(step)) throw InputError("sim step must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InputError("sim horizon must be positive");
    if (!(event_tol > 0.0) || !(event_tol < step)) {
        throw InputError("sim event_tol must be positive and smaller than step");
    }
    if (max_events < 1) throw InputError("sim max_events must be at least 1");
}

std::vector<TimedSample> SimResult::lyapunov_samples() const {
    std::vector<TimedSample> out = history_V;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] > 0.0) out.push_back({times[i], V[i]});
    }
    return out;
}

std::vector<double> SimResult::inter_event_gaps() const {
    std::vector<double> gaps;
    for (std::size_t k = 1; k < events.size(); ++k) gaps.push_back(events[k].t - events[k - 1].t);
    return gaps;
}

HistoryBuffer::HistoryBuffer(InitialFunction phi, double retention, Interp interp)
    : phi_(std::move(phi)), retention_(retention), interp_(interp) {}

void HistoryBuffer::push(double t, const Vector& x, const Vector& dx_left, const Vector& dx_right) {
    if (!times_.empty() && !(t > times_.back())) {
        throw NumericError("history samples must have strictly increasing times");
    }
    times_.push_back(t);
    states_.push_back(x);
    dleft_.push_back(dx_left);
    dright_.push_back(dx_right);
    // Keep one sample at or before the window start for interpolation.
    while (times_.size() >= 3 && times_[1] <= t - retention_) {
        times_.pop_front();
        states_.pop_front();
        dleft_.pop_front();
        dright_.pop_front();
    }
}

double HistoryBuffer::last_time() const {
    if (times_.empty()) throw NumericError("history is empty");
    return times_.back();
}

Vector HistoryBuffer::eval(double t) const {
    if (t <= 0.0 || times_.empty()) return phi_(t);
    if (t < times_.front()) {
        std::ostringstream msg;
        msg << "history query at t=" << t << " precedes retained window starting at "
            << times_.front();
        throw NumericError(msg.str());
    }
    if (t >= times_.back()) {
        if (t == times_.back()) return states_.back();
        return states_.back() + (t - times_.back()) * dright_.back();
    }
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const auto hi = static_cast<std::size_t>(std::distance(times_.begin(), it));
    const std::size_t lo = hi - 1;
    if (times_[lo] == t) return states_[lo];

    const double t0 = times_[lo];
    const double dt = times_[hi] - t0;
    const double s = (t - t0) / dt;
    if (interp_ == Interp::Linear) return states_[lo] + s * (states_[hi] - states_[lo]);

    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * states_[lo] + (h10 * dt) * dright_[lo] + h01 * states_[hi] +
           (h11 * dt) * dleft_[hi];
}

Vector rhs(const Vector& x, const Vector& x_delayed, const Vector& u_held,
           const SystemMatrices& sys) {
    return sys.A1 * x + sys.A2 * x_delayed + sys.B * u_held;
}

namespace {

// A jump discontinuity keeps its size under repeated halving; a continuous
// function's jump shrinks to zero.
void check_phi_continuity(const LinearDelaySystem& sys, const std::vector<double>& grid) {
    if (grid.size() < 2) return;
    double scale = 0.0;
    std::vector<Vector> values;
    values.reserve(grid.size());
    for (double s : grid) {
        values.push_back(sys.initial_state(s));
        if (!values.back().allFinite()) throw InputError("phi is not finite on [-tau_bar, 0]");
        scale = std::max(scale, values.back().cwiseAbs().maxCoeff());
    }
    const double tol = 1e-6 * std::max(scale, 1e-12);
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
        double lo = grid[j];
        double hi = grid[j + 1];
        Vector vlo = values[j];
        Vector vhi = values[j + 1];
        if ((vhi - vlo).cwiseAbs().maxCoeff() <= tol) continue;
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            const Vector vmid = sys.initial_state(mid);
            if ((vmid - vlo).cwiseAbs().maxCoeff() >= (vhi - vmid).cwiseAbs().maxCoeff()) {
                hi = mid;
                vhi = vmid;
            } else {
                lo = mid;
                vlo = vmid;
            }
        }
        if ((vhi - vlo).cwiseAbs().maxCoeff() > tol) {
            std::ostringstream msg;
            msg << "phi is discontinuous near s=" << lo;
            throw InputError(msg.str());
        }
    }
}

std::vector<double> baseline_grid(double tau_bar, double step) {
    if (tau_bar <= 0.0) return {0.0};
    const auto intervals = static_cast<std::size_t>(std::ceil(tau_bar / step));
    std::vector<double> grid(intervals + 1);
    for (std::size_t j = 0; j <= intervals; ++j) {
        grid[j] = -tau_bar + tau_bar * static_cast<double>(j) / static_cast<double>(intervals);
    }
    grid.back() = 0.0;
    return grid;
}

} // namespace

std::vector<TimedSample> initial_lyapunov_samples(const LinearDelaySystem& sys, const Matrix& P,
                                                  double step) {
    std::vector<TimedSample> out;
    for (double s : baseline_grid(sys.tau_bar, step)) {
        const Vector x = sys.initial_state(s);
        out.push_back({s, x.dot(P * x)});
    }
    return out;
}

double baseline_value(std::span<const TimedSample> history_V, BaselineMode mode) {
    if (history_V.empty()) throw InputError("baseline needs at least one history sample");
    if (mode == BaselineMode::InitialValue) return history_V.back().v;
    double best = 0.0;
    for (const auto& s : history_V) best = std::max(best, s.v);
    return best;
}

SimResult simulate(const LinearDelaySystem& sys, const ControllerDesign& design,
                   const TriggerConfig& cfg, const SimConfig& sim) {
    sys.validate();
    sim.validate();
    const SystemMatrices& m = sys.matrices;
    if (design.K.rows() != m.m() || design.K.cols() != m.n() || cfg.P.rows() != m.n() ||
        cfg.PBK.rows() != m.n()) {
        throw InputError("simulate: controller dimensions do not match the system");
    }

    SimResult result;
    const auto grid = baseline_grid(sys.tau_bar, sim.step);
    check_phi_continuity(sys, grid);
    result.history_V = initial_lyapunov_samples(sys, cfg.P, sim.step);
    result.v0_baseline = baseline_value(result.history_V, cfg.params.baseline_mode);
    const double v0 = result.v0_baseline;

    HistoryBuffer history([&sys](double s) { return sys.initial_state(s); },
                          sys.tau_bar + 2.0 * sim.step, sim.interp);

    const double tau_cap = sys.tau_bar * (1.0 + 1e-12) + 1e-15;
    auto delayed = [&](double t) {
        const double tau = sys.tau(t);
        if (!(tau >= 0.0) || tau > tau_cap) {
            std::ostringstream msg;
            msg << "delay bound violated: tau(" << t << ") = " << tau << " outside [0, "
                << sys.tau_bar << "]";
            throw NumericError(msg.str());
        }
        return history.eval(t - tau);
    };

    Vector u;
    auto field = [&](double t, const Vector& x) { return rhs(x, delayed(t), u, m); };
    auto lyap = [&](const Vector& x) { return x.dot(cfg.P * x); };
    auto record = [&](double t, const Vector& x) {
        result.times.push_back(t);
        result.states.push_back(x);
        result.V.push_back(lyap(x));
        result.inputs.push_back(u);
    };

    double t = 0.0;
    Vector x = sys.initial_state(0.0);
    Vector x_sample = x;
    u = design.K * x;
    result.events.push_back({0.0, u});
    {
        const Vector d = field(0.0, x);
        history.push(0.0, x, d, d);
    }
    record(t, x);

    auto gap_to_threshold = [&](double time, const Vector& state) {
        return trigger_value(state, x_sample - state, cfg) - threshold(time, v0, cfg);
    };
    double g_prev = gap_to_threshold(t, x);
    std::deque<double> recent_events{0.0};
    long long grid_index = 0;

    while (t < sim.horizon) {
        grid_index = std::max(grid_index, static_cast<long long>(std::floor(t / sim.step)));
        double t_next = static_cast<double>(grid_index + 1) * sim.step;
        while (t_next - t < 1e-3 * sim.step) t_next = static_cast<double>(++grid_index + 1) * sim.step;
        t_next = std::min(t_next, sim.horizon);
        const double h = t_next - t;

        Vector x_new = rk4_step(field, t, x, h);
        if (!x_new.allFinite()) {
            result.aborted = true;
            std::ostringstream msg;
            msg << "state became non-finite near t=" << t_next;
            result.diagnostic = msg.str();
            return result;
        }
        const double g_new = gap_to_threshold(t_next, x_new);

        if (g_prev < 0.0 && g_new >= 0.0) {
            // Localise on the one-step RK4 map from (t, x).
            double lo = 0.0;
            double hi = h;
            Vector x_hi = x_new;
            while (hi - lo > sim.event_tol) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const Vector x_mid = rk4_step(field, t, x, mid);
                if (gap_to_threshold(t + mid, x_mid) >= 0.0) {
                    hi = mid;
                    x_hi = x_mid;
                } else {
                    lo = mid;
                }
            }
            const double t_event = t + hi;
            const Vector d_left = field(t_event, x_hi);
            u = design.K * x_hi;
            const Vector d_right = field(t_event, x_hi);
            history.push(t_event, x_hi, d_left, d_right);
            result.events.push_back({t_event, u});
            record(t_event, x_hi);
            t = t_event;
            x = x_hi;
            x_sample = x_hi;
            g_prev = gap_to_threshold(t, x);

            recent_events.push_back(t_event);
            while (!recent_events.empty() && recent_events.front() < t_event - 1.0) {
                recent_events.pop_front();
            }
            if (static_cast<long long>(recent_events.size()) > sim.max_events) {
                result.zeno_guard_hit = true;
                std::ostringstream msg;
                msg << "more than " << sim.max_events << " events within one time unit before t="
                    << t_event;
                result.diagnostic = msg.str();
                return result;
            }
            continue;
        }

        const Vector d = field(t_next, x_new);
        history.push(t_next, x_new, d, d);
        record(t_next, x_new);
        t = t_next;
        x = x_new;
        g_prev = g_new;
    }
    return result;
}

} // namespace etdelay
