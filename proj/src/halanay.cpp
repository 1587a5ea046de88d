#include "etdelay/halanay.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "etdelay/ddesim.hpp"
#include "etdelay/error.hpp"

namespace etdelay {

std::string to_string(BaselineMode mode) {
    return mode == BaselineMode::HistorySup ? "history-sup" : "initial-value";
}

BaselineMode baseline_mode_from_string(const std::string& text) {
    if (text == "history-sup") return BaselineMode::HistorySup;
    if (text == "initial-value") return BaselineMode::InitialValue;
    throw InputError("unknown baseline mode '" + text + "' (expected history-sup or initial-value)");
}

void HalanayParams::validate() const {
    for (double v : {a, b, alpha, beta, r}) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ParameterError("Halanay parameters a, b, alpha, beta, r must be positive and finite");
        }
    }
    if (!(a > b + alpha)) {
        std::ostringstream msg;
        msg << "a = " << a << " must exceed b + alpha = " << b + alpha
            << "; the rate equation has no positive root";
        throw ParameterError(msg.str());
    }
}

double rate_residual(const HalanayParams& p, double lambda) {
    return p.b * std::exp(lambda * p.r) + lambda + p.alpha - p.a;
}

HalanayRate solve_lambda(const HalanayParams& p) {
    p.validate();
    // f is strictly increasing with f(0) < 0.
    double lo = 0.0;
    double hi = 1.0;
    while (rate_residual(p, hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw NumericError("solve_lambda: failed to bracket the root");
    }
    const double tol = 1e-12 * std::max(1.0, p.a);
    double best = hi;
    double best_res = std::abs(rate_residual(p, hi));
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f = rate_residual(p, mid);
        if (std::abs(f) < best_res) {
            best = mid;
            best_res = std::abs(f);
        }
        if (f == 0.0) break;
        (f < 0.0 ? lo : hi) = mid;
    }
    if (std::abs(rate_residual(p, lo)) < best_res) {
        best = lo;
        best_res = std::abs(rate_residual(p, lo));
    }
    if (!(best > 0.0) || best_res > tol) {
        std::ostringstream msg;
        msg << "solve_lambda: residual " << best_res << " exceeds tolerance " << tol;
        throw NumericError(msg.str());
    }
    return {best, std::min(best, p.beta)};
}

BoundCertification certify_bound(std::span<const TimedSample> samples, double r, double eta,
                                 BaselineMode mode, double slack) {
    if (!(r >= 0.0)) throw InputError("certify_bound: r must be non-negative");
    if (!(eta >= 0.0)) throw InputError("certify_bound: eta must be non-negative");

    bool have_zero = false;
    double earliest = 0.0;
    double sup = 0.0;
    double at_zero = 0.0;
    for (const auto& s : samples) {
        if (!(s.v >= 0.0) || !std::isfinite(s.v)) {
            throw InputError("certify_bound: samples must be finite and non-negative");
        }
        if (s.t <= 0.0 && s.t >= -r * (1.0 + 1e-12) - 1e-12) {
            sup = std::max(sup, s.v);
            earliest = std::min(earliest, s.t);
            if (s.t == 0.0) {
                have_zero = true;
                at_zero = s.v;
            }
        }
    }
    if (!have_zero) throw InputError("certify_bound: no sample at t = 0");
    if (mode == BaselineMode::HistorySup && earliest > -r + 1e-9 * std::max(1.0, r)) {
        std::ostringstream msg;
        msg << "certify_bound: history samples start at " << earliest << ", need coverage back to "
            << -r;
        throw InputError(msg.str());
    }

    BoundCertification out;
    out.slack = slack;
    out.baseline = mode == BaselineMode::HistorySup ? sup : at_zero;
    for (const auto& s : samples) {
        if (s.t < 0.0) continue;
        ++out.samples_checked;
        double ratio = 0.0;
        if (out.baseline > 0.0) {
            ratio = s.v * std::exp(eta * s.t) / out.baseline;
        } else if (s.v > 0.0) {
            ratio = std::numeric_limits<double>::infinity();
        }
        if (ratio > out.max_ratio) {
            out.max_ratio = ratio;
            out.worst_time = s.t;
        }
    }
    out.pass = out.max_ratio <= 1.0 + slack;
    return out;
}

ComparisonRun integrate_comparison(const HalanayParams& p, double v0, double step,
                                   double horizon) {
    p.validate();
    if (!(v0 > 0.0)) throw InputError("integrate_comparison: v0 must be positive");
    if (!(step > 0.0) || !(horizon > 0.0)) {
        throw InputError("integrate_comparison: step and horizon must be positive");
    }

    ComparisonRun run;
    run.baseline = v0;
    const auto hist_points = static_cast<std::size_t>(std::ceil(p.r / step));
    for (std::size_t j = 0; j < hist_points; ++j) {
        run.samples.push_back({-p.r + p.r * static_cast<double>(j) / static_cast<double>(hist_points), v0});
    }

    const Vector history_value = Vector::Constant(1, v0);
    HistoryBuffer history([history_value](double) { return history_value; }, p.r + 2.0 * step,
                          Interp::Linear);

    // Sliding-window maximum over stored samples, values decreasing front to back.
    std::deque<TimedSample> window;
    auto window_sup = [&](double t, double current) {
        const double left = t - p.r;
        while (!window.empty() && window.front().t < left) window.pop_front();
        double sup = current;
        if (!window.empty()) sup = std::max(sup, window.front().v);
        // Endpoint of the window lies between samples (or in the constant history).
        sup = std::max(sup, history.eval(left)(0));
        return sup;
    };
    auto field = [&](double t, const Vector& v) {
        Vector out(1);
        out(0) = -p.a * v(0) + p.b * window_sup(t, v(0)) + p.alpha * v0 * std::exp(-p.beta * t);
        return out;
    };
    auto store = [&](double t, const Vector& v) {
        const Vector d = field(t, v);
        history.push(t, v, d, d);
        while (!window.empty() && window.back().v <= v(0)) window.pop_back();
        window.push_back({t, v(0)});
        run.samples.push_back({t, v(0)});
    };

    Vector v = history_value;
    store(0.0, v);
    const auto steps = static_cast<long long>(std::ceil(horizon / step));
    for (long long i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * step;
        const double t_next = std::min(static_cast<double>(i + 1) * step, horizon);
        v = rk4_step(field, t, v, t_next - t);
        if (!v.allFinite()) throw NumericError("integrate_comparison: solution became non-finite");
        store(t_next, v);
    }
    return run;
}

} // namespace etdelay
