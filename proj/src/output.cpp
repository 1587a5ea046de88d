#include "etdelay/output.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

namespace etdelay {

namespace {

std::string g6(double v) { return fmt::format("{:.6g}", v); }

std::string matrix_text(const Matrix& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i > 0) out += "; ";
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            if (k > 0) out += ' ';
            out += g6(m(i, k));
        }
    }
    return out;
}

void line(std::string& out, const std::string& key, const std::string& value) {
    out += key;
    out += ": ";
    out += value;
    out += '\n';
}

} // namespace

std::string format_shortest(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

void write_trajectory_csv(std::ostream& os, const SimResult& sim) {
    const Eigen::Index n = sim.states.empty() ? 0 : sim.states.front().size();
    const Eigen::Index m = sim.inputs.empty() ? 0 : sim.inputs.front().size();
    std::string header = "t";
    for (Eigen::Index i = 1; i <= n; ++i) header += ",x" + std::to_string(i);
    header += ",V";
    for (Eigen::Index i = 1; i <= m; ++i) header += ",u" + std::to_string(i);
    os << header << '\n';

    std::string row;
    for (std::size_t s = 0; s < sim.times.size(); ++s) {
        row = format_shortest(sim.times[s]);
        for (Eigen::Index i = 0; i < n; ++i) row += ',' + format_shortest(sim.states[s](i));
        row += ',' + format_shortest(sim.V[s]);
        for (Eigen::Index i = 0; i < m; ++i) row += ',' + format_shortest(sim.inputs[s](i));
        os << row << '\n';
    }
}

void write_events_csv(std::ostream& os, const SimResult& sim) {
    os << "k,t_k,gap_from_previous\n";
    for (std::size_t k = 0; k < sim.events.size(); ++k) {
        os << k << ',' << format_shortest(sim.events[k].t) << ',';
        if (k > 0) os << format_shortest(sim.events[k].t - sim.events[k - 1].t);
        os << '\n';
    }
}

double fit_decay_rate(const SimResult& sim) {
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < sim.times.size(); ++i) {
        if (sim.times[i] <= 0.0 || !(sim.V[i] > 0.0)) continue;
        const double t = sim.times[i];
        const double y = std::log(sim.V[i]);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        ++count;
    }
    if (count < 2) return 0.0;
    const double c = static_cast<double>(count);
    const double denom = c * stt - st * st;
    if (denom == 0.0) return 0.0;
    return -(c * sty - st * sy) / denom;
}

std::string format_report(const std::string& scenario_name, const DesignReport& report,
                          bool include_sim_summary) {
    std::string out;
    out += "[scenario]\n";
    line(out, "name", scenario_name);
    line(out, "mode", report.mode);

    out += "[controller]\n";
    if (report.controller) {
        const ControllerDesign& c = *report.controller;
        line(out, "K", matrix_text(c.K));
        line(out, "P", matrix_text(c.P));
        line(out, "Q", matrix_text(c.Q));
        line(out, "R", matrix_text(c.R));
    } else {
        line(out, "K", "none");
    }
    line(out, "lmi_max_eig", g6(report.lmi_max_eig));
    line(out, "lmi_feasible", report.lmi_feasible ? "true" : "false");

    out += "[parameters]\n";
    line(out, "b", g6(report.synthesis.b));
    line(out, "h", g6(report.synthesis.h));
    line(out, "alpha", g6(report.trigger.alpha));
    line(out, "beta", g6(report.trigger.beta));
    line(out, "sigma", g6(report.trigger.sigma));
    line(out, "baseline_mode", to_string(report.trigger.baseline_mode));
    line(out, "a", g6(report.a));

    out += "[checks]\n";
    for (const auto& c : report.parameter_checks) {
        std::string status = c.pass ? "pass" : "FAIL";
        if (c.informational) status = c.pass ? "yes" : "no";
        line(out, c.name, status + " (" + c.detail + ")");
    }
    line(out, "valid", report.valid ? "true" : "false");

    out += "[rates]\n";
    if (report.rate) {
        line(out, "lambda", g6(report.rate->lambda));
        line(out, "eta", g6(report.rate->eta));
    } else {
        line(out, "lambda", "none");
        line(out, "eta", "none");
    }

    out += "[dwell]\n";
    if (report.dwell) {
        const DwellReport& d = *report.dwell;
        line(out, "delta1", g6(d.delta1));
        line(out, "delta2", g6(d.delta2));
        line(out, "regime", to_string(d.regime));
        if (d.t_tilde) {
            line(out, "t_tilde", g6(*d.t_tilde));
        } else if (d.unbounded) {
            line(out, "t_tilde", "unbounded");
        } else {
            line(out, "t_tilde", "none (Zeno excluded, no uniform bound)");
        }
        line(out, "observed_min_gap", d.observed_min_gap ? g6(*d.observed_min_gap) : "none");
    } else {
        line(out, "regime", "none");
    }

    if (include_sim_summary && report.sim) {
        const SimResult& sim = *report.sim;
        const auto gaps = sim.inter_event_gaps();
        out += "[simulation]\n";
        line(out, "samples", std::to_string(sim.times.size()));
        line(out, "final_time", g6(sim.times.empty() ? 0.0 : sim.times.back()));
        line(out, "events", std::to_string(sim.events.size()));
        if (!gaps.empty()) {
            line(out, "min_gap", g6(*std::min_element(gaps.begin(), gaps.end())));
            line(out, "mean_gap",
                 g6(std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size())));
        } else {
            line(out, "min_gap", "none");
            line(out, "mean_gap", "none");
        }
        line(out, "decay_rate_fit", g6(fit_decay_rate(sim)));
        line(out, "v0_baseline", g6(sim.v0_baseline));
        line(out, "zeno_guard_hit", sim.zeno_guard_hit ? "true" : "false");
        line(out, "aborted", sim.aborted ? "true" : "false");

        out += "[certification]\n";
        if (report.bound_certification) {
            const BoundCertification& c = *report.bound_certification;
            line(out, "baseline", g6(c.baseline));
            line(out, "max_ratio", g6(c.max_ratio));
            line(out, "worst_time", g6(c.worst_time));
            line(out, "verdict", c.pass ? "pass" : "fail");
        } else {
            line(out, "verdict", "not applicable");
        }
    }

    out += "[warnings]\n";
    if (report.warnings.empty()) out += "none\n";
    for (const auto& w : report.warnings) out += "- " + w + "\n";
    return out;
}

} // namespace etdelay
