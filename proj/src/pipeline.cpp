#include "etdelay/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "etdelay/error.hpp"

namespace etdelay {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

ControllerDesign given_controller(const SystemMatrices& sys, const SynthesisParams& sp,
                                  const VerifyMode& given) {
    if (given.P.has_value() == given.Q.has_value()) {
        throw InputError("verify mode needs exactly one of P or Q");
    }
    if (given.K.has_value() == given.R.has_value()) {
        throw InputError("verify mode needs exactly one of K or R");
    }
    const Eigen::Index n = sys.n();
    const Eigen::Index m = sys.m();
    const Matrix& lyap = given.P ? *given.P : *given.Q;
    if (lyap.rows() != n || lyap.cols() != n) {
        throw InputError(std::string(given.P ? "P" : "Q") + " must be " + std::to_string(n) + "x" +
                         std::to_string(n));
    }
    const Matrix& gain = given.K ? *given.K : *given.R;
    if (gain.rows() != m || gain.cols() != n) {
        throw InputError(std::string(given.K ? "K" : "R") + " must be " + std::to_string(m) + "x" +
                         std::to_string(n));
    }
    if (asymmetry(lyap) > 1e-9 * std::max(1.0, lyap.cwiseAbs().maxCoeff())) {
        throw InputError(std::string(given.P ? "P" : "Q") + " must be symmetric");
    }

    ControllerDesign d;
    if (given.P) {
        d.P = symmetrize(*given.P);
        d.Q = symmetrize(spd_inverse(d.P));
    } else {
        d.Q = symmetrize(*given.Q);
        d.P = symmetrize(spd_inverse(d.Q));
    }
    if (given.K) {
        d.K = *given.K;
        d.R = d.K * d.Q;
    } else {
        d.R = *given.R;
        d.K = d.R * d.P;
    }
    d.lmi_max_eig = max_eigenvalue(build_lmi(sys, sp, d.Q, d.R));
    return d;
}

} // namespace

DesignReport design_controller(const LinearDelaySystem& sys, const SynthesisParams& sp,
                               const TriggerParams& trigger, const DesignMode& mode,
                               const std::optional<SimConfig>& sim) {
    sys.validate();
    sp.validate();
    trigger.validate();
    if (sim) sim->validate();

    DesignReport report;
    report.synthesis = sp;
    report.trigger = trigger;
    report.a = sp.b + sp.h - trigger.sigma;

    if (const auto* synth = std::get_if<SynthesizeMode>(&mode)) {
        report.mode = "synthesize";
        report.lmi_margin = synth->options.margin;
        const SynthesisOutcome outcome = synthesize_gain(sys.matrices, sp, synth->options);
        if (outcome.design) {
            report.controller = outcome.design;
        } else {
            report.lmi_max_eig = outcome.best_max_eig;
            report.warnings.push_back("LMI synthesis found no feasible point after " +
                                      std::to_string(outcome.restarts_used) +
                                      " restarts (best lambda_max " + num(outcome.best_max_eig) +
                                      "); this is not a proof of infeasibility");
        }
    } else {
        const auto& given = std::get<VerifyMode>(mode);
        report.mode = "verify";
        report.lmi_margin = given.margin;
        report.controller = given_controller(sys.matrices, sp, given);
    }

    if (report.controller) {
        const Feasibility f = verify_feasible(
            build_lmi(sys.matrices, sp, report.controller->Q, report.controller->R), report.lmi_margin);
        report.lmi_feasible = f.feasible;
        report.lmi_max_eig = f.max_eig;
    }

    const double alpha = trigger.alpha;
    const double sigma = trigger.sigma;
    report.parameter_checks.push_back(
        {"lmi_negative_definite", report.lmi_feasible,
         "lambda_max = " + num(report.lmi_max_eig) + " (required < -" + num(report.lmi_margin) + ")"});
    report.parameter_checks.push_back({"h > alpha + sigma", sp.h > alpha + sigma,
                                       num(sp.h) + " vs " + num(alpha + sigma)});
    report.parameter_checks.push_back({"a > b + alpha", report.a > sp.b + alpha,
                                       "a = b + h - sigma = " + num(report.a) + " vs " +
                                           num(sp.b + alpha)});

    if (report.a > sp.b + alpha) {
        if (sys.tau_bar > 0.0) {
            report.rate = solve_lambda({report.a, sp.b, alpha, trigger.beta, sys.tau_bar});
        } else {
            // Without delay the rate equation is linear in lambda.
            const double lambda = report.a - sp.b - alpha;
            report.rate = HalanayRate{lambda, std::min(lambda, trigger.beta)};
        }
    }

    if (report.rate) {
        report.parameter_checks.push_back({"beta <= lambda", trigger.beta <= report.rate->lambda,
                                           num(trigger.beta) + " vs " + num(report.rate->lambda),
                                           true});
    }

    report.valid = report.controller.has_value() &&
                   std::all_of(report.parameter_checks.begin(), report.parameter_checks.end(),
                               [](const ParameterCheck& c) { return c.pass || c.informational; });

    std::optional<TriggerConfig> cfg;
    if (report.controller) {
        cfg = make_trigger_config(trigger, report.controller->P, report.controller->K, sys.matrices.B);
    }

    if (report.rate && cfg) {
        const double eta = report.rate->eta;
        const DwellConstants dc = dwell_constants(sys.matrices, *cfg, eta, sys.tau_bar);
        const MinDwell md = min_dwell_time(dc, *cfg, eta);
        DwellReport dwell;
        dwell.lambda = report.rate->lambda;
        dwell.eta = eta;
        dwell.delta1 = dc.delta1;
        dwell.delta2 = dc.delta2;
        dwell.t_tilde = md.t_tilde;
        dwell.unbounded = md.unbounded;
        dwell.regime = md.regime;
        report.dwell = dwell;
    }

    if (sim && cfg) {
        if (!report.valid) {
            report.warnings.push_back("simulating although stability hypotheses failed");
        }
        report.sim = simulate(sys, *report.controller, *cfg, *sim);
        if (report.sim->aborted) report.warnings.push_back("simulation aborted: " + report.sim->diagnostic);
        if (report.sim->zeno_guard_hit) {
            report.warnings.push_back("Zeno guard triggered: " + report.sim->diagnostic);
        }
        const auto gaps = report.sim->inter_event_gaps();
        if (report.dwell && !gaps.empty()) {
            report.dwell->observed_min_gap = *std::min_element(gaps.begin(), gaps.end());
        }
        if (report.rate) {
            // Lowering the threshold baseline to V(0) only tightens the trigger,
            // so the envelope is certified against the history supremum either way.
            const auto samples = report.sim->lyapunov_samples();
            report.bound_certification =
                certify_bound(samples, sys.tau_bar, report.rate->eta, BaselineMode::HistorySup);
        }
    }
    return report;
}

} // namespace etdelay
