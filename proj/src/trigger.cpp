#include "etdelay/trigger.hpp"

#include <cmath>

#include "etdelay/error.hpp"

namespace etdelay {

void TriggerParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be positive");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("beta must be positive");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be non-negative");
}

std::string to_string(DwellRegime regime) {
    return regime == DwellRegime::UniformBound ? "uniform-bound" : "zeno-excluded-only";
}

TriggerConfig make_trigger_config(const TriggerParams& params, const Matrix& P, const Matrix& K,
                                  const Matrix& B) {
    params.validate();
    const Eigen::Index n = P.rows();
    if (P.cols() != n || B.rows() != n || K.cols() != n || K.rows() != B.cols()) {
        throw InputError("trigger config: P, B, K shapes are inconsistent");
    }
    TriggerConfig cfg;
    cfg.params = params;
    cfg.P = P;
    cfg.K = K;
    cfg.B = B;
    cfg.PBK = P * B * K;
    return cfg;
}

double trigger_value(const Vector& x, const Vector& eps, const TriggerConfig& cfg) {
    if (x.size() != cfg.P.rows() || eps.size() != cfg.P.rows()) {
        throw InputError("trigger_value: vector dimension does not match P");
    }
    return 2.0 * x.dot(cfg.PBK * eps) - cfg.sigma() * x.dot(cfg.P * x);
}

double threshold(double t, double v0_baseline, const TriggerConfig& cfg) {
    return cfg.alpha() * v0_baseline * std::exp(-cfg.beta() * t);
}

DwellConstants dwell_constants(const SystemMatrices& sys, const TriggerConfig& cfg, double eta,
                               double tau_bar) {
    if (!(eta > 0.0)) throw ParameterError("dwell_constants: eta must be positive");
    if (!(tau_bar >= 0.0)) throw ParameterError("dwell_constants: tau_bar must be non-negative");
    const double pbk = spectral_norm(cfg.PBK);
    const double bk = spectral_norm(cfg.B * cfg.K);
    const double lmin = min_eigenvalue(symmetrize(cfg.P));
    if (!(lmin > 0.0)) throw NumericError("dwell_constants: P is not positive definite");

    DwellConstants dc;
    dc.delta1 = (pbk / lmin) * (4.0 / eta) *
                (spectral_norm(sys.A1) + spectral_norm(sys.A2) * std::exp(eta * tau_bar / 2.0));
    dc.delta2 = 2.0 * pbk * bk / lmin;
    return dc;
}

double dwell_function(double T, const DwellConstants& dc, double alpha, double eta) {
    const double decay = std::exp(-eta * T / 2.0);
    return alpha * decay - dc.delta1 * (1.0 - decay) - dc.delta2 * T;
}

MinDwell min_dwell_time(const DwellConstants& dc, const TriggerConfig& cfg, double eta) {
    if (!(eta > 0.0)) throw ParameterError("min_dwell_time: eta must be positive");
    MinDwell out;
    if (cfg.beta() > eta) {
        out.regime = DwellRegime::ZenoExcludedOnly;
        return out;
    }
    const double alpha = cfg.alpha();
    if (dc.delta1 <= 0.0 && dc.delta2 <= 0.0) {
        // g2 = alpha exp(-eta T / 2) > 0 for every T.
        out.unbounded = true;
        return out;
    }
    auto g2 = [&](double T) { return dwell_function(T, dc, alpha, eta); };

    double lo = 0.0;
    double hi = 1.0;
    int doublings = 0;
    while (g2(hi) > 0.0) {
        if (++doublings > 60) {
            out.unbounded = true;
            return out;
        }
        lo = hi;
        hi *= 2.0;
    }
    const double tol = 1e-12 * alpha;
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        mid = 0.5 * (lo + hi);
        const double g = g2(mid);
        if (std::abs(g) <= tol || mid == lo || mid == hi) break;
        (g > 0.0 ? lo : hi) = mid;
    }
    out.t_tilde = mid;
    return out;
}

} // namespace etdelay
