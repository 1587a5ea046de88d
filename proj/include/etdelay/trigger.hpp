#pragma once

// Event-triggering rule and its dwell-time analysis.
//
// An event fires at the first t > t_k with C(x, eps) >= zeta(t), where
//   C(x, eps) = 2 x' P B K eps - sigma x' P x,   eps = x(t_k) - x(t),
//   zeta(t)   = alpha * V0 * exp(-beta t),
// and V0 is ||V_0||_taubar or V(0) depending on the baseline mode.

#include <optional>
#include <string>

#include "etdelay/halanay.hpp"
#include "etdelay/lmi.hpp"

namespace etdelay {

struct TriggerParams {
    double alpha = 0.0;
    double beta = 0.0;
    double sigma = 0.0;
    BaselineMode baseline_mode = BaselineMode::HistorySup;

    /// alpha > 0, beta > 0, sigma >= 0, all finite.
    void validate() const;
    bool operator==(const TriggerParams&) const = default;
};

struct TriggerConfig {
    TriggerParams params;
    Matrix P;
    Matrix K;
    Matrix B;
    Matrix PBK;  // cached P * B * K

    double alpha() const { return params.alpha; }
    double beta() const { return params.beta; }
    double sigma() const { return params.sigma; }
};

TriggerConfig make_trigger_config(const TriggerParams& params, const Matrix& P, const Matrix& K,
                                  const Matrix& B);

/// C(x, eps) = 2 x' P B K eps - sigma x' P x.
double trigger_value(const Vector& x, const Vector& eps, const TriggerConfig& cfg);

/// zeta(t) = alpha * v0_baseline * exp(-beta t).
double threshold(double t, double v0_baseline, const TriggerConfig& cfg);

struct DwellConstants {
    double delta1 = 0.0;
    double delta2 = 0.0;
};

/// delta1 = (|PBK| / lmin(P)) (4 / eta) (|A1| + |A2| exp(eta taubar / 2)),
/// delta2 = 2 |PBK| |BK| / lmin(P), spectral norms throughout.
DwellConstants dwell_constants(const SystemMatrices& sys, const TriggerConfig& cfg, double eta,
                               double tau_bar);

enum class DwellRegime { UniformBound, ZenoExcludedOnly };

std::string to_string(DwellRegime regime);

struct MinDwell {
    DwellRegime regime = DwellRegime::UniformBound;
    std::optional<double> t_tilde;  // root of g2; absent when unbounded or not applicable
    bool unbounded = false;         // g2 stays positive: no finite root
};

/// g2(T) = alpha exp(-eta T / 2) - delta1 (1 - exp(-eta T / 2)) - delta2 T.
double dwell_function(double T, const DwellConstants& dc, double alpha, double eta);

/// Positive root of g2 when beta <= eta (i.e. eta = beta, the uniform-bound
/// regime). For beta > eta the result carries ZenoExcludedOnly and no value:
/// the theory rules out accumulation but gives no computable uniform bound.
MinDwell min_dwell_time(const DwellConstants& dc, const TriggerConfig& cfg, double eta);

struct DwellReport {
    double lambda = 0.0;
    double eta = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    std::optional<double> t_tilde;
    bool unbounded = false;
    DwellRegime regime = DwellRegime::UniformBound;
    std::optional<double> observed_min_gap;
};

} // namespace etdelay
