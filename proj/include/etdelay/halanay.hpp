#pragma once

// Halanay-type inequality with an exponentially decaying perturbation:
//
//   D+ v(t) <= -a v(t) + b sup_{[t-r, t]} v + alpha ||v0||_r exp(-beta t)
//
// with a > b + alpha implies v(t) <= ||v0||_r exp(-eta t), eta = min(lambda, beta),
// where lambda is the positive root of a = b exp(lambda r) + lambda + alpha.

#include <span>
#include <string>
#include <vector>

namespace etdelay {

/// Which reference value scales the exponential envelope: the supremum of
/// the initial history, or its value at time zero.
enum class BaselineMode { HistorySup, InitialValue };

std::string to_string(BaselineMode mode);
BaselineMode baseline_mode_from_string(const std::string& text);

struct HalanayParams {
    double a = 0.0;
    double b = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double r = 0.0;

    /// Throws ParameterError unless all fields are positive and a > b + alpha.
    void validate() const;
};

struct HalanayRate {
    double lambda = 0.0;
    double eta = 0.0;
};

/// f(lambda) = b exp(lambda r) + lambda + alpha - a.
double rate_residual(const HalanayParams& p, double lambda);

HalanayRate solve_lambda(const HalanayParams& p);

struct TimedSample {
    double t = 0.0;
    double v = 0.0;
};

struct BoundCertification {
    bool pass = false;
    double baseline = 0.0;   // ||v0||_r or v(0)
    double max_ratio = 0.0;  // max over t >= 0 of v(t) exp(eta t) / baseline
    double worst_time = 0.0;
    double slack = 0.0;
    std::size_t samples_checked = 0;
};

inline constexpr double kDefaultCertifySlack = 1e-9;

/// Checks v(t) <= baseline * exp(-eta t) on every sample with t >= 0, up to
/// the relative slack. History samples (t in [-r, 0]) supply the baseline;
/// the supremum is taken over the supplied grid, so grid spacing bounds its
/// error. Throws InputError when the history does not reach back to -r
/// (history-sup mode) or lacks a t = 0 sample (initial-value mode).
BoundCertification certify_bound(std::span<const TimedSample> samples, double r, double eta,
                                 BaselineMode mode, double slack = kDefaultCertifySlack);

inline BoundCertification certify_bound(std::span<const TimedSample> samples,
                                        const HalanayParams& p, const HalanayRate& rate,
                                        BaselineMode mode,
                                        double slack = kDefaultCertifySlack) {
    return certify_bound(samples, p.r, rate.eta, mode, slack);
}

struct ComparisonRun {
    std::vector<TimedSample> samples;  // history grid on [-r, 0] followed by the solution
    double baseline = 0.0;
};

/// Integrates the equality case
///   v' = -a v + b sup_{[t-r, t]} v + alpha ||v0||_r exp(-beta t)
/// with constant history v0 > 0 using the RK4 delay stepper.
ComparisonRun integrate_comparison(const HalanayParams& p, double v0, double step,
                                   double horizon);

} // namespace etdelay
