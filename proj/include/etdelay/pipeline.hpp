#pragma once

// End-to-end design procedure: prescribe (b, h), obtain (Q, R) from the LMI
// (or verify a given controller), pick (alpha, sigma) with alpha + sigma < h,
// then derive rates, dwell bounds, and optionally simulate and certify.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "etdelay/ddesim.hpp"
#include "etdelay/halanay.hpp"
#include "etdelay/lmi.hpp"
#include "etdelay/trigger.hpp"

namespace etdelay {

struct SynthesizeMode {
    SynthesisOptions options;
};

/// A user-supplied controller. Exactly one of P / Q and one of K / R must be
/// set; the missing pair members are derived (P = Q^-1, K = R P, R = K Q).
struct VerifyMode {
    std::optional<Matrix> P;
    std::optional<Matrix> Q;
    std::optional<Matrix> K;
    std::optional<Matrix> R;
    double margin = kDefaultLmiMargin;
};

using DesignMode = std::variant<SynthesizeMode, VerifyMode>;

struct ParameterCheck {
    std::string name;
    bool pass = false;
    std::string detail;
    bool informational = false;  // reported, but does not affect validity
};

struct DesignReport {
    std::string mode;  // "synthesize" or "verify"
    std::optional<ControllerDesign> controller;
    bool lmi_feasible = false;
    double lmi_max_eig = 0.0;
    double lmi_margin = kDefaultLmiMargin;

    SynthesisParams synthesis;
    TriggerParams trigger;
    double a = 0.0;  // b + h - sigma
    std::optional<HalanayRate> rate;
    std::optional<DwellReport> dwell;

    std::vector<ParameterCheck> parameter_checks;
    bool valid = false;
    std::vector<std::string> warnings;

    std::optional<SimResult> sim;
    std::optional<BoundCertification> bound_certification;
};

DesignReport design_controller(const LinearDelaySystem& sys, const SynthesisParams& sp,
                               const TriggerParams& trigger, const DesignMode& mode,
                               const std::optional<SimConfig>& sim = std::nullopt);

} // namespace etdelay
