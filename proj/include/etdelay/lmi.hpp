#pragma once

// Gain synthesis for x' = A1 x + A2 x(t - tau(t)) + B u through the LMI
//
//   [ Q A1' + A1 Q + R' B' + B R + (b + h) Q    A2 Q ]
//   [ Q A2'                                     -b Q ]  < 0
//
// giving P = Q^-1 and K = R P.

#include <cstdint>
#include <optional>

#include "etdelay/linalg.hpp"

namespace etdelay {

struct SystemMatrices {
    Matrix A1;
    Matrix A2;
    Matrix B;

    Eigen::Index n() const { return A1.rows(); }
    Eigen::Index m() const { return B.cols(); }

    /// Throws InputError on inconsistent shapes or non-finite entries.
    void validate() const;
};

struct SynthesisParams {
    double b = 0.0;
    double h = 0.0;

    void validate() const;
    bool operator==(const SynthesisParams&) const = default;
};

struct ControllerDesign {
    Matrix Q;
    Matrix R;
    Matrix P;
    Matrix K;
    double lmi_max_eig = 0.0;
};

/// Assembles the 2n x 2n LMI block, symmetrised. Linear in (Q, R).
Matrix build_lmi(const SystemMatrices& sys, const SynthesisParams& sp, const Matrix& Q,
                 const Matrix& R);

struct Feasibility {
    bool feasible = false;
    double max_eig = 0.0;
};

inline constexpr double kDefaultLmiMargin = 1e-6;

/// Feasible iff lambda_max(M) < -margin. Throws InputError when M is not
/// symmetric to 1e-9 (scaled by max(1, max|M_ij|)).
Feasibility verify_feasible(const Matrix& M, double margin = 0.0);

struct SynthesisOptions {
    double margin = kDefaultLmiMargin;
    double q_min = 1e-6;
    int restarts = 20;
    int max_iterations = 4000;
    std::uint64_t seed = 0x5eed;

    bool operator==(const SynthesisOptions&) const = default;
};

struct SynthesisOutcome {
    std::optional<ControllerDesign> design;
    double best_max_eig = 0.0;  // best lambda_max seen, with normalisation Q <= I
    int restarts_used = 0;
};

/// Minimises lambda_max(M(Q, R)) over q_min I <= Q <= I and free R by
/// projected descent on a smoothed spectral abscissa, restarting from random
/// points. Stops at the first point with lambda_max < -margin. A missing
/// design is not a proof of infeasibility.
SynthesisOutcome synthesize_gain(const SystemMatrices& sys, const SynthesisParams& sp,
                                 const SynthesisOptions& options = {});

/// Builds a design from a user-supplied Q and R (P and K derived).
ControllerDesign design_from_qr(const SystemMatrices& sys, const SynthesisParams& sp,
                                const Matrix& Q, const Matrix& R);

/// Builds a design from a user-supplied P and gain K, assembling the LMI
/// with Q = P^-1 and R = K Q.
ControllerDesign design_from_pk(const SystemMatrices& sys, const SynthesisParams& sp,
                                const Matrix& P, const Matrix& K);

} // namespace etdelay
