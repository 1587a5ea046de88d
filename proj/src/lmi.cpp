#include "etdelay/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "etdelay/error.hpp"

namespace etdelay {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

std::string shape(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void check_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
        throw InputError(std::string(name) + " must be " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + shape(m));
    }
}

// Decision vector layout: upper triangle of Q (row-major), then R row-major.
class LmiParametrization {
public:
    LmiParametrization(const SystemMatrices& sys, const SynthesisParams& sp)
        : n_(sys.n()), m_(sys.m()) {
        const Matrix zero_q = Matrix::Zero(n_, n_);
        const Matrix zero_r = Matrix::Zero(m_, n_);
        for (Eigen::Index i = 0; i < n_; ++i) {
            for (Eigen::Index j = i; j < n_; ++j) {
                Matrix e = zero_q;
                e(i, j) = 1.0;
                e(j, i) = 1.0;
                basis_.push_back(build_lmi(sys, sp, e, zero_r));
            }
        }
        for (Eigen::Index i = 0; i < m_; ++i) {
            for (Eigen::Index j = 0; j < n_; ++j) {
                Matrix e = zero_r;
                e(i, j) = 1.0;
                basis_.push_back(build_lmi(sys, sp, zero_q, e));
            }
        }
    }

    std::size_t size() const { return basis_.size(); }
    std::size_t q_size() const { return static_cast<std::size_t>(n_ * (n_ + 1) / 2); }

    Matrix lmi(const Vector& z) const {
        Matrix acc = Matrix::Zero(2 * n_, 2 * n_);
        for (std::size_t k = 0; k < basis_.size(); ++k) acc += z(static_cast<Eigen::Index>(k)) * basis_[k];
        return acc;
    }

    const Matrix& basis(std::size_t k) const { return basis_[k]; }

    Matrix q_of(const Vector& z) const {
        Matrix q(n_, n_);
        Eigen::Index k = 0;
        for (Eigen::Index i = 0; i < n_; ++i) {
            for (Eigen::Index j = i; j < n_; ++j, ++k) {
                q(i, j) = z(k);
                q(j, i) = z(k);
            }
        }
        return q;
    }

    Matrix r_of(const Vector& z) const {
        Matrix r(m_, n_);
        Eigen::Index k = static_cast<Eigen::Index>(q_size());
        for (Eigen::Index i = 0; i < m_; ++i) {
            for (Eigen::Index j = 0; j < n_; ++j, ++k) r(i, j) = z(k);
        }
        return r;
    }

    Vector pack(const Matrix& q, const Matrix& r) const {
        Vector z(static_cast<Eigen::Index>(size()));
        Eigen::Index k = 0;
        for (Eigen::Index i = 0; i < n_; ++i) {
            for (Eigen::Index j = i; j < n_; ++j) z(k++) = q(i, j);
        }
        for (Eigen::Index i = 0; i < m_; ++i) {
            for (Eigen::Index j = 0; j < n_; ++j) z(k++) = r(i, j);
        }
        return z;
    }

private:
    Eigen::Index n_;
    Eigen::Index m_;
    std::vector<Matrix> basis_;
};

// Clamp the spectrum of Q into [q_min, 1]; R is unconstrained.
Vector project(const LmiParametrization& par, const Vector& z, double q_min) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(par.q_of(z));
    Vector ev = es.eigenvalues().cwiseMax(q_min).cwiseMin(1.0);
    const Matrix q = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    return par.pack(symmetrize(q), par.r_of(z));
}

struct Smoothed {
    double value = 0.0;
    double max_eig = 0.0;
    Vector grad;
};

// mu * log(sum exp(lambda_i / mu)): convex, smooth, and within mu*log(2n) of
// lambda_max. Its gradient is the softmax-weighted sum of v_i' D_k v_i.
Smoothed smoothed_max(const LmiParametrization& par, const Vector& z, double mu, bool with_grad) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(par.lmi(z),
                                             with_grad ? Eigen::ComputeEigenvectors
                                                       : Eigen::EigenvaluesOnly);
    const Vector& ev = es.eigenvalues();
    const double top = ev(ev.size() - 1);
    Vector w = ((ev.array() - top) / mu).exp().matrix();
    const double total = w.sum();
    Smoothed out;
    out.max_eig = top;
    out.value = top + mu * std::log(total);
    if (!with_grad) return out;
    w /= total;
    out.grad = Vector::Zero(static_cast<Eigen::Index>(par.size()));
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (w(i) < 1e-14) continue;
        const Vector v = es.eigenvectors().col(i);
        for (std::size_t k = 0; k < par.size(); ++k) {
            out.grad(static_cast<Eigen::Index>(k)) += w(i) * v.dot(par.basis(k) * v);
        }
    }
    return out;
}

Vector random_start(const LmiParametrization& par, Eigen::Index n, Eigen::Index m,
                    std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.1, 1.0);
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = normal(rng);
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    const Matrix orth = qr.householderQ();
    Vector spectrum(n);
    for (Eigen::Index i = 0; i < n; ++i) spectrum(i) = uniform(rng);
    const Matrix q = symmetrize(orth * spectrum.asDiagonal() * orth.transpose());
    Matrix r(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) r(i, j) = 0.5 * normal(rng);
    }
    return par.pack(q, r);
}

} // namespace

void SystemMatrices::validate() const {
    const Eigen::Index dim = A1.rows();
    if (dim == 0) throw InputError("A1 must be non-empty");
    check_shape(A1, dim, dim, "A1");
    check_shape(A2, dim, dim, "A2");
    if (B.rows() != dim || B.cols() == 0) {
        throw InputError("B must have " + std::to_string(dim) + " rows (A1 is " + shape(A1) +
                         "), got " + shape(B));
    }
    if (!all_finite(A1) || !all_finite(A2) || !all_finite(B)) {
        throw InputError("system matrices must have finite entries");
    }
}

void SynthesisParams::validate() const {
    if (!(b > 0.0) || !(h > 0.0) || !std::isfinite(b) || !std::isfinite(h)) {
        throw ParameterError("synthesis parameters b and h must be positive and finite");
    }
}

Matrix build_lmi(const SystemMatrices& sys, const SynthesisParams& sp, const Matrix& Q,
                 const Matrix& R) {
    sys.validate();
    const Eigen::Index n = sys.n();
    const Eigen::Index m = sys.m();
    check_shape(Q, n, n, "Q");
    check_shape(R, m, n, "R");

    Matrix M(2 * n, 2 * n);
    M.topLeftCorner(n, n) = Q * sys.A1.transpose() + sys.A1 * Q + R.transpose() * sys.B.transpose() +
                            sys.B * R + (sp.b + sp.h) * Q;
    M.topRightCorner(n, n) = sys.A2 * Q;
    M.bottomLeftCorner(n, n) = Q * sys.A2.transpose();
    M.bottomRightCorner(n, n) = -sp.b * Q;
    return symmetrize(M);
}

Feasibility verify_feasible(const Matrix& M, double margin) {
    if (M.rows() != M.cols() || M.size() == 0) {
        throw InputError("verify_feasible: matrix must be square and non-empty, got " + shape(M));
    }
    if (!(margin >= 0.0)) throw InputError("verify_feasible: margin must be non-negative");
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if (asymmetry(M) > 1e-9 * scale) throw InputError("verify_feasible: matrix is not symmetric");
    Feasibility out;
    out.max_eig = max_eigenvalue(symmetrize(M));
    out.feasible = out.max_eig < -margin;
    return out;
}

ControllerDesign design_from_qr(const SystemMatrices& sys, const SynthesisParams& sp,
                                const Matrix& Q, const Matrix& R) {
    sys.validate();
    check_shape(Q, sys.n(), sys.n(), "Q");
    check_shape(R, sys.m(), sys.n(), "R");
    const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
    if (asymmetry(Q) > 1e-9 * scale) throw InputError("Q must be symmetric");
    ControllerDesign d;
    d.Q = symmetrize(Q);
    d.R = R;
    d.P = symmetrize(spd_inverse(d.Q));
    d.K = d.R * d.P;
    d.lmi_max_eig = max_eigenvalue(build_lmi(sys, sp, d.Q, d.R));
    return d;
}

ControllerDesign design_from_pk(const SystemMatrices& sys, const SynthesisParams& sp,
                                const Matrix& P, const Matrix& K) {
    sys.validate();
    check_shape(P, sys.n(), sys.n(), "P");
    check_shape(K, sys.m(), sys.n(), "K");
    const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
    if (asymmetry(P) > 1e-9 * scale) throw InputError("P must be symmetric");
    ControllerDesign d;
    d.P = symmetrize(P);
    d.Q = symmetrize(spd_inverse(d.P));
    d.K = K;
    d.R = K * d.Q;
    d.lmi_max_eig = max_eigenvalue(build_lmi(sys, sp, d.Q, d.R));
    return d;
}

SynthesisOutcome synthesize_gain(const SystemMatrices& sys, const SynthesisParams& sp,
                                 const SynthesisOptions& options) {
    sys.validate();
    sp.validate();
    if (!(options.q_min > 0.0) || options.q_min >= 1.0) {
        throw InputError("synthesize_gain: q_min must lie in (0, 1)");
    }
    const LmiParametrization par(sys, sp);
    std::mt19937_64 rng(options.seed);

    SynthesisOutcome outcome;
    outcome.best_max_eig = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < options.restarts; ++restart) {
        outcome.restarts_used = restart + 1;
        Vector z = project(par, random_start(par, sys.n(), sys.m(), rng), options.q_min);
        double mu = 0.1 * std::max(1.0, par.lmi(z).cwiseAbs().maxCoeff());
        double step = 1.0;

        for (int iter = 0; iter < options.max_iterations; ++iter) {
            const Smoothed cur = smoothed_max(par, z, mu, true);
            outcome.best_max_eig = std::min(outcome.best_max_eig, cur.max_eig);
            if (cur.max_eig < -options.margin) {
                outcome.design = design_from_qr(sys, sp, par.q_of(z), par.r_of(z));
                return outcome;
            }

            // Armijo backtracking along the projected gradient path.
            bool accepted = false;
            while (step > 1e-14) {
                const Vector trial = project(par, z - step * cur.grad, options.q_min);
                const double decrease = cur.grad.dot(z - trial);
                const Smoothed next = smoothed_max(par, trial, mu, false);
                if (decrease > 0.0 && next.value <= cur.value - 1e-4 * decrease) {
                    z = trial;
                    step *= 2.0;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                mu *= 0.5;
                step = 1.0;
                if (mu < 1e-12) break;
            }
        }
        outcome.best_max_eig = std::min(outcome.best_max_eig, max_eigenvalue(par.lmi(z)));
    }
    return outcome;
}

} // namespace etdelay
