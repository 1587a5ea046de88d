#include "etdelay/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "etdelay/error.hpp"

namespace etdelay {

Matrix symmetrize(const Matrix& m) { return (m + m.transpose()) * 0.5; }

double asymmetry(const Matrix& m) {
    if (m.rows() != m.cols()) throw InputError("asymmetry: matrix is not square");
    if (m.size() == 0) return 0.0;
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

Vector sym_eigenvalues(const Matrix& m) {
    if (m.rows() != m.cols()) throw InputError("sym_eigenvalues: matrix is not square");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");
    return solver.eigenvalues();
}

double max_eigenvalue(const Matrix& m) {
    const Vector ev = sym_eigenvalues(m);
    if (ev.size() == 0) throw InputError("max_eigenvalue: empty matrix");
    return ev(ev.size() - 1);
}

double min_eigenvalue(const Matrix& m) {
    const Vector ev = sym_eigenvalues(m);
    if (ev.size() == 0) throw InputError("min_eigenvalue: empty matrix");
    return ev(0);
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    const Matrix gram = symmetrize(m.transpose() * m);
    return std::sqrt(std::max(0.0, max_eigenvalue(gram)));
}

Matrix spd_inverse(const Matrix& m) {
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) throw NumericError("matrix is not positive definite");
    return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

bool is_positive_definite(const Matrix& m) {
    if (m.rows() != m.cols() || m.size() == 0) return false;
    Eigen::LLT<Matrix> llt(m);
    return llt.info() == Eigen::Success;
}

} // namespace etdelay
