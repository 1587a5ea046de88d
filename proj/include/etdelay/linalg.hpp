#pragma once

// Dense symmetric kernels shared by the LMI, trigger and simulation code.
// Everything routes through one symmetric eigensolver.

#include <Eigen/Dense>

namespace etdelay {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// (M + M^T) / 2.
Matrix symmetrize(const Matrix& m);

/// Largest absolute entry of M - M^T.
double asymmetry(const Matrix& m);

/// Ascending eigenvalues of a symmetric matrix.
Vector sym_eigenvalues(const Matrix& m);

double max_eigenvalue(const Matrix& m);
double min_eigenvalue(const Matrix& m);

/// Largest singular value, computed as sqrt(lambda_max(M^T M)).
double spectral_norm(const Matrix& m);

/// Inverse of a symmetric positive definite matrix via Cholesky.
/// Throws NumericError when the factorization fails.
Matrix spd_inverse(const Matrix& m);

/// True when the Cholesky factorization of a symmetric matrix succeeds.
bool is_positive_definite(const Matrix& m);

} // namespace etdelay
