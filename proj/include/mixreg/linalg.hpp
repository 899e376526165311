#pragma once

#include <Eigen/Dense>

namespace mixreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigenvalues below this are treated as zero when inverting square roots.
inline constexpr double kMinEigenvalue = 1e-10;

/// Symmetric PSD square root by eigendecomposition; small negative
/// eigenvalues from rounding are clamped to zero.
Matrix sym_sqrt(const Matrix& m);

/// Inverse of the symmetric square root. Throws DegenerateDesign when an
/// eigenvalue falls below kMinEigenvalue.
Matrix sym_inv_sqrt(const Matrix& m);

double min_eigenvalue(const Matrix& sym);
double max_eigenvalue(const Matrix& sym);

/// Operator (spectral) norm of a symmetric PSD matrix.
inline double op_norm_psd(const Matrix& m) { return max_eigenvalue(m); }

/// Largest eigenvalue modulus of a general square matrix.
double spectral_radius(const Matrix& m);

/// Column-stacking vectorization.
Vector vec(const Matrix& m);

/// (M + M^T) / 2
inline Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Integer matrix power by repeated squaring.
Matrix matrix_power(const Matrix& m, std::size_t k);

}  // namespace mixreg
