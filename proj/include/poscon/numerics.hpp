#pragma once

// Dense linear-algebra substrate. Matrices in this project are tiny (the
// largest stacked system is a few dozen states), so everything is dense and
// dynamically sized.

#include <string_view>

#include <Eigen/Dense>

namespace poscon {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Throws Error{NonFinite} if any entry is NaN or infinite.
void require_finite(const Mat& m, std::string_view what);

/// Solves A Z = b with partially pivoted LU. Throws SingularMatrix when a pivot
/// magnitude drops below 1e-12.
Mat solve_linear(const Mat& a, const Mat& b);

/// Minimum-norm least-squares solution of A Z = b, together with the rank and
/// an orthonormal basis of the null space of A.
struct LeastSquaresSolution {
    Mat solution;
    Eigen::Index rank = 0;
    Mat null_space;  // columns span ker(A); zero columns when A has full column rank
    double residual = 0.0;  // max-norm of A Z - b
};

LeastSquaresSolution least_squares(const Mat& a, const Mat& b, double rank_tol = 1e-10);

struct SymmetricEigen {
    Vec values;  // ascending
    Mat vectors;  // orthonormal columns, S V = V diag(values)
};

/// Symmetric eigendecomposition. The input must be symmetric to within
/// `symmetry_tol` (max-norm); it is symmetrised before decomposition.
SymmetricEigen sym_eigen(const Mat& s, double symmetry_tol = 1e-9);

/// Largest eigenvalue of the symmetric part (S + S^T)/2.
double max_sym_eigenvalue(const Mat& s);

/// e^{A t} by scaling and squaring with a Pade core. Throws Overflow when the
/// result is not representable.
Mat expm(const Mat& a, double t);

/// Largest singular value, sqrt(lambda_max(A^T A)).
double spectral_norm(const Mat& a);

Mat kron(const Mat& a, const Mat& b);

inline Mat symmetric_part(const Mat& s) { return 0.5 * (s + s.transpose()); }

/// Max-norm; zero for empty matrices.
inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Column-major vectorisation, vec(A X B) = (B^T kron A) vec(X).
Vec vec(const Mat& m);
Mat unvec(const Vec& v, Eigen::Index rows, Eigen::Index cols);

}  // namespace poscon
