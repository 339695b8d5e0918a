#include "poscon/numerics.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "poscon/error.hpp"

namespace poscon {

void require_finite(const Mat& m, std::string_view what)
{
    if (!m.allFinite()) {
        throw Error(ErrorCode::NonFinite, std::string(what) + " contains NaN or Inf");
    }
}

Mat solve_linear(const Mat& a, const Mat& b)
{
    if (a.rows() != a.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "solve_linear: matrix is not square");
    }
    if (b.rows() != a.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "solve_linear: right-hand side row count");
    }
    require_finite(a, "solve_linear matrix");
    require_finite(b, "solve_linear right-hand side");

    const Eigen::PartialPivLU<Mat> lu(a);
    const Mat& factors = lu.matrixLU();
    for (Eigen::Index k = 0; k < factors.rows(); ++k) {
        if (std::abs(factors(k, k)) < 1e-12) {
            throw Error(ErrorCode::SingularMatrix,
                        "pivot " + std::to_string(k) + " has magnitude below 1e-12");
        }
    }
    return lu.solve(b);
}

LeastSquaresSolution least_squares(const Mat& a, const Mat& b, double rank_tol)
{
    if (b.rows() != a.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "least_squares: right-hand side row count");
    }
    require_finite(a, "least_squares matrix");
    require_finite(b, "least_squares right-hand side");

    LeastSquaresSolution out;
    if (a.cols() == 0) {
        out.solution = Mat::Zero(0, b.cols());
        out.null_space = Mat::Zero(0, 0);
        out.residual = max_abs(b);
        return out;
    }

    const Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec& sv = svd.singularValues();
    const double scale = sv.size() > 0 ? std::max(sv(0), 1.0) : 1.0;

    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv(k) > rank_tol * scale) {
            ++rank;
        }
    }
    out.rank = rank;

    // Minimum-norm solution from the truncated SVD.
    const Mat& u = svd.matrixU();
    const Mat& v = svd.matrixV();
    Mat z = Mat::Zero(a.cols(), b.cols());
    for (Eigen::Index k = 0; k < rank; ++k) {
        z += v.col(k) * (u.col(k).transpose() * b) / sv(k);
    }
    out.solution = z;
    out.null_space = v.rightCols(a.cols() - rank);
    out.residual = max_abs(a * z - b);
    return out;
}

SymmetricEigen sym_eigen(const Mat& s, double symmetry_tol)
{
    if (s.rows() != s.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "sym_eigen: matrix is not square");
    }
    require_finite(s, "sym_eigen matrix");
    const double asym = max_abs(s - s.transpose());
    if (asym > symmetry_tol) {
        throw Error(ErrorCode::NotSymmetric,
                    "sym_eigen: asymmetry " + std::to_string(asym) + " exceeds tolerance");
    }
    const Eigen::SelfAdjointEigenSolver<Mat> solver(symmetric_part(s));
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double max_sym_eigenvalue(const Mat& s)
{
    return sym_eigen(symmetric_part(s)).values.maxCoeff();
}

Mat expm(const Mat& a, double t)
{
    if (a.rows() != a.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "expm: matrix is not square");
    }
    if (!std::isfinite(t)) {
        throw Error(ErrorCode::NonFinite, "expm: time is not finite");
    }
    require_finite(a, "expm matrix");
    const Mat at = a * t;
    Mat result = at.exp();
    if (!result.allFinite()) {
        throw Error(ErrorCode::Overflow, "expm: result exceeds representable magnitude");
    }
    return result;
}

double spectral_norm(const Mat& a)
{
    if (a.size() == 0) {
        return 0.0;
    }
    const Mat gram = a.transpose() * a;
    const double top = sym_eigen(symmetric_part(gram)).values.maxCoeff();
    return std::sqrt(std::max(top, 0.0));
}

Mat kron(const Mat& a, const Mat& b)
{
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Vec vec(const Mat& m)
{
    return Eigen::Map<const Vec>(m.data(), m.size());
}

Mat unvec(const Vec& v, Eigen::Index rows, Eigen::Index cols)
{
    if (v.size() != rows * cols) {
        throw Error(ErrorCode::DimensionMismatch, "unvec: size mismatch");
    }
    return Eigen::Map<const Mat>(v.data(), rows, cols);
}

}  // namespace poscon
