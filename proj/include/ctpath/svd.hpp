#ifndef CTPATH_SVD_HPP
#define CTPATH_SVD_HPP

#include "ctpath/common.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace ctpath {

struct SvdOptions {
    Index oversample = 10;
    int max_iter = 1000;
    /// Largest ||A v_i - s_i u_i|| / s_1 accepted over the kept triplets.
    double tol = 1e-10;
    std::uint64_t seed = 0x5eedULL;
};

template <typename Scalar>
struct TruncatedSvd {
    Matrix<Scalar> u;
    Vector<Scalar> singular_values;
    Matrix<Scalar> v;
    int iterations = 0;
    double residual = 0.0;
};

namespace detail {

template <typename Scalar>
Matrix<Scalar> orthonormal_basis(const Matrix<Scalar>& m)
{
    Eigen::HouseholderQR<Matrix<Scalar>> qr(m);
    return qr.householderQ() * Matrix<Scalar>::Identity(m.rows(), m.cols());
}

// Fixes the sign of each singular pair so the largest |u| entry is positive.
template <typename Scalar>
void canonicalize_signs(Matrix<Scalar>& u, Matrix<Scalar>& v)
{
    for (Index j = 0; j < u.cols(); ++j) {
        Index arg = 0;
        u.col(j).cwiseAbs().maxCoeff(&arg);
        if (u(arg, j) < Scalar(0)) {
            u.col(j) = -u.col(j);
            v.col(j) = -v.col(j);
        }
    }
}

}  // namespace detail

/// Rank-`rank` singular triplets of `a` (dense or sparse) by randomized
/// block subspace iteration with Rayleigh-Ritz extraction. Throws
/// ConvergenceError with the final residual if `opt.tol` is not reached.
template <typename MatrixType>
TruncatedSvd<typename MatrixType::Scalar> truncated_svd(const MatrixType& a, Index rank,
                                                        const SvdOptions& opt = {})
{
    using Scalar = typename MatrixType::Scalar;
    const Index m = a.rows();
    const Index n = a.cols();
    const Index full = std::min(m, n);
    if (rank < 1 || rank > full)
        throw Error("truncated_svd: rank " + std::to_string(rank) + " outside [1, " + std::to_string(full) + "]");

    const Index width = std::min(full, rank + std::max<Index>(opt.oversample, 0));
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss;
    Matrix<Scalar> omega(n, width);
    for (Index j = 0; j < width; ++j)
        for (Index i = 0; i < n; ++i) omega(i, j) = static_cast<Scalar>(gauss(rng));

    Matrix<Scalar> q = detail::orthonormal_basis<Scalar>(a * omega);
    TruncatedSvd<Scalar> out;
    std::vector<double> trace;
    for (int it = 1; it <= opt.max_iter; ++it) {
        Matrix<Scalar> z = detail::orthonormal_basis<Scalar>(a.transpose() * q);
        q = detail::orthonormal_basis<Scalar>(a * z);

        Matrix<Scalar> b = (a.transpose() * q).transpose();
        Eigen::JacobiSVD<Matrix<Scalar>> small(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.u = q * small.matrixU().leftCols(rank);
        out.v = small.matrixV().leftCols(rank);
        out.singular_values = small.singularValues().head(rank);
        out.iterations = it;

        const Scalar top = out.singular_values(0);
        double worst = 0.0;
        if (top > Scalar(0)) {
            Matrix<Scalar> r = a * out.v - out.u * out.singular_values.asDiagonal();
            worst = static_cast<double>(r.colwise().norm().maxCoeff() / top);
        }
        out.residual = worst;
        trace.push_back(worst);
        // A subspace spanning the full column space is exact.
        if (worst <= opt.tol || width == full) {
            detail::canonicalize_signs(out.u, out.v);
            return out;
        }
    }
    throw ConvergenceError("truncated_svd did not converge after " + std::to_string(opt.max_iter) +
                               " iterations (residual " + std::to_string(out.residual) + ")",
                           out.residual, std::move(trace));
}

/// Frobenius distance between `a` and its rank-k reconstruction.
template <typename MatrixType, typename Scalar>
double reconstruction_error(const MatrixType& a, const TruncatedSvd<Scalar>& svd)
{
    Matrix<Scalar> dense = a;
    Matrix<Scalar> approx = svd.u * svd.singular_values.asDiagonal() * svd.v.transpose();
    return static_cast<double>((dense - approx).norm());
}

}  // namespace ctpath

#endif  // CTPATH_SVD_HPP
