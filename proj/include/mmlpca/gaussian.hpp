#pragma once

#include <cmath>

#include <Eigen/Cholesky>

#include "mmlpca/spectrum.hpp"

namespace mmlpca {

/**
 * Covariance of the form B B' + s I with B a K x r loading matrix (columns not
 * necessarily orthogonal) and s > 0. Determinants and traces against another
 * factor covariance reduce to r x r algebra.
 */
template <typename Scalar = double>
struct FactorCovariance {
    Matrix<Scalar> loadings;
    Scalar noise = 1;

    Index dim() const { return loadings.rows(); }
    Index rank() const { return loadings.cols(); }

    Matrix<Scalar> dense() const {
        Matrix<Scalar> out = loadings * loadings.transpose();
        out.diagonal().array() += noise;
        return out;
    }

    Scalar trace() const { return loadings.squaredNorm() + noise * Scalar(dim()); }

    /// log|B B' + s I| = K log s + log|I_r + B'B / s|.
    Scalar log_det() const {
        using std::log;
        Scalar out = Scalar(dim()) * log(noise);
        if (rank() > 0) {
            Matrix<Scalar> inner = loadings.transpose() * loadings / noise;
            inner.diagonal().array() += Scalar(1);
            out += Scalar(2) * Eigen::LLT<Matrix<Scalar>>(inner).matrixLLT().diagonal().array().log().sum();
        }
        return out;
    }

    /// tr(this^{-1} other) via the Woodbury identity.
    Scalar trace_inverse_times(const FactorCovariance& other) const {
        Scalar out = other.trace();
        if (rank() > 0) {
            Matrix<Scalar> capacitance = loadings.transpose() * loadings;
            capacitance.diagonal().array() += noise;
            const Matrix<Scalar> cross = loadings.transpose() * other.loadings;
            const Matrix<Scalar> projected = cross * cross.transpose() +
                                             other.noise * loadings.transpose() * loadings;
            out -= Eigen::LLT<Matrix<Scalar>>(capacitance).solve(projected).trace();
        }
        return out / noise;
    }
};

namespace detail {

template <typename Scalar>
void require_factor_covariance(const FactorCovariance<Scalar>& cov) {
    using std::isfinite;
    if (!(cov.noise > 0) || !isfinite(cov.noise) || !cov.loadings.allFinite()) {
        throw Error(ErrorCode::InvalidParameter, "factor covariance needs finite loadings and noise > 0");
    }
}

}  // namespace detail

/// KL(N(0, p) || N(0, q)) = 1/2 (tr(q^{-1} p) + log|q| - log|p| - K).
template <typename Scalar>
Scalar kl_gaussian(const FactorCovariance<Scalar>& p, const FactorCovariance<Scalar>& q) {
    detail::require_factor_covariance(p);
    detail::require_factor_covariance(q);
    if (p.dim() != q.dim()) {
        throw Error(ErrorCode::InvalidParameter, "covariances have different dimensions");
    }
    return Scalar(0.5) * (q.trace_inverse_times(p) + q.log_det() - p.log_det() - Scalar(p.dim()));
}

/// Dense KL(N(0, p) || N(0, q)); both must be symmetric positive definite.
template <typename Derived0, typename Derived1>
typename Derived0::Scalar kl_gaussian(const Eigen::MatrixBase<Derived0>& p, const Eigen::MatrixBase<Derived1>& q) {
    using Scalar = typename Derived0::Scalar;
    if (p.rows() != p.cols() || q.rows() != q.cols() || p.rows() != q.rows()) {
        throw Error(ErrorCode::InvalidParameter, "covariances must be square with equal size");
    }
    const Eigen::LLT<Matrix<Scalar>> lp(p);
    const Eigen::LLT<Matrix<Scalar>> lq(q);
    if (lp.info() != Eigen::Success || lq.info() != Eigen::Success) {
        throw Error(ErrorCode::InvalidParameter, "covariance is not positive definite");
    }
    const Scalar log_det_p = Scalar(2) * lp.matrixLLT().diagonal().array().log().sum();
    const Scalar log_det_q = Scalar(2) * lq.matrixLLT().diagonal().array().log().sum();
    const Scalar trace = lq.solve(Matrix<Scalar>(p)).trace();
    return Scalar(0.5) * (trace + log_det_q - log_det_p - Scalar(p.rows()));
}

}  // namespace mmlpca
