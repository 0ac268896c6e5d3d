#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "mmlpca/error.hpp"

namespace mmlpca {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Rows are observations, columns are dimensions.
using DataMatrix = Matrix<double>;

/**
 * Sufficient statistics of a centered sample: sample size, dimension and the
 * descending eigen-decomposition of the 1/N sample covariance.
 *
 * Column j of `eigenvectors` belongs to `eigenvalues(j)`. Ties are allowed
 * here; rank-specific code rejects them where a strict ordering is needed.
 */
template <typename Scalar = double>
struct Spectrum {
    Index n_obs = 0;
    Index dim = 0;
    Vector<Scalar> eigenvalues;
    Matrix<Scalar> eigenvectors;

    Scalar trace() const { return eigenvalues.sum(); }

    /// Mean of the eigenvalues from index `first` (0-based) to the end.
    Scalar tail_mean(Index first) const {
        return eigenvalues.tail(dim - first).sum() / static_cast<Scalar>(dim - first);
    }

    template <typename Other>
    Spectrum<Other> cast() const {
        return {n_obs, dim, eigenvalues.template cast<Other>(), eigenvectors.template cast<Other>()};
    }
};

/// Largest identifiable number of latent factors for dimension K:
/// floor(K + (1 - sqrt(8K + 1)) / 2).
inline int max_rank(int dim) {
    if (dim < 2) {
        throw Error(ErrorCode::InvalidParameter, "max_rank requires K >= 2");
    }
    // Largest J with (2(K - J) + 1)^2 >= 8K + 1, evaluated in integers.
    const long long k = dim;
    long long j = static_cast<long long>(std::floor(k + (1.0 - std::sqrt(8.0 * k + 1.0)) / 2.0));
    auto admissible = [k](long long r) {
        const long long lhs = 2 * (k - r) + 1;
        return lhs >= 0 && lhs * lhs >= 8 * k + 1;
    };
    while (j > 0 && !admissible(j)) --j;
    while (admissible(j + 1)) ++j;
    return static_cast<int>(std::max<long long>(j, 0));
}

/// Upper end of the candidate rank set: min(K - 1, max_rank(K)).
inline int candidate_max_rank(int dim) { return std::min(dim - 1, max_rank(dim)); }

namespace detail {

template <typename Derived>
void validate_data(const Eigen::MatrixBase<Derived>& data) {
    if (data.rows() < 2 || data.cols() < 2) {
        throw Error(ErrorCode::InvalidData, "data needs at least 2 rows and 2 columns, got " +
                                                std::to_string(data.rows()) + "x" +
                                                std::to_string(data.cols()));
    }
    if (!data.allFinite()) {
        throw Error(ErrorCode::InvalidData, "data contains non-finite entries");
    }
}

}  // namespace detail

/// Subtracts each column's mean. Row order is preserved.
template <typename Derived>
Matrix<typename Derived::Scalar> center_columns(const Eigen::MatrixBase<Derived>& data) {
    detail::validate_data(data);
    Matrix<typename Derived::Scalar> out = data;
    out.rowwise() -= data.colwise().mean();
    return out;
}

/**
 * (1/N) X'X for centered X. Note the 1/N normalization (not 1/(N-1)); every
 * downstream estimate is defined relative to it.
 */
template <typename Derived>
Matrix<typename Derived::Scalar> sample_covariance(const Eigen::MatrixBase<Derived>& centered) {
    using Scalar = typename Derived::Scalar;
    detail::validate_data(centered);
    Matrix<Scalar> cov = Matrix<Scalar>::Zero(centered.cols(), centered.cols());
    cov.template selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
    cov.template triangularView<Eigen::StrictlyUpper>() = cov.transpose();
    return cov / static_cast<Scalar>(centered.rows());
}

/**
 * Descending eigen-decomposition of a symmetric covariance.
 *
 * Each eigenvector is signed so that its largest-magnitude entry is positive.
 * Eigenvalues within 1e-12 * delta_1 below zero are clamped to zero; anything
 * more negative is a NumericalFailure.
 */
template <typename Derived>
Spectrum<typename Derived::Scalar> eigen_descending(const Eigen::MatrixBase<Derived>& cov, Index n_obs) {
    using Scalar = typename Derived::Scalar;
    if (cov.rows() != cov.cols() || cov.rows() < 1) {
        throw Error(ErrorCode::InvalidData, "covariance must be square");
    }
    if (!cov.allFinite()) {
        throw Error(ErrorCode::InvalidData, "covariance contains non-finite entries");
    }
    const Scalar scale = std::max(cov.cwiseAbs().maxCoeff(), Scalar(1e-300));
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-10) * scale) {
        throw Error(ErrorCode::InvalidData, "covariance is not symmetric");
    }

    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "symmetric eigen-solver did not converge");
    }

    const Index k = cov.rows();
    Spectrum<Scalar> out;
    out.n_obs = n_obs;
    out.dim = k;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();

    const Scalar top = std::max(out.eigenvalues(0), Scalar(0));
    for (Index j = 0; j < k; ++j) {
        Scalar& value = out.eigenvalues(j);
        if (value < 0) {
            if (value < -Scalar(1e-12) * top) {
                throw Error(ErrorCode::NumericalFailure,
                            "covariance has a materially negative eigenvalue");
            }
            value = 0;
        }
        Index arg = 0;
        out.eigenvectors.col(j).cwiseAbs().maxCoeff(&arg);
        if (out.eigenvectors(arg, j) < 0) out.eigenvectors.col(j) *= Scalar(-1);
    }
    return out;
}

/// center -> covariance -> eigen pipeline.
template <typename Derived>
Spectrum<typename Derived::Scalar> spectrum_of(const Eigen::MatrixBase<Derived>& data) {
    const auto centered = center_columns(data);
    return eigen_descending(sample_covariance(centered), data.rows());
}

/**
 * Spectrum from eigenvalues alone, with the identity as eigenbasis. Every
 * criterion depends on the data only through (N, delta), so this is enough for
 * scoring and estimation.
 */
template <typename Scalar>
Spectrum<Scalar> spectrum_from_eigenvalues(const Vector<Scalar>& eigenvalues, Index n_obs) {
    const Index k = eigenvalues.size();
    if (k < 2 || n_obs < 2) {
        throw Error(ErrorCode::InvalidData, "spectrum needs K >= 2 and N >= 2");
    }
    if (!eigenvalues.allFinite() || eigenvalues.minCoeff() < 0) {
        throw Error(ErrorCode::InvalidData, "eigenvalues must be finite and non-negative");
    }
    for (Index j = 1; j < k; ++j) {
        if (eigenvalues(j) > eigenvalues(j - 1)) {
            throw Error(ErrorCode::InvalidData, "eigenvalues must be in descending order");
        }
    }
    return {n_obs, k, eigenvalues, Matrix<Scalar>::Identity(k, k)};
}

}  // namespace mmlpca
