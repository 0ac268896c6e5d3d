#pragma once

#include <cmath>
#include <limits>

#include "mmlpca/codelength.hpp"
#include "mmlpca/polynomial.hpp"
#include "mmlpca/selection_report.hpp"

namespace mmlpca {

/**
 * Maximum-likelihood rank-J fit: sigma2 is the mean of the K - J smallest
 * eigenvalues and alpha_j = sqrt(delta_j - sigma2). InvalidRank if delta_J does
 * not exceed sigma2 (the rank-J model has no real solution).
 */
template <typename Scalar>
PcaFit<Scalar> ml_estimate(const Spectrum<Scalar>& spec, int rank) {
    using std::sqrt;
    validate_rank(spec.dim, rank, 0);
    PcaFit<Scalar> fit;
    fit.rank = rank;
    fit.estimator = Estimator::ML;
    fit.sigma2 = spec.tail_mean(rank);
    if (!(fit.sigma2 > 0)) {
        throw Error(ErrorCode::InvalidRank, "residual variance of the rank-" + std::to_string(rank) +
                                                " model is zero");
    }
    if (rank > 0 && !(spec.eigenvalues(rank - 1) > fit.sigma2)) {
        throw Error(ErrorCode::InvalidRank, "delta_J does not exceed the ML residual variance");
    }
    fit.alphas = (spec.eigenvalues.head(rank).array() - fit.sigma2).sqrt();
    fit.basis = spec.eigenvectors.leftCols(rank);
    return fit;
}

/**
 * Minimum-message-length rank-J fit.
 *
 * sigma2 is the stationary point of the concentrated codelength inside
 * (0, delta_J) with the smallest codelength; the interval end is never a
 * candidate. J = 0 gives the isotropic model, whose estimate coincides with ML
 * because the 1/sigma prior and the sigma Fisher term cancel.
 *
 * Throws NoValidRoot when no stationary point lies in the domain.
 */
template <typename Scalar>
PcaFit<Scalar> mml_estimate(const Spectrum<Scalar>& spec, int rank) {
    validate_rank(spec.dim, rank, 0);
    PcaFit<Scalar> fit;
    fit.rank = rank;
    fit.estimator = Estimator::MML;
    fit.basis = spec.eigenvectors.leftCols(rank);

    if (rank == 0) {
        fit.sigma2 = spec.tail_mean(0);
        if (!(fit.sigma2 > 0)) {
            throw Error(ErrorCode::InvalidRank, "residual variance of the isotropic model is zero");
        }
        fit.alphas.resize(0);
        fit.codelength = full_codelength(spec, fit);
        return fit;
    }

    const MmlPolynomial<Scalar> poly = mml_polynomial(spec, rank);
    if (poly.admissible_roots.empty()) {
        throw Error(ErrorCode::NoValidRoot,
                    "no stationary point of the rank-" + std::to_string(rank) + " codelength in (0, delta_J)");
    }
    Scalar best_tau = poly.admissible_roots.front();
    Scalar best_value = std::numeric_limits<Scalar>::infinity();
    for (Scalar tau : poly.admissible_roots) {
        const Scalar value = concentrated_codelength(tau, spec, rank);
        if (value < best_value) {
            best_value = value;
            best_tau = tau;
        }
    }
    fit.sigma2 = best_tau;
    fit.alphas = (spec.eigenvalues.head(rank).array() - best_tau).sqrt();
    fit.codelength = full_codelength(spec, fit);
    return fit;
}

/**
 * MML rank selection over J = 0..min(K-1, max_rank(K)). Candidates without an
 * admissible root or with tied eigenvalues are skipped (they count as +inf);
 * J = 0 always has a codelength, so a fallback always exists.
 */
template <typename Scalar>
SelectionReport select_rank_mml(const Spectrum<Scalar>& spec) {
    SelectionReport report;
    report.criterion = Criterion::MML;
    const int top = candidate_max_rank(static_cast<int>(spec.dim));
    for (int rank = 0; rank <= top; ++rank) {
        try {
            const PcaFit<Scalar> fit = mml_estimate(spec, rank);
            report.scores[rank] = static_cast<double>(fit.codelength->total);
        } catch (const Error& e) {
            report.skipped[rank] = {e.code(), e.what()};
        }
    }
    detail::choose_rank(report);
    return report;
}

}  // namespace mmlpca
