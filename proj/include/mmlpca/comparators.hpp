#pragma once

#include <cmath>
#include <numbers>

#include "mmlpca/codelength.hpp"
#include "mmlpca/estimators.hpp"
#include "mmlpca/selection_report.hpp"

namespace mmlpca {

/**
 * BIC in nats: negative log-likelihood at the ML fit plus (P/2) log N, with
 * P = D + J + 1 (the same count the codelength uses).
 */
template <typename Scalar>
Scalar bic_score(const Spectrum<Scalar>& spec, int rank) {
    using std::log;
    const PcaFit<Scalar> fit = ml_estimate(spec, rank);
    const ParameterCount count = parameter_count(spec.dim, rank);
    return negative_log_likelihood(spec, fit.alphas, fit.sigma2) +
           Scalar(count.total) / Scalar(2) * log(Scalar(spec.n_obs));
}

/**
 * Negated Laplace approximation to log p(data | J) for probabilistic PCA
 * (Minka, "Automatic choice of dimensionality for PCA", NIPS 2000):
 *
 *   p(D|J) ~ p(U) prod_{j<=J} lambda_j^{-N/2} sigma2^{-N(K-J)/2} (2pi)^{(m+J)/2} |A_Z|^{-1/2} N^{-J/2}
 *
 *   p(U)  = 2^{-J} prod_{i=1..J} Gamma((K-i+1)/2) pi^{-(K-i+1)/2}   (inverse Stiefel volume)
 *   m     = KJ - J(J+1)/2
 *   |A_Z| = prod_{i<=J} prod_{j=i+1..K} N (1/lhat_j - 1/lhat_i)(lambda_i - lambda_j)
 *
 * where lhat_j = lambda_j for j <= J and sigma2 (the ML residual variance)
 * otherwise. The data terms are written as the full ML negative log-likelihood,
 * i.e. the (2pi e)^{-NK/2} factor dropped in the reference is kept so the score
 * sits on the same scale as BIC.
 */
template <typename Scalar>
Scalar laplace_evidence(const Spectrum<Scalar>& spec, int rank) {
    using std::lgamma;
    using std::log;
    if (rank < 1) {
        throw Error(ErrorCode::InvalidRank, "Laplace evidence is defined for J >= 1");
    }
    const PcaFit<Scalar> fit = ml_estimate(spec, rank);
    const Index dim = spec.dim;
    const auto& delta = spec.eigenvalues;
    const Scalar tol = Scalar(1e-9) * delta(0);
    for (Index j = 1; j < rank; ++j) {
        if (delta(j - 1) - delta(j) < tol) {
            throw Error(ErrorCode::DegenerateSpectrum, "retained eigenvalues are tied within tolerance");
        }
    }
    if (delta(rank - 1) - fit.sigma2 < tol || delta(rank - 1) - delta(rank) < tol) {
        throw Error(ErrorCode::DegenerateSpectrum, "delta_J is tied with the residual spectrum");
    }

    const Scalar n = Scalar(spec.n_obs);
    const Scalar k = Scalar(dim);
    const Scalar j = Scalar(rank);
    const Scalar pi = std::numbers::pi_v<Scalar>;

    Scalar log_p_u = -j * log(Scalar(2));
    for (int i = 1; i <= rank; ++i) {
        const Scalar half = (k - Scalar(i) + 1) / Scalar(2);
        log_p_u += lgamma(half) - half * log(pi);
    }

    Vector<Scalar> lhat = Vector<Scalar>::Constant(dim, fit.sigma2);
    lhat.head(rank) = delta.head(rank);
    Scalar log_hessian = 0;
    for (Index a = 0; a < rank; ++a) {
        for (Index b = a + 1; b < dim; ++b) {
            log_hessian += log(n) + log((Scalar(1) / lhat(b) - Scalar(1) / lhat(a)) * (delta(a) - delta(b)));
        }
    }

    const Scalar m = k * j - j * (j + 1) / Scalar(2);
    const Scalar log_evidence = -negative_log_likelihood(spec, fit.alphas, fit.sigma2) + log_p_u +
                                (m + j) / Scalar(2) * log(Scalar(2) * pi) - log_hessian / Scalar(2) -
                                j / Scalar(2) * log(n);
    return -log_evidence;
}

/// Fit used when a criterion picks `rank`: MML estimates for MML, ML otherwise.
template <typename Scalar>
PcaFit<Scalar> fit_for_criterion(const Spectrum<Scalar>& spec, Criterion criterion, int rank) {
    return criterion == Criterion::MML ? mml_estimate(spec, rank) : ml_estimate(spec, rank);
}

/// Scores every candidate J = 0..min(K-1, max_rank(K)) and picks the smallest.
template <typename Scalar>
SelectionReport select_rank(const Spectrum<Scalar>& spec, Criterion criterion) {
    if (criterion == Criterion::MML) return select_rank_mml(spec);

    SelectionReport report;
    report.criterion = criterion;
    const int top = candidate_max_rank(static_cast<int>(spec.dim));
    for (int rank = 0; rank <= top; ++rank) {
        try {
            const Scalar score = (criterion == Criterion::Laplace && rank > 0) ? laplace_evidence(spec, rank)
                                                                                : bic_score(spec, rank);
            report.scores[rank] = static_cast<double>(score);
        } catch (const Error& e) {
            report.skipped[rank] = {e.code(), e.what()};
        }
    }
    detail::choose_rank(report);
    return report;
}

}  // namespace mmlpca
