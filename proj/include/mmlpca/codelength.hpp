#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>

#include "mmlpca/gaussian.hpp"
#include "mmlpca/polynomial.hpp"
#include "mmlpca/special_functions.hpp"
#include "mmlpca/spectrum.hpp"

namespace mmlpca {

enum class Estimator { ML, MML };

constexpr std::string_view to_string(Estimator e) { return e == Estimator::ML ? "ml" : "mml"; }

/// D orientation angles and P = D + J + 1 free parameters of a rank-J model.
struct ParameterCount {
    int angles = 0;
    int total = 1;
};

inline ParameterCount parameter_count(Index dim, int rank) {
    const int angles = rank * static_cast<int>(dim) - rank * (rank + 1) / 2;
    return {angles, angles + rank + 1};
}

/**
 * Two-part message length in nats, split by origin. The sigma prior's
 * normalizing constant is omitted (it is common to every rank), so totals are
 * comparable across ranks but defined up to that shared constant.
 */
template <typename Scalar = double>
struct CodelengthBreakdown {
    Scalar neg_log_likelihood = 0;
    Scalar neg_log_prior = 0;
    Scalar half_log_fisher = 0;
    Scalar quantization = 0;
    Scalar total = 0;
    int parameters = 1;
    int angles = 0;
};

/**
 * A fitted rank-J model. Orientation is the top-J eigenvector basis; factor
 * lengths and residual variance depend on the estimator.
 */
template <typename Scalar = double>
struct PcaFit {
    int rank = 0;
    Vector<Scalar> alphas;
    Scalar sigma2 = 1;
    Matrix<Scalar> basis;
    Estimator estimator = Estimator::ML;
    std::optional<CodelengthBreakdown<Scalar>> codelength;

    /// Implied marginal covariance sum_j alpha_j^2 u_j u_j' + sigma2 I.
    FactorCovariance<Scalar> covariance() const {
        return {basis * alphas.asDiagonal(), sigma2};
    }
};

namespace detail {

template <typename Scalar>
void require_lengths(const Vector<Scalar>& alphas, Scalar sigma2) {
    using std::isfinite;
    if (!(sigma2 > 0) || !isfinite(sigma2)) {
        throw Error(ErrorCode::InvalidParameter, "residual variance must be positive and finite");
    }
    if (alphas.size() > 0 && (!alphas.allFinite() || !(alphas.minCoeff() > 0))) {
        throw Error(ErrorCode::InvalidParameter, "factor lengths must be positive and finite");
    }
}

// sum_{j<k} log|alpha_j^2 - alpha_k^2|; ties are DegenerateSpectrum.
template <typename Scalar>
Scalar log_length_gaps(const Vector<Scalar>& alphas) {
    using std::abs;
    using std::log;
    const Index rank = alphas.size();
    if (rank < 2) return Scalar(0);
    const Vector<Scalar> sq = alphas.array().square();
    const Scalar tol = Scalar(1e-12) * sq.maxCoeff();
    Scalar out = 0;
    for (Index j = 0; j < rank; ++j) {
        for (Index k = j + 1; k < rank; ++k) {
            const Scalar gap = abs(sq(j) - sq(k));
            if (gap <= tol) {
                throw Error(ErrorCode::DegenerateSpectrum, "tied factor lengths");
            }
            out += log(gap);
        }
    }
    return out;
}

}  // namespace detail

/**
 * Negative log-likelihood of the centered sample when the fit's orientation is
 * the top-J eigenbasis of the sample covariance:
 *
 *   (NK/2) log 2pi + (N/2) sum_j log lambda_j + (N/2) sum_j delta_j / lambda_j
 *
 * with lambda_j = alpha_j^2 + sigma2 for j <= J and sigma2 otherwise.
 */
template <typename Scalar>
Scalar negative_log_likelihood(const Spectrum<Scalar>& spec, const Vector<Scalar>& alphas, Scalar sigma2) {
    using std::log;
    detail::require_lengths(alphas, sigma2);
    const Index rank = alphas.size();
    if (rank > spec.dim) {
        throw Error(ErrorCode::InvalidParameter, "more factor lengths than dimensions");
    }
    Vector<Scalar> model = Vector<Scalar>::Constant(spec.dim, sigma2);
    model.head(rank).array() += alphas.array().square();
    const Scalar n = Scalar(spec.n_obs);
    return n * Scalar(spec.dim) / Scalar(2) * log(Scalar(2) * std::numbers::pi_v<Scalar>) +
           n / Scalar(2) * model.array().log().sum() +
           n / Scalar(2) * (spec.eigenvalues.array() / model.array()).sum();
}

/**
 * log of the prior density over (alpha, sigma) with the orientation measure
 * factored out:
 *
 *   log pi_alpha(alpha | sigma) + log J! - log sigma
 *
 * pi_alpha is the factor-length density induced by a matrix-variate Cauchy
 * prior on the scaled loadings,
 *
 *   2^J pi^{J^2/2} sigma^{J^2} / (Gamma_J(J/2) B_J(K/2, J/2))
 *     * prod_j alpha_j^{K-J} (sigma^2 + alpha_j^2)^{-(K+J)/2} * prod_{j<k} |alpha_j^2 - alpha_k^2|,
 *
 * and 1/sigma is the scale-invariant residual prior without its
 * (rank-independent) normalizer. The Givens-angle Jacobian is excluded here; it
 * cancels against the matching factor in the Fisher determinant.
 */
template <typename Scalar>
Scalar log_prior(const Vector<Scalar>& alphas, Scalar sigma2, Index dim) {
    using std::lgamma;
    using std::log;
    detail::require_lengths(alphas, sigma2);
    const int rank = static_cast<int>(alphas.size());
    const Scalar log_sigma2 = log(sigma2);
    Scalar out = -log_sigma2 / Scalar(2);
    if (rank == 0) return out;

    const Scalar j = Scalar(rank);
    const Scalar k = Scalar(dim);
    out += j * log(Scalar(2)) + j * j / Scalar(2) * log(std::numbers::pi_v<Scalar>) +
           j * j / Scalar(2) * log_sigma2 - log_multivariate_gamma(rank, j / Scalar(2)) -
           log_multivariate_beta(rank, k / Scalar(2), j / Scalar(2));
    const auto sq = alphas.array().square();
    out += ((k - j) * alphas.array().log() - (k + j) / Scalar(2) * (sq + sigma2).log()).sum();
    out += detail::log_length_gaps(alphas);
    out += lgamma(j + Scalar(1));
    return out;
}

/**
 * log of the expected Fisher information determinant over (alpha, sigma, phi)
 * without the squared Givens Jacobian:
 *
 *   P log N + log(2^{J+1} (K-J)) - (J(K-J)+1) log sigma^2
 *     + sum_j [(4(K-J)+2) log alpha_j - (K+1) log(alpha_j^2 + sigma^2)]
 *     + 2 sum_{j<k} log(alpha_j^2 - alpha_k^2)
 */
template <typename Scalar>
Scalar log_fisher_det(const Vector<Scalar>& alphas, Scalar sigma2, Index n_obs, Index dim) {
    using std::log;
    detail::require_lengths(alphas, sigma2);
    const int rank = static_cast<int>(alphas.size());
    const Scalar j = Scalar(rank);
    const Scalar k = Scalar(dim);
    const ParameterCount count = parameter_count(dim, rank);
    Scalar out = Scalar(count.total) * log(Scalar(n_obs)) + (j + 1) * log(Scalar(2)) + log(k - j) -
                 (j * (k - j) + 1) * log(sigma2);
    if (rank > 0) {
        const auto sq = alphas.array().square();
        out += ((Scalar(4) * (k - j) + 2) * alphas.array().log() - (k + 1) * (sq + sigma2).log()).sum();
        out += Scalar(2) * detail::log_length_gaps(alphas);
    }
    return out;
}

/**
 * (P/2) log kappa_P + P/2. Exact lattice constants for P <= 3; for larger P
 * the asymptotic form -(P/2) log 2pi + (1/2) log(P pi) - gamma.
 */
template <typename Scalar = double>
Scalar quantization_nats(int parameters) {
    using std::log;
    using std::pow;
    using std::sqrt;
    if (parameters < 1) {
        throw Error(ErrorCode::InvalidParameter, "parameter count must be >= 1");
    }
    const Scalar p = Scalar(parameters);
    const Scalar pi = std::numbers::pi_v<Scalar>;
    Scalar kappa;
    switch (parameters) {
        case 1: kappa = Scalar(1) / Scalar(12); break;
        case 2: kappa = Scalar(5) / (Scalar(36) * sqrt(Scalar(3))); break;
        case 3: kappa = Scalar(19) / (Scalar(192) * pow(Scalar(2), Scalar(1) / Scalar(3))); break;
        default:
            return -p / Scalar(2) * log(Scalar(2) * pi) + log(p * pi) / Scalar(2) -
                   std::numbers::egamma_v<Scalar>;
    }
    return p / Scalar(2) * log(kappa) + p / Scalar(2);
}

/**
 * Full two-part codelength of a rank-J model whose orientation is the top-J
 * eigenbasis. Depends on the data only through (N, delta). J = 0 is the
 * isotropic Gaussian with P = 1.
 */
template <typename Scalar>
CodelengthBreakdown<Scalar> full_codelength(const Spectrum<Scalar>& spec, const Vector<Scalar>& alphas,
                                            Scalar sigma2) {
    const int rank = static_cast<int>(alphas.size());
    const ParameterCount count = parameter_count(spec.dim, rank);
    CodelengthBreakdown<Scalar> out;
    out.neg_log_likelihood = negative_log_likelihood(spec, alphas, sigma2);
    out.neg_log_prior = -log_prior(alphas, sigma2, spec.dim);
    out.half_log_fisher = log_fisher_det(alphas, sigma2, spec.n_obs, spec.dim) / Scalar(2);
    out.quantization = quantization_nats<Scalar>(count.total);
    out.total = out.neg_log_likelihood + out.neg_log_prior + out.half_log_fisher + out.quantization;
    out.parameters = count.total;
    out.angles = count.angles;
    return out;
}

template <typename Scalar>
CodelengthBreakdown<Scalar> full_codelength(const Spectrum<Scalar>& spec, const PcaFit<Scalar>& fit) {
    return full_codelength(spec, fit.alphas, fit.sigma2);
}

/// Full codelength with the lengths profiled out: alpha_j^2 = delta_j - tau.
template <typename Scalar>
CodelengthBreakdown<Scalar> profile_codelength(const Spectrum<Scalar>& spec, int rank, Scalar tau) {
    const Vector<Scalar> alphas = (spec.eigenvalues.head(rank).array() - tau).sqrt();
    return full_codelength(spec, alphas, tau);
}

/**
 * Codelength as a function of tau = sigma^2 alone, up to a tau-independent
 * constant:
 *
 *   ((N(K-J) - KJ)/2) log tau + (N/2tau) sum_{j<=K} delta_j
 *     - (N/2tau) sum_{j<=J} (delta_j - tau) + ((K-J+1)/2) sum_{j<=J} log(delta_j - tau)
 *
 * Defined on 0 < tau < delta_J. It tends to -infinity at the upper end, so only
 * stationary points are meaningful candidates.
 */
template <typename Scalar>
Scalar concentrated_codelength(Scalar tau, const Spectrum<Scalar>& spec, int rank) {
    using std::log;
    const Scalar upper = rank > 0 ? spec.eigenvalues(rank - 1) : std::numeric_limits<Scalar>::infinity();
    if (!(tau > 0) || !(tau < upper)) {
        throw Error(ErrorCode::DomainError, "tau outside (0, delta_J)");
    }
    const Scalar n = Scalar(spec.n_obs);
    const Scalar k = Scalar(spec.dim);
    const Scalar j = Scalar(rank);
    const auto retained = spec.eigenvalues.head(rank).array();
    return (n * (k - j) - k * j) / Scalar(2) * log(tau) + n / (Scalar(2) * tau) * spec.trace() -
           n / (Scalar(2) * tau) * (retained - tau).sum() +
           (k - j + 1) / Scalar(2) * (retained - tau).log().sum();
}

}  // namespace mmlpca
