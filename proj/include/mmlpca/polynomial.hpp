#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mmlpca/esp.hpp"
#include "mmlpca/spectrum.hpp"

namespace mmlpca {

/// Throws InvalidRank unless min_rank <= J <= min(K - 1, max_rank(K)).
inline void validate_rank(Index dim, int rank, int min_rank = 0) {
    if (rank < min_rank) {
        throw Error(ErrorCode::InvalidRank, "rank " + std::to_string(rank) + " is below " +
                                                std::to_string(min_rank));
    }
    if (rank > candidate_max_rank(static_cast<int>(dim))) {
        throw Error(ErrorCode::InvalidRank, "rank exceeds identifiable maximum");
    }
}

/**
 * Throws DegenerateSpectrum when two of delta_1..delta_{J+1} are closer than
 * 1e-9 * delta_1. The codelength contains log|alpha_j^2 - alpha_k^2| terms and
 * diverges on ties.
 */
template <typename Scalar>
void require_distinct_leading(const Spectrum<Scalar>& spec, int rank) {
    const Index last = std::min<Index>(rank + 1, spec.dim);
    const Scalar tol = Scalar(1e-9) * spec.eigenvalues(0);
    for (Index j = 1; j < last; ++j) {
        if (spec.eigenvalues(j - 1) - spec.eigenvalues(j) < tol || spec.eigenvalues(j - 1) <= 0) {
            throw Error(ErrorCode::DegenerateSpectrum,
                        "eigenvalues " + std::to_string(j) + " and " + std::to_string(j + 1) +
                            " are tied within tolerance");
        }
    }
}

/// Stationarity polynomial of the concentrated codelength for one rank, in
/// ascending powers of tau, plus its roots inside (0, delta_J).
template <typename Scalar = double>
struct MmlPolynomial {
    int rank = 0;
    Vector<Scalar> coefficients;
    Scalar domain_upper = 0;
    std::vector<Scalar> admissible_roots;

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }

    Scalar operator()(Scalar tau) const {
        Scalar acc = 0;
        for (Index i = coefficients.size(); i-- > 0;) acc = acc * tau + coefficients(i);
        return acc;
    }
};

/**
 * Coefficients a_0..a_{J+1} for retained eigenvalues delta_1..delta_J and the
 * ML residual variance:
 *
 *   a_0     = -tau_ml e_J
 *   a_j     = (-1)^{j+1} [tau_ml e_{J-j} + (1 - ((j-1)(J-1) + K(J-j+1)) / (N(K-J))) e_{J-j+1}]
 *   a_{J+1} = (-1)^J [1 - J(J-1) / (N(K-J))]
 *
 * with e_t the elementary symmetric polynomials of the retained eigenvalues.
 */
template <typename Scalar>
Vector<Scalar> stationary_polynomial_coefficients(const Vector<Scalar>& retained, Scalar tau_ml,
                                                  Index n_obs, Index dim) {
    const Index rank = retained.size();
    if (rank < 1 || dim <= rank || n_obs < 1) {
        throw Error(ErrorCode::InvalidParameter, "polynomial needs 1 <= J < K and N >= 1");
    }
    const Vector<Scalar> e = elementary_symmetric(retained);
    const Scalar m = Scalar(n_obs) * Scalar(dim - rank);
    const Scalar jr = Scalar(rank);
    const Scalar kd = Scalar(dim);

    Vector<Scalar> a(rank + 2);
    a(0) = -tau_ml * e(rank);
    for (Index j = 1; j <= rank; ++j) {
        const Scalar weight = Scalar(1) - (Scalar(j - 1) * (jr - 1) + kd * Scalar(rank - j + 1)) / m;
        const Scalar sign = (j % 2 == 1) ? Scalar(1) : Scalar(-1);
        a(j) = sign * (tau_ml * e(rank - j) + weight * e(rank - j + 1));
    }
    const Scalar lead_sign = (rank % 2 == 0) ? Scalar(1) : Scalar(-1);
    a(rank + 1) = lead_sign * (Scalar(1) - jr * (jr - 1) / m);
    return a;
}

namespace detail {

template <typename Scalar>
Scalar horner(const Vector<Scalar>& c, Scalar x) {
    Scalar acc = 0;
    for (Index i = c.size(); i-- > 0;) acc = acc * x + c(i);
    return acc;
}

template <typename Scalar>
Scalar horner_derivative(const Vector<Scalar>& c, Scalar x) {
    Scalar acc = 0;
    for (Index i = c.size(); i-- > 1;) acc = acc * x + Scalar(i) * c(i);
    return acc;
}

template <typename Scalar>
Scalar polish_root(const Vector<Scalar>& c, Scalar x) {
    using std::abs;
    Scalar best = abs(horner(c, x));
    for (int iter = 0; iter < 8 && best > 0; ++iter) {
        const Scalar d = horner_derivative(c, x);
        if (d == 0) break;
        const Scalar next = x - horner(c, x) / d;
        const Scalar value = abs(horner(c, next));
        if (!(value < best)) break;
        x = next;
        best = value;
    }
    return x;
}

template <typename Scalar>
std::vector<Scalar> quadratic_roots(Scalar c0, Scalar c1, Scalar c2) {
    using std::abs;
    using std::sqrt;
    Scalar disc = c1 * c1 - Scalar(4) * c2 * c0;
    const Scalar disc_scale = c1 * c1 + abs(Scalar(4) * c2 * c0);
    if (disc < 0) {
        if (disc < -Scalar(16) * std::numeric_limits<Scalar>::epsilon() * disc_scale) return {};
        disc = 0;
    }
    const Scalar q = Scalar(-0.5) * (c1 + std::copysign(sqrt(disc), c1));
    if (q == 0) return {Scalar(0), Scalar(0)};
    return {q / c2, c0 / q};
}

template <typename Scalar>
std::vector<Scalar> cubic_roots(Scalar c0, Scalar c1, Scalar c2, Scalar c3) {
    using std::acos;
    using std::cbrt;
    using std::cos;
    using std::sqrt;
    const Scalar a = c2 / c3;
    const Scalar b = c1 / c3;
    const Scalar c = c0 / c3;
    const Scalar shift = a / Scalar(3);
    const Scalar p = b - a * a / Scalar(3);
    const Scalar q = Scalar(2) * a * a * a / Scalar(27) - a * b / Scalar(3) + c;
    const Scalar half_q = q / Scalar(2);
    const Scalar third_p = p / Scalar(3);
    const Scalar disc = half_q * half_q + third_p * third_p * third_p;

    std::vector<Scalar> out;
    if (disc < 0) {
        const Scalar r = sqrt(-third_p);
        Scalar arg = -half_q / (r * r * r);
        arg = std::clamp(arg, Scalar(-1), Scalar(1));
        const Scalar phi = acos(arg) / Scalar(3);
        const Scalar two_pi_3 = Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(3);
        for (int k = 0; k < 3; ++k) out.push_back(Scalar(2) * r * cos(phi - two_pi_3 * Scalar(k)) - shift);
    } else {
        const Scalar s = sqrt(disc);
        out.push_back(cbrt(-half_q + s) + cbrt(-half_q - s) - shift);
    }
    return out;
}

template <typename Scalar>
std::vector<Scalar> companion_roots(const Vector<Scalar>& c) {
    using std::abs;
    const Index n = c.size() - 1;
    Matrix<Scalar> companion = Matrix<Scalar>::Zero(n, n);
    companion.diagonal(-1).setOnes();
    companion.col(n - 1) = -c.head(n) / c(n);
    Eigen::EigenSolver<Matrix<Scalar>> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "companion-matrix eigen-solver did not converge");
    }
    std::vector<Scalar> out;
    for (Index i = 0; i < n; ++i) {
        const std::complex<Scalar> z = solver.eigenvalues()(i);
        if (abs(z.imag()) <= Scalar(1e-6) * std::max(Scalar(1), abs(z))) out.push_back(z.real());
    }
    return out;
}

}  // namespace detail

/**
 * All real roots of the polynomial with ascending coefficients `coefficients`,
 * sorted ascending. Closed forms for degree <= 3, companion-matrix eigenvalues
 * otherwise; every candidate is Newton-polished and must satisfy
 * |p(x)| <= 1e-9 max|a_i| max(1, |x|)^n.
 */
template <typename Scalar>
std::vector<Scalar> real_roots(const Vector<Scalar>& coefficients) {
    using std::abs;
    using std::pow;
    const Index n = coefficients.size() - 1;
    if (n < 1 || !coefficients.allFinite()) {
        throw Error(ErrorCode::InvalidParameter, "polynomial needs finite coefficients and degree >= 1");
    }
    const Scalar scale = coefficients.cwiseAbs().maxCoeff();
    if (abs(coefficients(n)) < Scalar(1e-14) * scale) {
        throw Error(ErrorCode::IllConditionedPolynomial, "leading coefficient is numerically zero");
    }

    std::vector<Scalar> candidates;
    switch (n) {
        case 1: candidates = {-coefficients(0) / coefficients(1)}; break;
        case 2: candidates = detail::quadratic_roots(coefficients(0), coefficients(1), coefficients(2)); break;
        case 3:
            candidates = detail::cubic_roots(coefficients(0), coefficients(1), coefficients(2), coefficients(3));
            break;
        default: candidates = detail::companion_roots(coefficients); break;
    }

    std::vector<Scalar> roots;
    for (Scalar x : candidates) {
        x = detail::polish_root(coefficients, x);
        const Scalar bound = Scalar(1e-9) * scale * pow(std::max(Scalar(1), abs(x)), Scalar(n));
        if (abs(detail::horner(coefficients, x)) <= bound) roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](Scalar lhs, Scalar rhs) {
                                return abs(lhs - rhs) <= Scalar(1e-12) * std::max(Scalar(1), abs(lhs));
                            }),
                roots.end());
    return roots;
}

/**
 * Real roots of `poly` in (0, domain_upper). The variable is rescaled by
 * domain_upper first so the residual test is independent of data units.
 */
template <typename Scalar>
std::vector<Scalar> find_real_roots(const MmlPolynomial<Scalar>& poly) {
    const Scalar unit = poly.domain_upper > 0 ? poly.domain_upper : Scalar(1);
    Vector<Scalar> scaled = poly.coefficients;
    Scalar power = 1;
    for (Index i = 0; i < scaled.size(); ++i) {
        scaled(i) *= power;
        power *= unit;
    }
    std::vector<Scalar> out;
    for (Scalar u : real_roots(scaled)) {
        const Scalar tau = u * unit;
        if (tau > 0 && tau < poly.domain_upper) out.push_back(tau);
    }
    return out;
}

namespace detail {

/**
 * Newton refinement of a stationary point on the unexpanded derivative
 *
 *   g(tau) = A / tau - N R / (2 tau^2) - ((K-J+1)/2) sum_{j<=J} 1 / (delta_j - tau),
 *
 * A = (N(K-J) - KJ)/2, R = sum_{j>J} delta_j. The expanded polynomial loses
 * digits when roots crowd delta_J; g does not. A step is kept only if it stays
 * inside the domain and reduces |g|.
 */
template <typename Scalar>
Scalar polish_stationary(const Spectrum<Scalar>& spec, int rank, Scalar tau) {
    using std::abs;
    const Scalar n = Scalar(spec.n_obs);
    const Scalar k = Scalar(spec.dim);
    const Scalar j = Scalar(rank);
    const Scalar a = (n * (k - j) - k * j) / Scalar(2);
    const Scalar half_nr = n * spec.eigenvalues.tail(spec.dim - rank).sum() / Scalar(2);
    const Scalar c = (k - j + Scalar(1)) / Scalar(2);
    const auto retained = spec.eigenvalues.head(rank).array();
    const Scalar upper = spec.eigenvalues(rank - 1);

    auto slope = [&](Scalar t) { return a / t - half_nr / (t * t) - c * (retained - t).inverse().sum(); };
    auto curvature = [&](Scalar t) {
        return -a / (t * t) + Scalar(2) * half_nr / (t * t * t) - c * (retained - t).square().inverse().sum();
    };
    Scalar best = abs(slope(tau));
    for (int iter = 0; iter < 16 && best > 0; ++iter) {
        const Scalar d = curvature(tau);
        if (d == 0) break;
        const Scalar next = tau - slope(tau) / d;
        if (!(next > 0 && next < upper)) break;
        const Scalar value = abs(slope(next));
        if (!(value < best)) break;
        tau = next;
        best = value;
    }
    return tau;
}

}  // namespace detail

/**
 * Stationarity polynomial of the rank-J concentrated codelength.
 *
 * Requires 1 <= J <= min(K - 1, max_rank(K)) and distinct delta_1..delta_{J+1}.
 */
template <typename Scalar>
MmlPolynomial<Scalar> mml_polynomial(const Spectrum<Scalar>& spec, int rank) {
    validate_rank(spec.dim, rank, 1);
    require_distinct_leading(spec, rank);
    MmlPolynomial<Scalar> poly;
    poly.rank = rank;
    poly.coefficients = stationary_polynomial_coefficients<Scalar>(
        spec.eigenvalues.head(rank), spec.tail_mean(rank), spec.n_obs, spec.dim);
    poly.domain_upper = spec.eigenvalues(rank - 1);
    poly.admissible_roots = find_real_roots(poly);
    for (Scalar& tau : poly.admissible_roots) tau = detail::polish_stationary(spec, rank, tau);
    return poly;
}

}  // namespace mmlpca
