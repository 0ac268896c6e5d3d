#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "mmlpca/error.hpp"

namespace mmlpca {

/// log Gamma_J(y) = J(J-1)/4 log(pi) + sum_{j=1..J} log Gamma(y + (1-j)/2).
template <typename Scalar>
Scalar log_multivariate_gamma(int rank, Scalar y) {
    using std::lgamma;
    using std::log;
    if (rank < 1) {
        throw Error(ErrorCode::DomainError, "multivariate gamma needs dimension >= 1");
    }
    Scalar out = Scalar(rank) * Scalar(rank - 1) / Scalar(4) * log(std::numbers::pi_v<Scalar>);
    for (int j = 1; j <= rank; ++j) {
        const Scalar arg = y + Scalar(1 - j) / Scalar(2);
        if (arg <= 0 && arg == std::floor(arg)) {
            throw Error(ErrorCode::DomainError,
                        "multivariate gamma evaluated at a pole (argument " + std::to_string(double(arg)) + ")");
        }
        out += lgamma(arg);
    }
    return out;
}

/// log B_J(a, b) = log Gamma_J(a) + log Gamma_J(b) - log Gamma_J(a + b).
template <typename Scalar>
Scalar log_multivariate_beta(int rank, Scalar a, Scalar b) {
    return log_multivariate_gamma(rank, a) + log_multivariate_gamma(rank, b) -
           log_multivariate_gamma(rank, a + b);
}

}  // namespace mmlpca
