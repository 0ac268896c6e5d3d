#pragma once

#include "mmlpca/spectrum.hpp"

namespace mmlpca {

namespace detail {

// Coefficients (ascending powers of x) of prod_{i in [first, last)} (1 + v_i x).
template <typename Scalar>
Vector<Scalar> product_of_linear_factors(const Vector<Scalar>& values, Index first, Index last) {
    const Index count = last - first;
    if (count == 0) return Vector<Scalar>::Ones(1);
    if (count == 1) {
        Vector<Scalar> out(2);
        out << Scalar(1), values(first);
        return out;
    }
    const Index mid = first + count / 2;
    const Vector<Scalar> left = product_of_linear_factors(values, first, mid);
    const Vector<Scalar> right = product_of_linear_factors(values, mid, last);
    Vector<Scalar> out = Vector<Scalar>::Zero(left.size() + right.size() - 1);
    for (Index i = 0; i < left.size(); ++i) {
        out.segment(i, right.size()) += left(i) * right;
    }
    return out;
}

}  // namespace detail

/**
 * Elementary symmetric polynomials e_0..e_J of `values`; e_0 = 1.
 *
 * Divide-and-conquer product of the linear factors (1 + v_i x) with direct
 * convolution, so the coefficient of x^t is e_t.
 */
template <typename Scalar>
Vector<Scalar> elementary_symmetric(const Vector<Scalar>& values) {
    return detail::product_of_linear_factors(values, 0, values.size());
}

}  // namespace mmlpca
