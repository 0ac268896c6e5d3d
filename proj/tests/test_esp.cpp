#include <doctest.h>

#include <random>

#include "mmlpca/esp.hpp"

using namespace mmlpca;

namespace {

// e_t by enumerating every subset.
Vector<double> subset_oracle(const Vector<double>& v) {
    const Index n = v.size();
    Vector<double> e = Vector<double>::Zero(n + 1);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        double prod = 1;
        int bits = 0;
        for (Index i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                prod *= v(i);
                ++bits;
            }
        }
        e(bits) += prod;
    }
    return e;
}

}  // namespace

TEST_CASE("small exact cases") {
    Vector<double> v(3);
    v << 1, 2, 3;
    const Vector<double> e = elementary_symmetric(v);
    REQUIRE(e.size() == 4);
    CHECK(e(0) == 1);
    CHECK(e(1) == 6);
    CHECK(e(2) == 11);
    CHECK(e(3) == 6);

    CHECK(elementary_symmetric(Vector<double>(0)).size() == 1);
}

TEST_CASE("all ones give binomial coefficients") {
    for (int j = 1; j <= 20; ++j) {
        const Vector<double> e = elementary_symmetric(Vector<double>(Vector<double>::Ones(j)));
        double binom = 1;
        for (int t = 0; t <= j; ++t) {
            CHECK(e(t) == binom);
            binom = binom * (j - t) / (t + 1);
        }
    }
}

TEST_CASE("matches subset enumeration") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(-2, 3);
    for (int n = 1; n <= 12; ++n) {
        Vector<double> v(n);
        for (int i = 0; i < n; ++i) v(i) = unif(rng);
        const Vector<double> e = elementary_symmetric(v);
        const Vector<double> ref = subset_oracle(v);
        for (int t = 0; t <= n; ++t) CHECK(e(t) == doctest::Approx(ref(t)).epsilon(1e-10));
    }
}

TEST_CASE("Vieta: prod (x + v_j) expanded by a naive recurrence") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(0.1, 5);
    Vector<double> v(8);
    for (int i = 0; i < 8; ++i) v(i) = unif(rng);

    // Coefficients of prod (x + v_j) in descending powers: c_t multiplies x^{8-t}.
    std::vector<double> c{1.0};
    for (int i = 0; i < 8; ++i) {
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t t = 0; t < c.size(); ++t) {
            next[t] += c[t];
            next[t + 1] += v(i) * c[t];
        }
        c = next;
    }
    const Vector<double> e = elementary_symmetric(v);
    for (int t = 0; t <= 8; ++t) CHECK(e(t) == doctest::Approx(c[t]).epsilon(1e-10));
}

TEST_CASE("integer inputs are exact") {
    Vector<long double> v(5);
    v << 2, 3, 5, 7, 11;
    const Vector<long double> e = elementary_symmetric(v);
    CHECK(e(1) == 28);
    CHECK(e(2) == 2 * 3 + 2 * 5 + 2 * 7 + 2 * 11 + 3 * 5 + 3 * 7 + 3 * 11 + 5 * 7 + 5 * 11 + 7 * 11);
    CHECK(e(5) == 2310);
}
