#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mmlpca/codelength.hpp"
#include "mmlpca/polynomial.hpp"

using namespace mmlpca;

namespace {

Spectrum<double> make_spectrum(std::initializer_list<double> values, Index n) {
    Vector<double> d(static_cast<Index>(values.size()));
    Index i = 0;
    for (double v : values) d(i++) = v;
    return spectrum_from_eigenvalues(d, n);
}

Spectrum<double> random_spectrum(std::mt19937& rng, int n, int k) {
    std::uniform_real_distribution<double> unif(0.2, 6.0);
    Vector<double> d(k);
    for (int i = 0; i < k; ++i) d(i) = unif(rng);
    std::sort(d.data(), d.data() + k, std::greater<>());
    return spectrum_from_eigenvalues(d, n);
}

Vector<double> from_roots(const std::vector<double>& roots) {
    Vector<double> c = Vector<double>::Ones(1);
    for (double r : roots) {
        Vector<double> next = Vector<double>::Zero(c.size() + 1);
        next.tail(c.size()) += c;
        next.head(c.size()) -= r * c;
        c = next;
    }
    return c;
}

}  // namespace

TEST_CASE("one factor: quadratic -delta1 tau_ml + (tau_ml + c delta1) tau - tau^2") {
    std::mt19937 rng(1);
    std::uniform_int_distribution<int> n_dist(5, 500);
    std::uniform_int_distribution<int> k_dist(3, 30);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = n_dist(rng);
        const int k = k_dist(rng);
        const Spectrum<double> spec = random_spectrum(rng, n, k);
        const MmlPolynomial<double> poly = mml_polynomial(spec, 1);
        const double tau = spec.tail_mean(1);
        const double d1 = spec.eigenvalues(0);
        const double c = 1.0 - double(k) / (double(n) * (k - 1));
        REQUIRE(poly.degree() == 2);
        CHECK(poly.coefficients(0) == doctest::Approx(-d1 * tau).epsilon(1e-14));
        CHECK(poly.coefficients(1) == doctest::Approx(tau + c * d1).epsilon(1e-14));
        CHECK(poly.coefficients(2) == doctest::Approx(-1.0).epsilon(1e-14));
    }
}

TEST_CASE("two factors: cubic in c0 = (K-1)/(N(K-2)), c1 = 1 - 2K/(N(K-2))") {
    std::mt19937 rng(2);
    std::uniform_int_distribution<int> n_dist(5, 500);
    std::uniform_int_distribution<int> k_dist(5, 30);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = n_dist(rng);
        const int k = k_dist(rng);
        const Spectrum<double> spec = random_spectrum(rng, n, k);
        const MmlPolynomial<double> poly = mml_polynomial(spec, 2);
        const double tau = spec.tail_mean(2);
        const double d1 = spec.eigenvalues(0);
        const double d2 = spec.eigenvalues(1);
        const double m = double(n) * (k - 2);
        const double c0 = (k - 1) / m;
        const double c1 = 1.0 - 2.0 * k / m;
        REQUIRE(poly.degree() == 3);
        CHECK(poly.coefficients(0) == doctest::Approx(-d1 * d2 * tau).epsilon(1e-13));
        CHECK(poly.coefficients(1) == doctest::Approx((d1 + d2) * tau + c1 * d1 * d2).epsilon(1e-13));
        CHECK(poly.coefficients(2) == doctest::Approx(-(tau + (c0 + c1) * (d1 + d2))).epsilon(1e-13));
        CHECK(poly.coefficients(3) == doctest::Approx(2 * c0 + c1).epsilon(1e-13));
    }
}

TEST_CASE("N=25, K=4, delta=(3,1,1,1) gives tau^2 - 3.84 tau + 3 up to sign") {
    const MmlPolynomial<double> poly = mml_polynomial(make_spectrum({3, 1, 1, 1}, 25), 1);
    CHECK(poly.coefficients(0) == doctest::Approx(-3));
    CHECK(poly.coefficients(1) == doctest::Approx(3.84));
    CHECK(poly.coefficients(2) == doctest::Approx(-1));
    REQUIRE(poly.admissible_roots.size() == 2);
    const double disc = std::sqrt(3.84 * 3.84 - 12.0);
    CHECK(poly.admissible_roots[0] == doctest::Approx((3.84 - disc) / 2).epsilon(1e-12));
    CHECK(poly.admissible_roots[1] == doctest::Approx((3.84 + disc) / 2).epsilon(1e-12));
    CHECK(poly.admissible_roots[0] == doctest::Approx(1.0915).epsilon(1e-4));
    CHECK(poly.admissible_roots[1] == doctest::Approx(2.7485).epsilon(1e-4));
}

TEST_CASE("no admissible root inside the analytic no-root band") {
    const MmlPolynomial<double> poly = mml_polynomial(make_spectrum({1.2, 1, 1, 1}, 25), 1);
    CHECK(poly.admissible_roots.empty());
}

TEST_CASE("analytic no-real-root band for N=25, K=4") {
    const double c = 1.0 - 4.0 / (25.0 * 3.0);
    const double lower = -(c + 2 * std::sqrt(1 - c) - 2) / (c * c);
    const double upper = (-c + 2 * std::sqrt(1 - c) + 2) / (c * c);
    // Ratios are delta1 / tau_ml; divide by 3 for delta1 / (delta2 + delta3 + delta4).
    CHECK(lower / 3 == doctest::Approx(0.219).epsilon(0.005));
    CHECK(upper / 3 == doctest::Approx(0.564).epsilon(0.005));

    for (double ratio = 0.1; ratio <= 0.8; ratio += 0.01) {
        Vector<double> retained(1);
        retained << 3 * ratio;
        const auto roots = real_roots(stationary_polynomial_coefficients<double>(retained, 1.0, 25, 4));
        const bool inside = ratio > lower / 3 + 1e-9 && ratio < upper / 3 - 1e-9;
        CHECK_MESSAGE(roots.empty() == inside, "ratio " << ratio);
    }
}

TEST_CASE("real_roots recovers prescribed roots") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(-3, 3);
    for (int degree = 1; degree <= 8; ++degree) {
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> roots;
            for (int i = 0; i < degree; ++i) roots.push_back(unif(rng));
            std::sort(roots.begin(), roots.end());
            bool separated = true;
            for (int i = 1; i < degree; ++i) separated &= roots[i] - roots[i - 1] > 0.05;
            if (!separated) continue;
            const Vector<double> c = 2.5 * from_roots(roots);
            const auto found = real_roots(c);
            REQUIRE(found.size() == roots.size());
            for (int i = 0; i < degree; ++i) CHECK(found[i] == doctest::Approx(roots[i]).epsilon(1e-8));
            const double scale = c.cwiseAbs().maxCoeff();
            for (double x : found) {
                CHECK(std::abs(detail::horner(c, x)) <=
                      1e-9 * scale * std::pow(std::max(1.0, std::abs(x)), degree));
            }
        }
    }
}

TEST_CASE("complex roots are dropped") {
    Vector<double> c(3);
    c << 1, 0, 1;  // x^2 + 1
    CHECK(real_roots(c).empty());
    Vector<double> quartic(5);
    quartic << -1, 0, 0, 0, 1;  // x^4 - 1
    const auto roots = real_roots(quartic);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == doctest::Approx(-1));
    CHECK(roots[1] == doctest::Approx(1));
}

TEST_CASE("domain filtering keeps roots in (0, upper)") {
    MmlPolynomial<double> poly;
    poly.coefficients = from_roots({0.5, 1.5});
    poly.domain_upper = 1.0;
    const auto roots = find_real_roots(poly);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0] == doctest::Approx(0.5));

    poly.coefficients = from_roots({-0.5, 0.0, 1.0});
    CHECK(find_real_roots(poly).empty());
}

TEST_CASE("vanishing leading coefficient is IllConditionedPolynomial") {
    Vector<double> c(3);
    c << 1, 2, 1e-17;
    try {
        real_roots(c);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IllConditionedPolynomial);
    }
}

TEST_CASE("rank and degeneracy preconditions") {
    const auto spec = make_spectrum({3, 2, 1, 0.5}, 20);
    try {
        mml_polynomial(spec, 2);  // max_rank(4) = 1
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidRank);
        CHECK(std::string(e.what()) == "rank exceeds identifiable maximum");
    }
    CHECK_THROWS_AS(mml_polynomial(spec, 0), Error);

    const auto tied = make_spectrum({3, 3, 1, 1, 1, 1}, 20);
    try {
        mml_polynomial(tied, 1);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateSpectrum);
    }
}

TEST_CASE("every admissible root is a stationary point of the concentrated codelength") {
    std::mt19937 rng(4);
    std::uniform_int_distribution<int> n_dist(10, 300);
    std::uniform_int_distribution<int> k_dist(3, 14);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int k = k_dist(rng);
        const int top = std::min(5, candidate_max_rank(k));
        if (top < 1) continue;
        const int j = std::uniform_int_distribution<int>(1, top)(rng);
        const Spectrum<double> spec = random_spectrum(rng, n_dist(rng), k);
        const MmlPolynomial<double> poly = mml_polynomial(spec, j);
        CHECK(poly.admissible_roots.size() <= static_cast<std::size_t>(j + 1));
        for (double tau : poly.admissible_roots) {
            const double h = 1e-6 * spec.eigenvalues(j - 1);
            if (tau - h <= 0 || tau + h >= spec.eigenvalues(j - 1)) continue;
            const double fp = concentrated_codelength(tau + h, spec, j);
            const double f0 = concentrated_codelength(tau, spec, j);
            const double fm = concentrated_codelength(tau - h, spec, j);
            const double first = (fp - fm) / 2;
            const double second = std::abs(fp - 2 * f0 + fm);
            CHECK(std::abs(first) < 1e-4 * std::max(second, 1e-12 * std::abs(f0)) + 1e-9);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("roots scale with the spectrum") {
    const auto a = mml_polynomial(make_spectrum({5, 3, 1.5, 1.1, 1, 0.8}, 40), 2);
    const auto b = mml_polynomial(make_spectrum({500, 300, 150, 110, 100, 80}, 40), 2);
    REQUIRE(a.admissible_roots.size() == b.admissible_roots.size());
    for (std::size_t i = 0; i < a.admissible_roots.size(); ++i) {
        CHECK(b.admissible_roots[i] == doctest::Approx(100 * a.admissible_roots[i]).epsilon(1e-10));
    }
}

TEST_CASE("roots near delta_J agree with extended-precision roots") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> n_dist(100, 400);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int k = std::uniform_int_distribution<int>(8, 14)(rng);
        const int j = std::uniform_int_distribution<int>(3, std::min(5, candidate_max_rank(k)))(rng);
        const Spectrum<double> spec = random_spectrum(rng, n_dist(rng), k);
        const auto narrow = mml_polynomial(spec, j);
        const auto wide = mml_polynomial(spec.cast<long double>(), j);
        REQUIRE(narrow.admissible_roots.size() == wide.admissible_roots.size());
        for (std::size_t i = 0; i < narrow.admissible_roots.size(); ++i) {
            const double exact = static_cast<double>(wide.admissible_roots[i]);
            CHECK(std::abs(narrow.admissible_roots[i] - exact) <= 1e-13 * spec.eigenvalues(j - 1));
            ++checked;
        }
    }
    CHECK(checked > 100);
}
