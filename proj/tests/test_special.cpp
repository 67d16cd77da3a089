#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "vortex/identities.hpp"
#include "vortex/special.hpp"

using namespace vortex;

namespace {

// Direct high-truncation evaluations, independent of the production series:
// fixed 500-term product / sum, no tail-bound logic shared with the library.
complex_t oracle_P(complex_t zeta, double rho) {
    complex_t acc = 1.0 - zeta;
    double rn = 1.0;
    for (int n = 1; n <= 500; ++n) {
        rn *= rho;
        acc *= (1.0 - rn * zeta) * (1.0 - rn / zeta);
    }
    return acc;
}

complex_t oracle_K(complex_t zeta, double rho) {
    complex_t acc = zeta / (zeta - 1.0);
    double rn = 1.0;
    for (int n = 1; n <= 500; ++n) {
        rn *= rho;
        acc += -rn * zeta / (1.0 - rn * zeta) + rn / (zeta - rn);
    }
    return acc;
}

}  // namespace

TEST_CASE("truncation_length matches the tail bound by direct scan") {
    // smallest n with rho^n / (1 - rho) < tol
    CHECK(truncation_length(0.5, 1e-12) == 41);
    CHECK(truncation_length(1e-6, 0.9) == 1);
    for (double rho : {0.1, 0.3, 0.6, 0.9}) {
        const int n = truncation_length(rho, 1e-12);
        CHECK(std::pow(rho, n) / (1.0 - rho) < 1e-12);
        CHECK(std::pow(rho, n - 1) / (1.0 - rho) >= 1e-12);
    }
}

TEST_CASE("truncation_length reports the required length when the cap is hit") {
    TruncationPolicy tight;
    tight.max_terms = 100;
    try {
        truncation_length(0.99, 1e-12, tight);
        FAIL("expected truncation_error");
    } catch (const truncation_error& e) {
        CHECK(e.required_terms > 100);
        // the reported requirement is the unconstrained scan result
        TruncationPolicy loose;
        CHECK(truncation_length(0.99, 1e-12, loose) == e.required_terms);
    }
}

TEST_CASE("P against frozen multiprecision references") {
    // 50-digit reference values, frozen from an independent arbitrary-precision
    // evaluation of the defining product
    const complex_t p1 = eval_P({-1.0, 0.0}, 0.3);
    CHECK_THAT(p1.real(), Catch::Matchers::WithinRel(4.334412533942602120342, 1e-14));
    CHECK_THAT(p1.imag(), Catch::Matchers::WithinAbs(0.0, 1e-14));

    const complex_t z2 = 0.8 * complex_t{std::cos(pi / 7.0), std::sin(pi / 7.0)};
    const complex_t p2 = eval_P(z2, 0.55);
    CHECK_THAT(p2.real(), Catch::Matchers::WithinRel(0.03391042095997802313319, 1e-13));
    CHECK_THAT(p2.imag(), Catch::Matchers::WithinRel(-0.01180319330854412268226, 1e-13));
}

TEST_CASE("K against frozen multiprecision references") {
    const complex_t z = 0.7 * complex_t{std::cos(pi / 5.0), std::sin(pi / 5.0)};
    const complex_t k = eval_K(z, 0.45);
    CHECK_THAT(k.real(), Catch::Matchers::WithinRel(0.03513238702337557615511, 1e-13));
    CHECK_THAT(k.imag(), Catch::Matchers::WithinRel(-3.094822215772164483163, 1e-13));

    const complex_t half = eval_K({-1.0, 0.0}, 0.37);
    CHECK(half.real() == 0.5);  // exact: the series pairs cancel termwise
    CHECK(half.imag() == 0.0);
}

TEST_CASE("P has a simple zero at 1 and the empty-product limit") {
    CHECK(std::abs(eval_P({1.0, 0.0}, 0.3)) == 0.0);
    const complex_t z{0.4, 0.25};
    CHECK(std::abs(eval_P(z, 1e-9) - (1.0 - z)) < 1e-8);
}

TEST_CASE("domain and singularity guards") {
    CHECK_THROWS_AS(eval_P({0.0, 0.0}, 0.3), domain_error);
    CHECK_THROWS_AS(eval_K({0.0, 0.0}, 0.3), domain_error);
    CHECK_THROWS_AS(eval_P({0.05, 0.0}, 0.3), domain_error);   // |zeta| <= rho
    CHECK_THROWS_AS(eval_K({1.0 + 1e-12, 0.0}, 0.3), singularity_error);
    CHECK_THROWS_AS(eval_K({0.3 * (1.0 + 1e-9), 0.0}, 0.3), singularity_error);  // pole band at rho
    CHECK_THROWS_AS(eval_P({0.0, 0.0}, 1.2), domain_error);
}

TEST_CASE("production series against 500-term oracles on random inputs") {
    std::mt19937_64 rng(20260816);
    std::uniform_real_distribution<double> angle(0.05, two_pi - 0.05);
    for (double rho : {0.2, 0.45, 0.6}) {
        std::uniform_real_distribution<double> radius(rho + 0.08, 1.0 / rho - 0.08);
        for (int t = 0; t < 25; ++t) {
            const double r = radius(rng), th = angle(rng);
            const complex_t z{r * std::cos(th), r * std::sin(th)};
            const complex_t pe = eval_P(z, rho), po = oracle_P(z, rho);
            const complex_t ke = eval_K(z, rho), ko = oracle_K(z, rho);
            CHECK(std::abs(pe - po) <= 1e-12 * (1.0 + std::abs(po)));
            CHECK(std::abs(ke - ko) <= 1e-12 * (1.0 + std::abs(ko)));
        }
    }
}

TEST_CASE("identity battery passes at its built-in tolerances") {
    for (double rho : {0.1, 0.3, 0.6}) {
        const std::vector<IdentityCheck> checks = identity_battery(rho);
        REQUIRE(!checks.empty());
        for (const IdentityCheck& c : checks) {
            INFO("rho = " << rho << ", " << c.name << ": " << c.max_error);
            CHECK(c.pass);
        }
    }
}

TEST_CASE("K functional equations at explicit probe points") {
    // K(rho z) = K(z) - 1 at z = 1.25 e^{i pi/3}, rho = 0.4 (both arguments
    // strictly inside the open annulus domain)
    {
        const complex_t z = 1.25 * complex_t{std::cos(pi / 3.0), std::sin(pi / 3.0)};
        const complex_t lhs = eval_K(0.4 * z, 0.4);
        const complex_t rhs = eval_K(z, 0.4) - 1.0;
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
    // K(i) + K(-i) = 1 at rho = 0.5
    {
        const complex_t a = eval_K({0.0, 1.0}, 0.5);
        const complex_t b = eval_K({0.0, -1.0}, 0.5);
        CHECK(std::abs(a + b - 1.0) < 1e-12);
    }
}

TEST_CASE("Ktilde removes the zeta/(zeta-1) pole and vanishes at 1") {
    const complex_t kt = eval_Ktilde({1.0, 0.0}, 0.3);
    CHECK(std::abs(kt) == 0.0);  // the series telescopes exactly at zeta = 1
    // K = zeta/(zeta-1) + Ktilde away from 1
    const complex_t z{0.9 * std::cos(1.0), 0.9 * std::sin(1.0)};
    const complex_t k = eval_K(z, 0.3);
    const complex_t kt2 = eval_Ktilde(z, 0.3);
    CHECK(std::abs(k - (z / (z - 1.0) + kt2)) < 1e-14);
}

TEST_CASE("Ptilde removes the (1 - zeta) factor") {
    const complex_t z{0.8 * std::cos(0.7), 0.8 * std::sin(0.7)};
    const complex_t p = eval_P(z, 0.4);
    const complex_t pt = eval_Ptilde(z, 0.4);
    CHECK(std::abs(p - (1.0 - z) * pt) < 1e-14 * std::abs(p));
    CHECK(std::abs(eval_Ptilde({1.0, 0.0}, 0.4)) > 0.0);  // finite at the removed zero
}
