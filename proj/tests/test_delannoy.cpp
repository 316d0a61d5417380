#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stakit/delannoy.hpp"

using namespace stakit;

TEST_CASE("small path counts") {
    CHECK(delannoy(1, 7) == BigNat(1));
    CHECK(delannoy(7, 1) == BigNat(1));
    CHECK(delannoy(2, 4) == BigNat(7)); // D(2, 1+k) = 2k + 1
    CHECK(delannoy(2, 2) == BigNat(3));
    CHECK(delannoy(3, 3) == BigNat(13));
    CHECK(delannoy(5, 5) == BigNat(321));
}

TEST_CASE("table is symmetric and satisfies the recursion exactly") {
    const DelannoyTable table(60, 60);
    for (int m = 1; m <= 60; ++m)
        for (int n = 1; n <= 60; ++n) {
            CHECK(table.value(m, n) == table.value(n, m));
            if (m >= 2 && n >= 2)
                CHECK(table.value(m, n) ==
                      table.value(m - 1, n) + table.value(m, n - 1) + table.value(m - 1, n - 1));
        }
    CHECK(table.value(1, 60) == BigNat(1));
}

TEST_CASE("central two-stage recursion") {
    // m = 2: 2 * D3 + 1 * D1 = 9 * D2  <=>  26 + 1 = 27
    CHECK(BigNat(2) * delannoy(3, 3) + BigNat(1) * delannoy(1, 1) ==
          BigNat(9) * delannoy(2, 2));
    CHECK(central_delannoy_recursion_check(2));
    CHECK(central_delannoy_recursion_check(40));
}

TEST_CASE("growth bound on the diagonal") {
    CHECK(growth_check(1)); // D2 = 3 <= 3 + 2 sqrt2
    CHECK(growth_check(40));
}

TEST_CASE("phi and psi closed forms") {
    for (int m = 1; m <= 12; ++m) CHECK(psi(m, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(phi(1, 1) == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-15));
    // independent arrangement through the exact numerators
    for (int m = 1; m <= 8; ++m)
        for (int k = 1; k <= 8; ++k) {
            CHECK(phi(m, k) ==
                  doctest::Approx(phi_numerator(m, k).value() / (m + k - 1)).epsilon(1e-13));
            CHECK(psi(m, k) ==
                  doctest::Approx(psi_numerator(m, k).value() / m).epsilon(1e-13));
            CHECK(phi(m, k) <= 1.0);
            CHECK(psi(m, k) >= 1.0);
            CHECK(phi(m, k) > 0.0);
        }
    CHECK(phi(3, 2) == doctest::Approx(1.0 - ((1.0 - 1.0 / (1.0 + std::sqrt(2.0))) +
                                              1.0 / (1.0 + std::sqrt(2.0))) /
                                                 4.0));
    CHECK(psi(3, 2) ==
          doctest::Approx(1.0 + (1.0 - 1.0 / (1.0 + std::sqrt(2.0))) / 3.0));
}

TEST_CASE("off-diagonal inequalities at the boundary rows") {
    const double c = silver_ratio();
    for (int k = 1; k <= 12; ++k) {
        // c*phi(1,k) = 1 + (sqrt2 - 1)/k and D(1, 1+k) = 1
        CHECK(c * phi(1, k) == doctest::Approx(1.0 + (std::sqrt(2.0) - 1.0) / k).epsilon(1e-13));
        // c*psi(1,k) = sqrt2 k + 1 <= 2k + 1 = D(2, 1+k)
        CHECK(c * psi(1, k) == doctest::Approx(std::sqrt(2.0) * k + 1.0).epsilon(1e-13));
        CHECK(delannoy(2, 1 + k) == BigNat(static_cast<std::uint64_t>(2 * k + 1)));
    }
    CHECK(offdiagonal_inequality_check(30, 30));
}

TEST_CASE("factor chain inequalities hold exactly") {
    CHECK(technical_lemma_check(1, 1));
    CHECK(technical_lemma_check(30, 30));
    // the right inequality is tight at k = 1: f(1) = a c (2a - 1) + a - a^2 c = 0
    const Quad2 a{2, -1}; // 1 - 1/c = 2 - sqrt2
    const Quad2 c{1, 1};
    const Quad2 two_a_minus_one = a + a - Quad2{1, 0};
    const Quad2 f1 = a * c * two_a_minus_one + a - a * a * c;
    CHECK(f1 == Quad2{0, 0});
}

TEST_CASE("the k = 1 growth-chain case is equality-adjacent") {
    // the relative slack of the second inequality shrinks toward zero with m
    const DelannoyTable table(32, 33);
    double prev = offdiagonal_slack(table, 10, 1).slack_b;
    CHECK(prev >= 0.0);
    for (int m : {20, 30}) {
        const OffdiagSlack s = offdiagonal_slack(table, m, 1);
        CHECK(s.b_holds);
        CHECK(s.slack_b >= 0.0);
        CHECK(s.slack_b < prev);
        prev = s.slack_b;
    }
    CHECK(prev < 0.005);
    CHECK(offdiagonal_slack(table, 1, 1).slack_lemma == 0.0); // f(1) = 0
}

TEST_CASE("log ratio dominates the product bound") {
    CHECK(log_ratio_bound(3, 5, 0).log_ratio == 0.0);
    CHECK(log_ratio_bound(3, 5, 0).product_bound == 0.0);
    const LogRatioBound lr = log_ratio_bound(3, 5, 2);
    CHECK(lr.log_ratio >= lr.product_bound);
    CHECK(lr.product_bound > 0.0);

    const DelannoyTable table(40, 40);
    for (int m = 1; m <= 12; ++m)
        for (int mp = 2; mp <= 12; ++mp)
            for (int k = 1; k <= mp - 1; ++k) {
                const LogRatioBound b = log_ratio_bound(table, m, mp, k);
                CHECK(b.log_ratio >= b.product_bound);
            }
    CHECK_THROWS_AS((void)log_ratio_bound(3, 5, 5), std::domain_error);
}

TEST_CASE("quadratic bound closed form") {
    const double beta = 0.1;
    CHECK(quadratic_bound(beta, 4, 7, 11, 1) == doctest::Approx(beta * shift_rho(11)));
    const double s2 = std::sqrt(2.0);
    const double expected =
        0.1 * ((2.0 - s2) / 2.0 * (1.0 / 10 + 1.0 / 15)) * 3 * 2 + 0.1 * ((3 * s2 - 4) / 60.0) * 3;
    CHECK(quadratic_bound(0.1, 5, 10, 20, 3) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("analytic chain: product bound minus the tail dominates the quadratic form") {
    const DelannoyTable table(45, 45);
    const double beta = 0.7;
    for (int m = 1; m <= 20; ++m)
        for (int mp = 2; mp <= 20; ++mp) {
            const int t_len = m + mp;
            for (int k = 1; k <= mp - 1; ++k) {
                const LogRatioBound b = log_ratio_bound(table, m, mp, k);
                const double lhs = beta * b.product_bound - beta / (3.0 * t_len);
                CHECK(lhs >= quadratic_bound(beta, m, mp, t_len, k));
            }
        }
}

TEST_CASE("admissible smoothing threshold") {
    CHECK(beta_threshold(1.0, 2) == doctest::Approx(1.0 / std::log(18.0)).epsilon(1e-14));
    CHECK(beta_threshold(2.0, 9) == doctest::Approx(2.0 * beta_threshold(1.0, 9)).epsilon(1e-14));
    // far beyond double range for D(T,T); the threshold collapses
    CHECK(beta_threshold(1.0, 400) < 0.01);
    CHECK(beta_threshold(1.0, 400) > 0.0);
    CHECK_THROWS_AS((void)beta_threshold(0.0, 5), std::domain_error);
    CHECK_THROWS_AS((void)beta_threshold(1.0, 1), std::domain_error);
}

TEST_CASE("decimal rendering of exact counts") {
    CHECK(delannoy(1, 1).to_string() == "1");
    CHECK(delannoy(5, 5).to_string() == "321");
    CHECK(delannoy(20, 20).to_string() == "45849429914943");
    const BigNat big = delannoy(60, 60);
    CHECK(big.to_string() == "109434519464982325698954832524982547481707199");
    CHECK(big.log_value() == doctest::Approx(101.40390028038212).epsilon(1e-12));
    CHECK(big.bit_length() == doctest::Approx(101.40390028038212 / std::log(2.0)).epsilon(0.01));
}
