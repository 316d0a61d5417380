#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "stakit/align.hpp"
#include "stakit/delannoy.hpp"
#include "stakit/errors.hpp"
#include "stakit/synthetic.hpp"

using namespace stakit;

namespace {

Eigen::MatrixXd random_costs(SplitMix64& rng, int rows, int cols, double hi = 4.0) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(0.0, hi);
    return m;
}

// independent minimum-cost recursion, no softmin machinery shared with the
// implementation under test
double classic_dtw(const Eigen::MatrixXd& d) {
    const Eigen::Index m = d.rows();
    const Eigen::Index n = d.cols();
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Constant(m, n, inf);
    acc(0, 0) = d(0, 0);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == 0 && j == 0) continue;
            double best = inf;
            if (i > 0) best = std::min(best, acc(i - 1, j));
            if (j > 0) best = std::min(best, acc(i, j - 1));
            if (i > 0 && j > 0) best = std::min(best, acc(i - 1, j - 1));
            acc(i, j) = d(i, j) + best;
        }
    return acc(m - 1, n - 1);
}

} // namespace

TEST_CASE("softmin basics") {
    const std::vector<double> single{5.0};
    CHECK(softmin(single, 1.0) == 5.0);
    const std::vector<double> zeros{0.0, 0.0, 0.0};
    CHECK(softmin(zeros, 1.0) == doctest::Approx(-std::log(3.0)).epsilon(1e-15));
    const std::vector<double> three{1.0, 2.0, 3.0};
    CHECK(softmin(three, 0.0) == 1.0);
    CHECK_THROWS_AS((void)softmin({}, 1.0), std::domain_error);
    CHECK_THROWS_AS((void)softmin(single, -1.0), std::domain_error);
}

TEST_CASE("softmin respects infinities and stays below the minimum") {
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<double> with_inf{inf, 2.0, inf};
    CHECK(softmin(with_inf, 1.0) == 2.0);
    const std::vector<double> all_inf{inf, inf};
    CHECK(softmin(all_inf, 1.0) == inf);
    SplitMix64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> vals;
        for (int i = 0; i < 6; ++i) vals.push_back(rng.uniform(-3.0, 3.0));
        const double lo = *std::min_element(vals.begin(), vals.end());
        double prev = softmin(vals, 0.0);
        CHECK(prev == lo);
        for (double beta : {0.05, 0.3, 1.0, 4.0, 20.0}) {
            const double v = softmin(vals, beta);
            CHECK(v <= lo + 1e-12);
            CHECK(v <= prev + 1e-12); // non-increasing in beta
            prev = v;
        }
    }
}

TEST_CASE("forward recursion on pinned cases") {
    const CostMatrix zeros{Eigen::MatrixXd::Zero(2, 2)};
    CHECK(sdtw_forward(zeros, 1.0).value == doctest::Approx(-std::log(3.0)).epsilon(1e-14));
    const CostMatrix one{Eigen::MatrixXd::Constant(1, 1, 1.0)};
    CHECK(sdtw_forward(one, 0.0).value == 1.0);
    CHECK(sdtw_forward(one, 2.5).value == 1.0);

    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
    bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS((void)sdtw_forward(CostMatrix{bad}, 1.0), std::domain_error);
}

TEST_CASE("forward equals brute force") {
    SplitMix64 rng(101);
    const CostMatrix d{random_costs(rng, 5, 6)};
    for (double beta : {0.0, 0.1, 1.0, 10.0}) {
        const double fwd = sdtw_forward(d, beta).value;
        const double ref = sdtw_bruteforce(d, beta);
        CHECK(std::abs(fwd - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
    }
    CHECK(sdtw_forward(d, 0.0).value == doctest::Approx(classic_dtw(d.values)).epsilon(1e-14));
}

TEST_CASE("forward value is non-increasing in beta") {
    SplitMix64 rng(33);
    const CostMatrix d{random_costs(rng, 4, 4)};
    double prev = sdtw_forward(d, 0.0).value;
    for (double beta : {0.05, 0.2, 1.0, 5.0, 25.0}) {
        const double v = sdtw_forward(d, beta).value;
        CHECK(v <= prev + 1e-9);
        prev = v;
    }
}

TEST_CASE("backward gradient on pinned cases") {
    const CostMatrix one{Eigen::MatrixXd::Constant(1, 1, 3.0)};
    const SoftDtwResult f1 = sdtw_forward(one, 1.0);
    const Eigen::MatrixXd e1 = sdtw_backward(f1, one);
    CHECK(e1(0, 0) == 1.0);

    const CostMatrix zeros{Eigen::MatrixXd::Zero(2, 2)};
    const SoftDtwResult f2 = sdtw_forward(zeros, 1.0);
    const Eigen::MatrixXd e2 = sdtw_backward(f2, zeros);
    CHECK(e2(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e2(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e2(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(e2(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    CHECK_THROWS_AS((void)sdtw_backward(sdtw_forward(zeros, 0.0), zeros), std::domain_error);
}

TEST_CASE("backward matches central finite differences") {
    SplitMix64 rng(55);
    const double h = 1e-5;
    for (int trial = 0; trial < 3; ++trial) {
        for (double beta : {0.1, 0.5, 1.0}) {
            CostMatrix d{random_costs(rng, 4, 5)};
            const Eigen::MatrixXd grad = sdtw_backward(sdtw_forward(d, beta), d);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 5; ++j) {
                    CHECK(grad(i, j) >= -1e-12);
                    CHECK(grad(i, j) <= 1.0 + 1e-12);
                    Eigen::MatrixXd up = d.values, dn = d.values;
                    up(i, j) += h;
                    dn(i, j) -= h;
                    const double fd = (sdtw_forward(CostMatrix{up}, beta).value -
                                       sdtw_forward(CostMatrix{dn}, beta).value) /
                                      (2.0 * h);
                    CHECK(std::abs(grad(i, j) - fd) < 1e-6);
                }
        }
    }
}

TEST_CASE("alignment enumeration order and counts") {
    CHECK(enumerate_alignments(1, 5).size() == 1);
    CHECK(enumerate_alignments(5, 1).size() == 1);

    const auto paths22 = enumerate_alignments(2, 2);
    REQUIRE(paths22.size() == 3);
    using Path = std::vector<std::pair<int, int>>;
    CHECK(paths22[0].path == Path{{1, 1}, {1, 2}, {2, 2}});
    CHECK(paths22[1].path == Path{{1, 1}, {2, 1}, {2, 2}});
    CHECK(paths22[2].path == Path{{1, 1}, {2, 2}});

    const auto paths33 = enumerate_alignments(3, 3);
    CHECK(paths33.size() == 13);
    std::set<Path> distinct;
    for (const auto& a : paths33) {
        distinct.insert(a.path);
        CHECK(a.path.front() == std::pair<int, int>{1, 1});
        CHECK(a.path.back() == std::pair<int, int>{3, 3});
        for (std::size_t s = 1; s < a.path.size(); ++s) {
            const int di = a.path[s].first - a.path[s - 1].first;
            const int dj = a.path[s].second - a.path[s - 1].second;
            CHECK(di >= 0);
            CHECK(dj >= 0);
            CHECK(di + dj >= 1);
            CHECK(di <= 1);
            CHECK(dj <= 1);
        }
    }
    CHECK(distinct.size() == 13);
}

TEST_CASE("enumeration count equals the exact path count") {
    for (int m = 1; m <= 8; ++m)
        for (int n = 1; n <= 8; ++n) {
            std::uint64_t count = 0;
            for_each_alignment(m, n, [&](const auto&) { ++count; });
            CHECK(BigNat(count) == delannoy(m, n));
        }
}

TEST_CASE("enumeration guard") {
    CHECK_THROWS_AS((void)enumerate_alignments(12, 12), capacity_error);
    std::uint64_t count = 0;
    for_each_alignment(11, 11, [&](const auto&) { ++count; });
    CHECK(count == 8097453); // just under the guard
}

TEST_CASE("brute force oracle basics") {
    const CostMatrix c{Eigen::MatrixXd::Constant(1, 1, 2.5)};
    CHECK(sdtw_bruteforce(c, 0.0) == 2.5);
    CHECK(sdtw_bruteforce(c, 7.0) == 2.5);
    const CostMatrix zeros{Eigen::MatrixXd::Zero(2, 2)};
    CHECK(sdtw_bruteforce(zeros, 1.0) == doctest::Approx(-std::log(3.0)).epsilon(1e-15));
    SplitMix64 rng(9);
    const CostMatrix d{random_costs(rng, 3, 4)};
    CHECK(sdtw_bruteforce(d, 0.0) == doctest::Approx(classic_dtw(d.values)).epsilon(1e-14));
}

TEST_CASE("alignment matrix rendering") {
    const auto paths = enumerate_alignments(2, 3);
    CHECK(paths.size() == 5);
    const Eigen::MatrixXi m = paths.back().to_matrix(); // diagonal-first path
    CHECK(m.sum() == static_cast<int>(paths.back().path.size()));
    CHECK(m(0, 0) == 1);
    CHECK(m(1, 2) == 1);
    SplitMix64 rng(3);
    const CostMatrix d{random_costs(rng, 2, 3)};
    for (const auto& a : paths) {
        double dot = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 3; ++j) dot += a.to_matrix()(i, j) * d.values(i, j);
        CHECK(a.cost(d) == doctest::Approx(dot).epsilon(1e-15));
    }
}

TEST_CASE("cost matrix validation") {
    CHECK_THROWS_AS((void)CostMatrix::checked(Eigen::MatrixXd::Constant(2, 2, -1.0)),
                    std::domain_error);
    Eigen::MatrixXd inf_entry = Eigen::MatrixXd::Zero(2, 2);
    inf_entry(0, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS((void)CostMatrix::checked(inf_entry), std::domain_error);
    CHECK_NOTHROW((void)CostMatrix::checked(Eigen::MatrixXd::Zero(3, 2)));
}
