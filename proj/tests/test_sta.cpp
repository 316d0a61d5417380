#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stakit/delannoy.hpp"
#include "stakit/sta.hpp"
#include "stakit/synthetic.hpp"

using namespace stakit;

namespace {

std::shared_ptr<const GroundGeometry> make_grid(int h, int w) {
    return std::make_shared<GroundGeometry>(ground_metric_grid(h, w, 2.0));
}

std::shared_ptr<const GibbsKernel> make_kernel(
    const std::shared_ptr<const GroundGeometry>& geom, double epsilon) {
    return std::make_shared<GibbsKernel>(gibbs_kernel(*geom, epsilon));
}

SpatioTemporalSeries random_series(SplitMix64& rng, int t_len, int p,
                                   std::shared_ptr<const GroundGeometry> geom, double lo = 0.05,
                                   double hi = 1.5) {
    Eigen::MatrixXd data(t_len, p);
    for (int t = 0; t < t_len; ++t)
        for (int i = 0; i < p; ++i) data(t, i) = rng.uniform(lo, hi);
    return SpatioTemporalSeries{std::move(data), std::move(geom), ""};
}

UotParams tight_params(double epsilon, double gamma, double tol = 1e-9) {
    UotParams p;
    p.epsilon = epsilon;
    p.gamma = gamma;
    p.tol = tol;
    return p;
}

} // namespace

TEST_CASE("divergence cost matrix has a zero diagonal on identical series") {
    SplitMix64 rng(5);
    auto geom = make_grid(2, 2);
    auto kernel = make_kernel(geom, 0.5);
    const UotParams params = tight_params(0.5, 1.0);
    const SpatioTemporalSeries x = random_series(rng, 4, 4, geom);
    const SCostResult cost = s_cost_matrix(x, x, *kernel, params);
    CHECK(cost.all_converged());
    for (int t = 0; t < 4; ++t) CHECK(std::abs(cost.delta.values(t, t)) <= 1e-8);
    CHECK((cost.delta.values.array() >= -1e-8).all());
}

TEST_CASE("divergence cost matrix is symmetric under swapping the series") {
    SplitMix64 rng(11);
    auto geom = make_grid(1, 3);
    auto kernel = make_kernel(geom, 0.4);
    const UotParams params = tight_params(0.4, 1.0, 1e-11);
    const SpatioTemporalSeries x = random_series(rng, 3, 3, geom);
    const SpatioTemporalSeries y = random_series(rng, 5, 3, geom);
    const Eigen::MatrixXd sxy = s_cost_matrix(x, y, *kernel, params).delta.values;
    const Eigen::MatrixXd syx = s_cost_matrix(y, x, *kernel, params).delta.values;
    CHECK((sxy - syx.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("cost entries match independent single-pair divergences") {
    // two frames on a 1x2 grid: a unit mass hops one cell
    auto geom = make_grid(1, 2);
    auto kernel = make_kernel(geom, 0.5);
    const UotParams params = tight_params(0.5, 1.0);
    Eigen::MatrixXd xd(2, 2), yd(2, 2);
    xd << 1.0, 0.0, 1.0, 0.0;
    yd << 0.0, 1.0, 0.0, 1.0;
    const SpatioTemporalSeries x{xd, geom, ""};
    const SpatioTemporalSeries y{yd, geom, ""};
    const SCostResult cost = s_cost_matrix(x, y, *kernel, params);
    const double direct = sinkhorn_divergence(xd.row(0).transpose(), yd.row(0).transpose(),
                                              *kernel, params);
    CHECK(direct > 0.0);
    CHECK(cost.delta.values(0, 0) == doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("self dissimilarity of a time-constant series counts the alignments") {
    // constant frames make every alignment cost vanish, so only path counting
    // remains: sta(x, x) = -beta * log D(T, T)
    auto geom = make_grid(1, 2);
    auto kernel = make_kernel(geom, 0.5);
    const UotParams params = tight_params(0.5, 1.0);
    Eigen::MatrixXd data(3, 2);
    data << 0.7, 0.3, 0.7, 0.3, 0.7, 0.3;
    const SpatioTemporalSeries x{data, geom, ""};
    const CostProvider provider = CostProvider::sinkhorn(kernel, params);
    CHECK(sta(x, x, 1.0, provider) == doctest::Approx(-std::log(13.0)).epsilon(1e-6));
    CHECK(sta(x, x, 0.0, provider) == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("plain warping over divergence costs equals the enumerated minimum") {
    SplitMix64 rng(19);
    auto geom = make_grid(1, 3);
    auto kernel = make_kernel(geom, 0.4);
    const UotParams params = tight_params(0.4, 1.0);
    const SpatioTemporalSeries x = random_series(rng, 3, 3, geom);
    const SpatioTemporalSeries y = random_series(rng, 4, 3, geom);
    const CostProvider provider = CostProvider::sinkhorn(kernel, params);
    const StaResult full = sta_full(x, y, 0.0, provider);
    CHECK(full.value == doctest::Approx(sdtw_bruteforce(full.cost.delta, 0.0)).epsilon(1e-12));
}

TEST_CASE("relabeling the bins consistently leaves the value unchanged") {
    SplitMix64 rng(23);
    auto geom = make_grid(1, 4);
    auto kernel = make_kernel(geom, 0.6);
    const UotParams params = tight_params(0.6, 1.0);
    const SpatioTemporalSeries x = random_series(rng, 3, 4, geom);
    const SpatioTemporalSeries y = random_series(rng, 3, 4, geom);
    const CostProvider provider = CostProvider::sinkhorn(kernel, params);
    const double base = sta(x, y, 0.3, provider);

    const std::vector<int> perm{2, 0, 3, 1};
    Eigen::MatrixXd pm = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) pm(i, j) = geom->metric(perm[i], perm[j]);
    auto perm_geom = std::make_shared<GroundGeometry>(ground_metric_custom(pm));
    auto perm_kernel = make_kernel(perm_geom, 0.6);
    auto permute = [&](const SpatioTemporalSeries& s) {
        Eigen::MatrixXd d(s.t_len(), s.p());
        for (int t = 0; t < s.t_len(); ++t)
            for (int i = 0; i < 4; ++i) d(t, i) = s.data(t, perm[i]);
        return SpatioTemporalSeries{d, perm_geom, s.label};
    };
    const CostProvider perm_provider = CostProvider::sinkhorn(perm_kernel, params);
    CHECK(sta(permute(x), permute(y), 0.3, perm_provider) ==
          doctest::Approx(base).epsilon(1e-8));
}

TEST_CASE("gradient vanishes at identical inputs and matches finite differences") {
    SplitMix64 rng(37);
    auto geom = make_grid(2, 2);
    auto kernel = make_kernel(geom, 0.5);
    const UotParams params = tight_params(0.5, 1.0, 1e-12);
    const double beta = 0.5;

    // the diagonal term is stationary and the expected alignment puts weight
    // e^(-S/beta) on every off-diagonal cell; with frame divergences well
    // above beta the whole gradient collapses at y = x
    Eigen::MatrixXd peaked = Eigen::MatrixXd::Constant(3, 4, 0.02);
    for (int t = 0; t < 3; ++t) peaked(t, t) = 3.0;
    const SpatioTemporalSeries xp{peaked, geom, ""};
    const Eigen::MatrixXd at_self = sta_gradient(xp, xp, 0.05, *kernel, params);
    CHECK(at_self.cwiseAbs().maxCoeff() <= 1e-6);

    const SpatioTemporalSeries x = random_series(rng, 3, 4, geom, 0.3, 1.2);
    const SpatioTemporalSeries y = random_series(rng, 3, 4, geom, 0.3, 1.2);
    const Eigen::MatrixXd grad = sta_gradient(x, y, beta, *kernel, params);
    const CostProvider provider = CostProvider::sinkhorn(kernel, params);
    const double h = 1e-5;
    for (int t = 0; t < 3; ++t)
        for (int i = 0; i < 4; ++i) {
            SpatioTemporalSeries up = x, dn = x;
            up.data(t, i) += h;
            dn.data(t, i) -= h;
            const double fd = (sta(up, y, beta, provider) - sta(dn, y, beta, provider)) / (2 * h);
            CHECK(std::abs(grad(t, i) - fd) <= 1e-3 * std::max(1.0, std::abs(fd)));
        }

    CHECK_THROWS_AS((void)sta_gradient(x, y, 0.0, *kernel, params), std::domain_error);
}

TEST_CASE("expected alignment approaches pure path counting at large beta") {
    SplitMix64 rng(22);
    auto geom = make_grid(1, 3);
    auto kernel = make_kernel(geom, 0.4);
    const UotParams params = tight_params(0.4, 1.0);
    const SpatioTemporalSeries x = random_series(rng, 3, 3, geom);
    const SpatioTemporalSeries y = random_series(rng, 4, 3, geom);
    const SCostResult cost = s_cost_matrix(x, y, *kernel, params);
    const SoftDtwResult fwd = sdtw_forward(cost.delta, 1e7);
    const Eigen::MatrixXd expected = sdtw_backward(fwd, cost.delta);
    const DelannoyTable table(4, 4);
    const double total = static_cast<double>(table.value(3, 4).as_u64());
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 4; ++j) {
            const double through =
                static_cast<double>((table.value(i, j) * table.value(3 - i + 1, 4 - j + 1)).as_u64());
            CHECK(expected(i - 1, j - 1) == doctest::Approx(through / total).epsilon(1e-5));
        }
}

TEST_CASE("signed modes") {
    SplitMix64 rng(41);
    auto geom = make_grid(1, 3);
    auto kernel = make_kernel(geom, 0.5);
    const UotParams params = tight_params(0.5, 1.0);
    const SpatioTemporalSeries x = random_series(rng, 2, 3, geom);
    const SpatioTemporalSeries y = random_series(rng, 2, 3, geom);

    // nonnegative input: absolute mode is the plain pipeline; the split
    // average has an all-zero negative part, so it halves the costs
    const Eigen::MatrixXd plain = s_cost_matrix(x, y, *kernel, params).delta.values;
    const Eigen::MatrixXd abs_mode =
        signed_s_cost_matrix(x, y, *kernel, params, SignedMode::absolute).delta.values;
    CHECK((plain - abs_mode).cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::MatrixXd split_mode =
        signed_s_cost_matrix(x, y, *kernel, params, SignedMode::split_average).delta.values;
    CHECK((split_mode - 0.5 * plain).cwiseAbs().maxCoeff() <= 1e-9);

    // mirroring the sign swaps the two parts, leaving the split cost unchanged
    SpatioTemporalSeries xm = x, ym = y;
    xm.data = -xm.data;
    ym.data = -ym.data;
    const Eigen::MatrixXd mirrored =
        signed_s_cost_matrix(xm, ym, *kernel, params, SignedMode::split_average).delta.values;
    CHECK((mirrored - split_mode).cwiseAbs().maxCoeff() <= 1e-9);

    // mixed signs stay entrywise nonnegative up to solver noise
    SpatioTemporalSeries xs = x;
    xs.data(0, 1) = -0.8;
    SpatioTemporalSeries ys = y;
    ys.data(1, 2) = -0.4;
    const Eigen::MatrixXd mixed =
        signed_s_cost_matrix(xs, ys, *kernel, params, SignedMode::split_average).delta.values;
    CHECK((mixed.array() >= -1e-8).all());

    CHECK_THROWS_AS((void)sta(xs, ys, 0.1, CostProvider::sinkhorn(kernel, params)),
                    std::domain_error);
}

TEST_CASE("pairwise matrix basics") {
    SplitMix64 rng(43);
    auto geom = make_grid(1, 3);
    auto kernel = make_kernel(geom, 0.5);
    const UotParams params = tight_params(0.5, 1.0);
    const CostProvider provider = CostProvider::sinkhorn(kernel, params);

    std::vector<SpatioTemporalSeries> one{random_series(rng, 3, 3, geom)};
    one[0].label = "only";
    const DissimilarityMatrix m1 = pairwise_matrix(one, 0.2, provider, 1);
    CHECK(m1.values.rows() == 1);
    CHECK(m1.values(0, 0) == doctest::Approx(sta(one[0], one[0], 0.2, provider)).epsilon(1e-12));
    CHECK(m1.labels == std::vector<std::string>{"only"});
    CHECK(m1.failed_pairs == 0);

    CHECK_THROWS_AS((void)pairwise_matrix({}, 0.2, provider, 1), std::domain_error);
}

TEST_CASE("pairwise matrix is deterministic across worker counts") {
    SplitMix64 rng(47);
    auto geom = make_grid(2, 2);
    auto kernel = make_kernel(geom, 0.5);
    const UotParams params = tight_params(0.5, 1.0, 1e-7);
    std::vector<SpatioTemporalSeries> items;
    for (int i = 0; i < 5; ++i) items.push_back(random_series(rng, 3, 4, geom, 0.0, 1.0));

    for (const CostProvider& provider :
         {CostProvider::sinkhorn(kernel, params), CostProvider::squared_euclidean()}) {
        const DissimilarityMatrix a = pairwise_matrix(items, 0.1, provider, 1);
        const DissimilarityMatrix b = pairwise_matrix(items, 0.1, provider, 2);
        const DissimilarityMatrix c = pairwise_matrix(items, 0.1, provider, 8);
        CHECK((a.values.array() == b.values.array()).all());
        CHECK((a.values.array() == c.values.array()).all());
        CHECK((a.values.array() == a.values.transpose().array()).all());
    }
}

TEST_CASE("mass in a different bin costs more, and more so with distance") {
    auto geom = make_grid(1, 8);
    auto kernel = make_kernel(geom, 0.5);
    const UotParams params = tight_params(0.5, 1.0);
    const CostProvider provider = CostProvider::sinkhorn(kernel, params);
    auto unit_series = [&](int bin) {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 8);
        d(0, bin) = 1.0;
        d(1, bin) = 1.0;
        return SpatioTemporalSeries{d, geom, ""};
    };
    const SpatioTemporalSeries base = unit_series(0);
    const double self = sta(base, base, 0.1, provider);
    double prev = self;
    for (int bin = 1; bin <= 3; ++bin) {
        const double v = sta(base, unit_series(bin), 0.1, provider);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("temporal shifts of a moving blob cost more with larger lag") {
    auto geom = make_grid(1, 4);
    auto kernel = make_kernel(geom, 0.5);
    const UotParams params = tight_params(0.5, 1.0);
    const CostProvider provider = CostProvider::sinkhorn(kernel, params);
    const int t_len = 9;
    auto pulse_at = [&](int frame) {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(t_len, 4);
        d(frame - 1, 1) = 1.0;
        return SpatioTemporalSeries{d, geom, ""};
    };
    const SpatioTemporalSeries x = pulse_at(2);
    const double self = sta(x, x, 0.1, provider);
    double prev = self;
    for (int k = 1; k <= 4; ++k) {
        const double v = sta(x, pulse_at(2 + k), 0.1, provider);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("two identical time-constant items give a flat counting matrix") {
    auto geom = make_grid(1, 2);
    auto kernel = make_kernel(geom, 0.5);
    const UotParams params = tight_params(0.5, 1.0);
    Eigen::MatrixXd data(3, 2);
    data << 0.4, 0.6, 0.4, 0.6, 0.4, 0.6;
    const SpatioTemporalSeries item{data, geom, "dup"};
    const double beta = 0.7;
    const DissimilarityMatrix m =
        pairwise_matrix({item, item}, beta, CostProvider::sinkhorn(kernel, params), 1);
    const double want = -beta * std::log(13.0); // D(3,3) equally cheap alignments
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(m.values(i, j) == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("items of different lengths share one matrix") {
    SplitMix64 rng(59);
    auto geom = make_grid(1, 3);
    auto kernel = make_kernel(geom, 0.5);
    const UotParams params = tight_params(0.5, 1.0);
    const CostProvider provider = CostProvider::sinkhorn(kernel, params);
    std::vector<SpatioTemporalSeries> items{random_series(rng, 3, 3, geom),
                                            random_series(rng, 5, 3, geom),
                                            random_series(rng, 4, 3, geom)};
    const DissimilarityMatrix m = pairwise_matrix(items, 0.2, provider, 1);
    CHECK(m.failed_pairs == 0);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            CHECK(m.values(i, j) ==
                  doctest::Approx(sta(items[i], items[j], 0.2, provider)).epsilon(1e-9));
}

TEST_CASE("precomputed cost provider") {
    auto geom = make_grid(1, 2);
    SplitMix64 rng(3);
    const SpatioTemporalSeries x = random_series(rng, 2, 2, geom);
    const SpatioTemporalSeries y = random_series(rng, 3, 2, geom);
    Eigen::MatrixXd costs(2, 3);
    costs << 0.0, 1.0, 2.0, 1.0, 0.0, 1.0;
    const CostProvider provider = CostProvider::from_matrix(costs);
    CHECK(sta(x, y, 0.0, provider) == doctest::Approx(1.0)); // diagonal-ish path
    CHECK_THROWS_AS((void)sta(y, x, 0.0, provider), std::domain_error); // shape mismatch
    CHECK_THROWS_AS((void)pairwise_matrix({x, x}, 0.1, provider, 1), std::domain_error);
}
