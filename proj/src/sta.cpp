#include "stakit/sta.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "stakit/errors.hpp"

namespace stakit {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::MatrixXd sq_euclid_cost(const Eigen::MatrixXd& x_frames, const Eigen::MatrixXd& y_frames) {
    Eigen::MatrixXd d(x_frames.rows(), y_frames.rows());
    for (Eigen::Index i = 0; i < x_frames.rows(); ++i)
        for (Eigen::Index j = 0; j < y_frames.rows(); ++j)
            d(i, j) = (x_frames.row(i) - y_frames.row(j)).squaredNorm();
    return d;
}
} // namespace

void SpatioTemporalSeries::validate(bool allow_signed) const {
    if (data.rows() < 1 || data.cols() < 1)
        throw std::domain_error("series needs at least one frame and one bin");
    if (!data.allFinite()) throw std::domain_error("series has non-finite entries");
    if (!allow_signed && (data.array() < 0.0).any())
        throw std::domain_error("series has negative entries; use a signed mode");
    if (geometry && geometry->p != p())
        throw std::domain_error("series bin count does not match its geometry");
}

CostProvider CostProvider::squared_euclidean() {
    CostProvider p;
    p.kind = Kind::squared_euclidean;
    return p;
}

CostProvider CostProvider::sinkhorn(std::shared_ptr<const GibbsKernel> kernel, UotParams params) {
    if (!kernel) throw std::domain_error("divergence cost provider needs a kernel");
    CostProvider p;
    p.kind = Kind::sinkhorn_divergence;
    p.kernel = std::move(kernel);
    p.params = params;
    return p;
}

CostProvider CostProvider::from_matrix(Eigen::MatrixXd delta) {
    CostProvider p;
    p.kind = Kind::precomputed;
    p.precomputed = std::move(delta);
    return p;
}

SelfCache compute_self_cache(const Eigen::MatrixXd& frames_t_by_p, const GibbsKernel& kernel,
                             const UotParams& params) {
    const SinkhornBatch batch =
        sinkhorn_symmetric_batch(frames_t_by_p.transpose(), kernel, params);
    SelfCache cache;
    cache.log_c = batch.log_a;
    cache.mass = batch.mass;
    cache.converged = batch.converged;
    for (Eigen::Index j = 0; j < batch.iterations.size(); ++j)
        cache.iterations += static_cast<std::uint64_t>(batch.iterations[j]);
    return cache;
}

SCostResult s_cost_matrix_cached(const Eigen::MatrixXd& x_frames, const Eigen::MatrixXd& y_frames,
                                 const SelfCache& cache_x, const SelfCache& cache_y,
                                 const GibbsKernel& kernel, const UotParams& params,
                                 bool keep_scalings) {
    const Eigen::Index t1 = x_frames.rows();
    const Eigen::Index t2 = y_frames.rows();
    const Eigen::Index p = x_frames.cols();
    if (y_frames.cols() != p || kernel.k.rows() != p)
        throw std::domain_error("frame width does not match the kernel");
    const Eigen::Index n = t1 * t2;

    Eigen::MatrixXd xb(p, n), yb(p, n), warm_a(p, n), warm_b(p, n);
    for (Eigen::Index i = 0; i < t1; ++i)
        for (Eigen::Index j = 0; j < t2; ++j) {
            const Eigen::Index col = i * t2 + j;
            xb.col(col) = x_frames.row(i).transpose();
            yb.col(col) = y_frames.row(j).transpose();
            warm_a.col(col) = cache_x.log_c.col(i);
            warm_b.col(col) = cache_y.log_c.col(j);
        }
    SinkhornBatch batch =
        sinkhorn_unbalanced_batch(xb, yb, kernel, params, &warm_a, &warm_b);

    SCostResult out;
    const double scale = params.epsilon + 2.0 * params.gamma;
    Eigen::MatrixXd s(t1, t2);
    for (Eigen::Index i = 0; i < t1; ++i)
        for (Eigen::Index j = 0; j < t2; ++j) {
            const Eigen::Index col = i * t2 + j;
            s(i, j) = scale * (0.5 * cache_x.mass[i] + 0.5 * cache_y.mass[j] - batch.mass[col]);
            const bool bad = !batch.converged[static_cast<std::size_t>(col)] ||
                             !cache_x.converged[static_cast<std::size_t>(i)] ||
                             !cache_y.converged[static_cast<std::size_t>(j)];
            if (bad) ++out.failed_entries;
        }
    out.delta = CostMatrix{std::move(s)};
    for (Eigen::Index c = 0; c < batch.iterations.size(); ++c)
        out.solver_iterations += static_cast<std::uint64_t>(batch.iterations[c]);
    if (keep_scalings) out.cross_log_a = std::move(batch.log_a);
    return out;
}

SCostResult s_cost_matrix(const SpatioTemporalSeries& x, const SpatioTemporalSeries& y,
                          const GibbsKernel& kernel, const UotParams& params) {
    x.validate();
    y.validate();
    const SelfCache cache_x = compute_self_cache(x.data, kernel, params);
    const SelfCache cache_y = compute_self_cache(y.data, kernel, params);
    SCostResult out = s_cost_matrix_cached(x.data, y.data, cache_x, cache_y, kernel, params);
    out.solver_iterations += cache_x.iterations + cache_y.iterations;
    return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> split_signed_parts(const Eigen::MatrixXd& frames) {
    Eigen::MatrixXd pos = frames.cwiseMax(0.0);
    Eigen::MatrixXd neg = (-frames).cwiseMax(0.0);
    return {std::move(pos), std::move(neg)};
}

SCostResult signed_s_cost_matrix(const SpatioTemporalSeries& x, const SpatioTemporalSeries& y,
                                 const GibbsKernel& kernel, const UotParams& params,
                                 SignedMode mode) {
    x.validate(true);
    y.validate(true);
    if (mode == SignedMode::none) return s_cost_matrix(x, y, kernel, params);
    if (mode == SignedMode::absolute) {
        SpatioTemporalSeries xa{x.data.cwiseAbs(), x.geometry, x.label};
        SpatioTemporalSeries ya{y.data.cwiseAbs(), y.geometry, y.label};
        return s_cost_matrix(xa, ya, kernel, params);
    }
    // split-average: delta = (S(x+, y+) + S(x-, y-)) / 2
    auto [xp, xn] = split_signed_parts(x.data);
    auto [yp, yn] = split_signed_parts(y.data);
    SpatioTemporalSeries xps{std::move(xp), x.geometry, x.label};
    SpatioTemporalSeries yps{std::move(yp), y.geometry, y.label};
    SpatioTemporalSeries xns{std::move(xn), x.geometry, x.label};
    SpatioTemporalSeries yns{std::move(yn), y.geometry, y.label};
    SCostResult pos = s_cost_matrix(xps, yps, kernel, params);
    SCostResult neg = s_cost_matrix(xns, yns, kernel, params);
    SCostResult out;
    out.delta = CostMatrix{0.5 * (pos.delta.values + neg.delta.values)};
    out.failed_entries = pos.failed_entries + neg.failed_entries;
    out.solver_iterations = pos.solver_iterations + neg.solver_iterations;
    return out;
}

namespace {

SCostResult provider_cost(const SpatioTemporalSeries& x, const SpatioTemporalSeries& y,
                          const CostProvider& provider) {
    switch (provider.kind) {
        case CostProvider::Kind::squared_euclidean: {
            const bool signed_ok = provider.signed_mode != SignedMode::none;
            x.validate(signed_ok);
            y.validate(signed_ok);
            if (provider.signed_mode == SignedMode::split_average)
                throw std::domain_error(
                    "split-average mode is defined for divergence costs only");
            Eigen::MatrixXd xd =
                provider.signed_mode == SignedMode::absolute ? x.data.cwiseAbs() : x.data;
            Eigen::MatrixXd yd =
                provider.signed_mode == SignedMode::absolute ? y.data.cwiseAbs() : y.data;
            if (xd.cols() != yd.cols())
                throw std::domain_error("series dimensions do not match");
            SCostResult r;
            r.delta = CostMatrix{sq_euclid_cost(xd, yd)};
            return r;
        }
        case CostProvider::Kind::sinkhorn_divergence:
            if (!provider.kernel) throw std::domain_error("cost provider has no kernel");
            return signed_s_cost_matrix(x, y, *provider.kernel, provider.params,
                                        provider.signed_mode);
        case CostProvider::Kind::precomputed: {
            if (provider.precomputed.rows() != x.t_len() ||
                provider.precomputed.cols() != y.t_len())
                throw std::domain_error("precomputed cost matrix shape mismatch");
            SCostResult r;
            r.delta = CostMatrix::checked(provider.precomputed);
            return r;
        }
    }
    throw std::logic_error("unreachable cost provider kind");
}

} // namespace

StaResult sta_full(const SpatioTemporalSeries& x, const SpatioTemporalSeries& y, double beta,
                   const CostProvider& provider) {
    if (beta < 0.0) throw std::domain_error("sta requires beta >= 0");
    StaResult r;
    r.cost = provider_cost(x, y, provider);
    r.alignment = sdtw_forward(r.cost.delta, beta);
    r.value = r.alignment.value;
    return r;
}

double sta(const SpatioTemporalSeries& x, const SpatioTemporalSeries& y, double beta,
           const CostProvider& provider) {
    return sta_full(x, y, beta, provider).value;
}

Eigen::MatrixXd sta_gradient(const SpatioTemporalSeries& x, const SpatioTemporalSeries& y,
                             double beta, const GibbsKernel& kernel, const UotParams& params) {
    if (beta <= 0.0) throw std::domain_error("sta gradient is undefined at beta = 0");
    x.validate();
    y.validate();
    if ((x.data.array() <= 0.0).any() || (y.data.array() <= 0.0).any())
        throw std::domain_error("sta gradient requires strictly positive data");
    const SelfCache cache_x = compute_self_cache(x.data, kernel, params);
    const SelfCache cache_y = compute_self_cache(y.data, kernel, params);
    const SCostResult cost =
        s_cost_matrix_cached(x.data, y.data, cache_x, cache_y, kernel, params, true);
    const SoftDtwResult fwd = sdtw_forward(cost.delta, beta);
    const Eigen::MatrixXd expected = sdtw_backward(fwd, cost.delta);

    const Eigen::Index t1 = x.t_len();
    const Eigen::Index t2 = y.t_len();
    const double rate = params.epsilon / params.gamma;
    Eigen::MatrixXd grad(t1, x.p());
    for (Eigen::Index t = 0; t < t1; ++t) {
        Eigen::VectorXd c_pow = (-rate * cache_x.log_c.col(t).array()).exp().matrix();
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(x.p());
        double weight_sum = 0.0;
        for (Eigen::Index j = 0; j < t2; ++j) {
            const double w = expected(t, j);
            weight_sum += w;
            acc += w * (-rate * cost.cross_log_a.col(t * t2 + j).array()).exp().matrix();
        }
        grad.row(t) = (params.gamma * (weight_sum * c_pow - acc)).transpose();
    }
    return grad;
}

DissimilarityMatrix pairwise_matrix(const std::vector<SpatioTemporalSeries>& items, double beta,
                                    const CostProvider& provider, int threads) {
    if (items.empty()) throw std::domain_error("pairwise matrix of an empty dataset");
    if (provider.kind == CostProvider::Kind::precomputed)
        throw std::domain_error("precomputed costs cannot drive a dataset run");
    const auto t_start = std::chrono::steady_clock::now();

    const int n_items = static_cast<int>(items.size());
    const bool signed_ok = provider.signed_mode != SignedMode::none;
    const int p = items.front().p();
    for (const SpatioTemporalSeries& s : items) {
        s.validate(signed_ok);
        if (s.p() != p) throw std::domain_error("items disagree on the number of bins");
    }
    const bool use_divergence = provider.kind == CostProvider::Kind::sinkhorn_divergence;
    if (use_divergence) {
        if (!provider.kernel) throw std::domain_error("cost provider has no kernel");
        if (provider.kernel->p() != p)
            throw std::domain_error("kernel size does not match the items");
    }

    // preprocessed frame data per item (and per sign part in split mode)
    const bool split = provider.signed_mode == SignedMode::split_average;
    std::vector<Eigen::MatrixXd> frames_pos(items.size());
    std::vector<Eigen::MatrixXd> frames_neg;
    if (split) frames_neg.resize(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (split) {
            auto [pos, neg] = split_signed_parts(items[i].data);
            frames_pos[i] = std::move(pos);
            frames_neg[i] = std::move(neg);
        } else if (provider.signed_mode == SignedMode::absolute) {
            frames_pos[i] = items[i].data.cwiseAbs();
        } else {
            frames_pos[i] = items[i].data;
        }
    }

    // sequential pre-pass: one symmetric solve per item frame
    std::uint64_t cache_iterations = 0;
    std::vector<SelfCache> cache_pos, cache_neg;
    if (use_divergence) {
        cache_pos.resize(items.size());
        if (split) cache_neg.resize(items.size());
        for (std::size_t i = 0; i < items.size(); ++i) {
            cache_pos[i] = compute_self_cache(frames_pos[i], *provider.kernel, provider.params);
            cache_iterations += cache_pos[i].iterations;
            if (split) {
                cache_neg[i] =
                    compute_self_cache(frames_neg[i], *provider.kernel, provider.params);
                cache_iterations += cache_neg[i].iterations;
            }
        }
    }

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(n_items) * (n_items + 1) / 2);
    for (int i = 0; i < n_items; ++i)
        for (int j = i; j < n_items; ++j) pairs.emplace_back(i, j);

    DissimilarityMatrix out;
    out.values.setZero(n_items, n_items);
    std::atomic<std::size_t> next{0};
    std::atomic<std::uint64_t> iter_total{0};
    std::atomic<int> failed_total{0};

    auto run_pair = [&](int i, int j) {
        double value = kNaN;
        std::uint64_t iters = 0;
        bool failed = false;
        try {
            if (use_divergence) {
                SCostResult cost = s_cost_matrix_cached(frames_pos[i], frames_pos[j],
                                                        cache_pos[i], cache_pos[j],
                                                        *provider.kernel, provider.params);
                iters += cost.solver_iterations;
                if (split) {
                    SCostResult neg = s_cost_matrix_cached(frames_neg[i], frames_neg[j],
                                                           cache_neg[i], cache_neg[j],
                                                           *provider.kernel, provider.params);
                    iters += neg.solver_iterations;
                    cost.delta.values = 0.5 * (cost.delta.values + neg.delta.values);
                    cost.failed_entries += neg.failed_entries;
                }
                if (cost.failed_entries > 0)
                    failed = true;
                else
                    value = sdtw_forward(cost.delta, beta).value;
            } else {
                CostMatrix delta{sq_euclid_cost(frames_pos[i], frames_pos[j])};
                value = sdtw_forward(delta, beta).value;
            }
        } catch (const std::exception&) {
            failed = true;
        }
        if (failed) ++failed_total;
        iter_total += iters;
        out.values(i, j) = value;
    };

    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = std::min<int>(n_threads, static_cast<int>(pairs.size()));
    if (n_threads <= 1) {
        for (const auto& [i, j] : pairs) run_pair(i, j);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(n_threads));
        for (int w = 0; w < n_threads; ++w)
            workers.emplace_back([&]() {
                for (;;) {
                    const std::size_t idx = next.fetch_add(1);
                    if (idx >= pairs.size()) return;
                    run_pair(pairs[idx].first, pairs[idx].second);
                }
            });
        for (std::thread& t : workers) t.join();
    }

    // mirror the upper triangle; each unordered pair was computed once
    for (int i = 0; i < n_items; ++i)
        for (int j = i + 1; j < n_items; ++j) out.values(j, i) = out.values(i, j);

    out.labels.reserve(items.size());
    for (const SpatioTemporalSeries& s : items) out.labels.push_back(s.label);
    out.beta = beta;
    out.cost_kind = use_divergence ? "sinkhorn-divergence" : "squared-euclidean";
    out.epsilon = provider.params.epsilon;
    out.gamma = provider.params.gamma;
    out.tol = provider.params.tol;
    out.max_iter = provider.params.max_iter;
    out.failed_pairs = failed_total.load();
    out.solver_iterations = iter_total.load() + cache_iterations;
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

} // namespace stakit
