#include "stakit/timeshift.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stakit/delannoy.hpp"
#include "stakit/errors.hpp"

namespace stakit {

ShiftProfile profile(std::span<const double> x, double tolerance) {
    const int t_len = static_cast<int>(x.size());
    if (t_len < 2) throw std::domain_error("profile requires a series of length >= 2");
    if (tolerance < 0.0) throw std::domain_error("profile tolerance must be >= 0");
    int onset = 0;
    int offset = 0;
    for (int i = 1; i <= t_len - 1; ++i) {
        if (std::abs(x[i] - x[i - 1]) > tolerance) {
            if (onset == 0) onset = i;
            offset = i;
        }
    }
    if (onset == 0) throw std::domain_error("constant series has no onset");
    return ShiftProfile{t_len, onset, offset};
}

std::vector<double> make_kshift(std::span<const double> x, int k) {
    if (k < 0) throw std::domain_error("shift amount must be >= 0");
    std::vector<double> y(x.begin(), x.end());
    if (k == 0) return y;
    const ShiftProfile p = profile(x);
    if (p.offset + k > p.t_len - 1)
        throw std::domain_error("infeasible shift: offset + k exceeds T - 1");
    for (int i = 0; i < p.t_len; ++i) y[i] = i < k ? x[0] : x[i - k];
    return y;
}

KShiftCheck verify_kshift(std::span<const double> x, std::span<const double> y, int k,
                          double tolerance) {
    KShiftCheck check;
    if (x.size() != y.size()) {
        check.violations.push_back("length mismatch");
        return check;
    }
    if (k < 1) {
        check.violations.push_back("shift amount must be >= 1");
        return check;
    }
    ShiftProfile px;
    ShiftProfile py;
    try {
        px = profile(x, tolerance);
        py = profile(y, tolerance);
    } catch (const std::domain_error&) {
        check.violations.push_back("constant series has no shift profile");
        return check;
    }
    auto eq = [&](double a, double b) { return std::abs(a - b) <= tolerance; };
    auto all_pairs_agree = [&](int i0, int i1, int j0, int j1) {
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j)
                if (!eq(x[i - 1], y[j - 1])) return false;
        return true;
    };
    auto lag_pairs_agree = [&]() {
        for (int i = px.onset; i <= px.offset; ++i)
            for (int j = py.onset; j <= py.offset; ++j)
                if (std::abs(i - j) == k && !eq(x[i - 1], y[j - 1])) return false;
        return true;
    };
    if (py.onset != px.onset + k)
        check.violations.push_back("onset(y) != onset(x) + k");
    if (py.offset != px.offset + k)
        check.violations.push_back("offset(y) != offset(x) + k");
    // heads are constant on [1, onset]; tails on [offset+1, T] (the offset
    // index itself still carries the last fluctuating value)
    if (!all_pairs_agree(1, px.onset, 1, py.onset))
        check.violations.push_back("head values disagree");
    if (!all_pairs_agree(px.offset + 1, px.t_len, py.offset + 1, py.t_len))
        check.violations.push_back("tail values disagree");
    if (!lag_pairs_agree())
        check.violations.push_back("fluctuation values at lag k disagree");
    check.ok = check.violations.empty();
    return check;
}

double min_positive_self_cost(std::span<const double> x) {
    double mu = std::numeric_limits<double>::infinity();
    for (double a : x)
        for (double b : x) {
            const double d = (a - b) * (a - b);
            if (d > 1e-12) mu = std::min(mu, d);
        }
    if (!std::isfinite(mu))
        throw std::domain_error("series has no positive self-cost entry");
    return mu;
}

CostMatrix scalar_cost_matrix(std::span<const double> x, std::span<const double> y) {
    Eigen::MatrixXd d(x.size(), y.size());
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
            const double diff = x[i] - y[j];
            d(i, j) = diff * diff;
        }
    return CostMatrix{std::move(d)};
}

namespace {

// depth-first walk of the alignment lattice with an incrementally
// maintained path cost; one callback per complete path
void census_rec(const Eigen::MatrixXd& d, Eigen::Index i, Eigen::Index j, double cost,
                std::vector<double>& out) {
    const Eigen::Index m = d.rows() - 1;
    const Eigen::Index n = d.cols() - 1;
    if (i == m && j == n) {
        out.push_back(cost);
        return;
    }
    if (j < n) census_rec(d, i, j + 1, cost + d(i, j + 1), out);
    if (i < m) census_rec(d, i + 1, j, cost + d(i + 1, j), out);
    if (i < m && j < n) census_rec(d, i + 1, j + 1, cost + d(i + 1, j + 1), out);
}

} // namespace

ZeroCostCensus census(std::span<const double> x, std::span<const double> y,
                      const std::function<double(double, double)>& delta_fn) {
    const int t1 = static_cast<int>(x.size());
    const int t2 = static_cast<int>(y.size());
    check_enumeration_guard(t1, t2);
    Eigen::MatrixXd d(t1, t2);
    for (int i = 0; i < t1; ++i)
        for (int j = 0; j < t2; ++j) d(i, j) = delta_fn(x[i], y[j]);

    std::vector<double> costs;
    census_rec(d, 0, 0, d(0, 0), costs);
    std::sort(costs.begin(), costs.end());

    ZeroCostCensus out;
    std::size_t i = 0;
    while (i < costs.size()) {
        const double head = costs[i];
        std::uint64_t n = 0;
        while (i < costs.size() && costs[i] - head <= 1e-12) {
            ++n;
            ++i;
        }
        out.costs.push_back(head);
        out.counts.push_back(n);
    }
    return out;
}

ZeroCostCensus census(std::span<const double> x, std::span<const double> y) {
    return census(x, y, [](double a, double b) { return (a - b) * (a - b); });
}

std::uint64_t ZeroCostCensus::total() const {
    std::uint64_t s = 0;
    for (std::uint64_t n : counts) s += n;
    return s;
}

std::uint64_t ZeroCostCensus::zero_count() const {
    if (costs.empty() || std::abs(costs.front()) > 1e-12) return 0;
    return counts.front();
}

std::vector<ShiftGapRow> shift_gap_experiment(std::span<const double> x,
                                              std::span<const double> betas, int k_max) {
    const ShiftProfile p = profile(x);
    if (k_max < 0 || p.offset + k_max > p.t_len - 1)
        throw std::domain_error("infeasible k_max: offset + k_max exceeds T - 1");
    for (double b : betas)
        if (b <= 0.0) throw std::domain_error("shift experiment requires positive betas");

    const int t_len = p.t_len;
    const DelannoyTable table(t_len, t_len);

    // self values once per beta, shifted series once per k
    std::vector<double> self_values(betas.size());
    const CostMatrix self_cost = scalar_cost_matrix(x, x);
    for (std::size_t b = 0; b < betas.size(); ++b)
        self_values[b] = sdtw_forward(self_cost, betas[b]).value;

    std::vector<ShiftGapRow> rows;
    rows.reserve(betas.size() * static_cast<std::size_t>(k_max + 1));
    for (std::size_t b = 0; b < betas.size(); ++b) {
        const double beta = betas[b];
        rows.push_back(ShiftGapRow{beta, 0, 0.0, 0.0, 0.0});
        for (int k = 1; k <= k_max; ++k) {
            const std::vector<double> y = make_kshift(x, k);
            const double val = sdtw_forward(scalar_cost_matrix(x, y), beta).value;
            ShiftGapRow row;
            row.beta = beta;
            row.k = k;
            row.gap = val - self_values[b];
            const LogRatioBound lr = log_ratio_bound(table, p.m(), p.m_prime(), k);
            row.log_ratio_bound = beta * lr.log_ratio - beta / (3.0 * t_len);
            row.quadratic_bound = quadratic_bound(beta, p.m(), p.m_prime(), t_len, k);
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace stakit
