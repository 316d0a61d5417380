#include "stakit/align.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "stakit/delannoy.hpp"
#include "stakit/errors.hpp"

namespace stakit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

CostMatrix CostMatrix::checked(Eigen::MatrixXd m) {
    if (m.rows() < 1 || m.cols() < 1)
        throw std::domain_error("cost matrix must be at least 1x1");
    if (!m.allFinite()) throw std::domain_error("cost matrix has non-finite entries");
    if ((m.array() < -1e-8).any())
        throw std::domain_error("cost matrix has negative entries beyond noise floor");
    return CostMatrix{std::move(m)};
}

double softmin(std::span<const double> values, double beta) {
    if (values.empty()) throw std::domain_error("softmin of an empty set");
    if (beta < 0.0) throw std::domain_error("softmin requires beta >= 0");
    double lo = kInf;
    for (double v : values) lo = std::min(lo, v);
    if (beta == 0.0 || lo == kInf) return lo;
    double sum = 0.0;
    for (double v : values) sum += std::exp((lo - v) / beta);
    return lo - beta * std::log(sum);
}

double softmin3(double a, double b, double c, double beta) {
    const double lo = std::min(a, std::min(b, c));
    if (beta == 0.0 || lo == kInf) return lo;
    const double sum =
        std::exp((lo - a) / beta) + std::exp((lo - b) / beta) + std::exp((lo - c) / beta);
    return lo - beta * std::log(sum);
}

SoftDtwResult sdtw_forward(const CostMatrix& delta, double beta) {
    if (beta < 0.0) throw std::domain_error("sdtw requires beta >= 0");
    if (delta.values.hasNaN()) throw std::domain_error("cost matrix has NaN entries");
    const Eigen::Index t1 = delta.rows();
    const Eigen::Index t2 = delta.cols();
    Eigen::MatrixXd r(t1 + 1, t2 + 1);
    r.row(0).setConstant(kInf);
    r.col(0).setConstant(kInf);
    r(0, 0) = 0.0;
    for (Eigen::Index i = 1; i <= t1; ++i)
        for (Eigen::Index j = 1; j <= t2; ++j)
            r(i, j) = delta.values(i - 1, j - 1) +
                      softmin3(r(i - 1, j - 1), r(i - 1, j), r(i, j - 1), beta);
    return SoftDtwResult{r(t1, t2), beta, std::move(r)};
}

Eigen::MatrixXd sdtw_backward(const SoftDtwResult& result, const CostMatrix& delta) {
    const double beta = result.beta;
    if (beta <= 0.0)
        throw std::domain_error("soft-DTW gradient is undefined at beta = 0");
    const Eigen::Index t1 = delta.rows();
    const Eigen::Index t2 = delta.cols();
    if (result.table.rows() != t1 + 1 || result.table.cols() != t2 + 1)
        throw std::domain_error("forward table does not match the cost matrix");

    // padded copies: row/column t+1 carry the reverse recursion border
    Eigen::MatrixXd r(t1 + 2, t2 + 2);
    r.setConstant(-kInf);
    r.block(0, 0, t1 + 1, t2 + 1) = result.table;
    r(t1 + 1, t2 + 1) = result.table(t1, t2);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(t1 + 2, t2 + 2);
    d.block(1, 1, t1, t2) = delta.values;

    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(t1 + 2, t2 + 2);
    e(t1 + 1, t2 + 1) = 1.0;
    for (Eigen::Index j = t2; j >= 1; --j) {
        for (Eigen::Index i = t1; i >= 1; --i) {
            const double rij = r(i, j);
            const double wd = std::exp((r(i + 1, j) - rij - d(i + 1, j)) / beta);
            const double wr = std::exp((r(i, j + 1) - rij - d(i, j + 1)) / beta);
            const double wdg = std::exp((r(i + 1, j + 1) - rij - d(i + 1, j + 1)) / beta);
            e(i, j) = wd * e(i + 1, j) + wr * e(i, j + 1) + wdg * e(i + 1, j + 1);
        }
    }
    return e.block(1, 1, t1, t2);
}

Eigen::MatrixXi AlignmentMatrix::to_matrix() const {
    Eigen::MatrixXi m = Eigen::MatrixXi::Zero(rows, cols);
    for (const auto& [i, j] : path) m(i - 1, j - 1) = 1;
    return m;
}

double AlignmentMatrix::cost(const CostMatrix& delta) const {
    double c = 0.0;
    for (const auto& [i, j] : path) c += delta.values(i - 1, j - 1);
    return c;
}

void check_enumeration_guard(int m, int n) {
    if (m < 1 || n < 1) throw std::domain_error("alignment shape must be >= 1x1");
    if (delannoy(m, n) > BigNat(kEnumerationGuard))
        throw capacity_error("alignment enumeration would exceed the path-count guard");
}

std::vector<AlignmentMatrix> enumerate_alignments(int m, int n) {
    std::vector<AlignmentMatrix> out;
    for_each_alignment(m, n, [&](const std::vector<std::pair<int, int>>& path) {
        out.push_back(AlignmentMatrix{m, n, path});
    });
    return out;
}

std::vector<double> alignment_costs(const CostMatrix& delta) {
    const int m = static_cast<int>(delta.rows());
    const int n = static_cast<int>(delta.cols());
    std::vector<double> costs;
    for_each_alignment(m, n, [&](const std::vector<std::pair<int, int>>& path) {
        double c = 0.0;
        for (const auto& [i, j] : path) c += delta.values(i - 1, j - 1);
        costs.push_back(c);
    });
    return costs;
}

double sdtw_bruteforce(const CostMatrix& delta, double beta) {
    const std::vector<double> costs = alignment_costs(delta);
    return softmin(costs, beta);
}

} // namespace stakit
