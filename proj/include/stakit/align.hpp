#ifndef STAKIT_ALIGN_HPP
#define STAKIT_ALIGN_HPP

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

namespace stakit {

/// Pairwise temporal cost matrix (T1 x T2). Entries are cost units: squared
/// distances or divergence values. Divergence-sourced entries may carry
/// negative noise at solver-tolerance scale, anything below -1e-8 is rejected.
struct CostMatrix {
    Eigen::MatrixXd values;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }

    /// Validating factory: finite entries, >= -1e-8, at least 1x1.
    static CostMatrix checked(Eigen::MatrixXd m);
};

/** Soft minimum of a nonempty set with smoothing beta >= 0.
 *
 * beta > 0: -beta * log(sum exp(-a/beta)), computed with a min shift so the
 * dominant term never underflows. beta = 0: plain minimum. +inf entries are
 * honored as absent elements (weight 0); the result is +inf only when every
 * entry is.
 */
double softmin(std::span<const double> values, double beta);

/// Three-way softmin, the inner operation of the Bellman recursion.
double softmin3(double a, double b, double c, double beta);

struct SoftDtwResult {
    double value;          // r(T1, T2)
    double beta;
    Eigen::MatrixXd table; // (T1+1) x (T2+1) Bellman table, +inf border, r(0,0)=0
};

/// Forward Bellman recursion r(i,j) = delta(i,j) + softmin of the three
/// predecessors. O(T1*T2). Throws std::domain_error on NaN costs.
SoftDtwResult sdtw_forward(const CostMatrix& delta, double beta);

/** Backward pass: the gradient E of the soft-DTW value with respect to every
 * cost entry, equivalently the softmin-weighted expectation of alignment
 * matrices. Requires the result of sdtw_forward on the same costs with
 * beta > 0; beta = 0 is non-differentiable and rejected.
 */
Eigen::MatrixXd sdtw_backward(const SoftDtwResult& result, const CostMatrix& delta);

/// One monotone alignment path from (1,1) to (rows, cols), 1-based cells.
struct AlignmentMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::pair<int, int>> path;

    /// Dense binary representation; entry (i,j) = 1 iff the path visits it.
    Eigen::MatrixXi to_matrix() const;
    /// Sum of the cost entries the path visits.
    double cost(const CostMatrix& delta) const;
};

/// Largest path count enumeration accepts.
inline constexpr std::uint64_t kEnumerationGuard = 10000000;

/// Throws capacity_error when D(m, n) exceeds the enumeration guard.
void check_enumeration_guard(int m, int n);

namespace detail {
template <class F>
void enumerate_rec(int m, int n, int i, int j, std::vector<std::pair<int, int>>& path, F&& fn) {
    if (i == m && j == n) {
        fn(path);
        return;
    }
    // step order: right < down < diagonal, giving lexicographic path order
    if (j < n) {
        path.emplace_back(i, j + 1);
        enumerate_rec(m, n, i, j + 1, path, fn);
        path.pop_back();
    }
    if (i < m) {
        path.emplace_back(i + 1, j);
        enumerate_rec(m, n, i + 1, j, path, fn);
        path.pop_back();
    }
    if (i < m && j < n) {
        path.emplace_back(i + 1, j + 1);
        enumerate_rec(m, n, i + 1, j + 1, path, fn);
        path.pop_back();
    }
}
} // namespace detail

/// Visits every monotone path in lexicographic step order without
/// materializing the list. Same guard as enumerate_alignments.
template <class F>
void for_each_alignment(int m, int n, F&& fn) {
    check_enumeration_guard(m, n);
    std::vector<std::pair<int, int>> path;
    path.reserve(static_cast<std::size_t>(m) + n);
    path.emplace_back(1, 1);
    detail::enumerate_rec(m, n, 1, 1, path, fn);
}

/// Exhaustive, duplicate-free list of all monotone paths, lexicographic by
/// steps. Guarded by kEnumerationGuard (capacity_error beyond).
std::vector<AlignmentMatrix> enumerate_alignments(int m, int n);

/// All alignment costs <A, delta> in enumeration order; the brute-force
/// oracle's raw material.
std::vector<double> alignment_costs(const CostMatrix& delta);

/// Direct softmin over every enumerated alignment cost. Test oracle for
/// sdtw_forward; same guard as enumeration.
double sdtw_bruteforce(const CostMatrix& delta, double beta);

} // namespace stakit

#endif
