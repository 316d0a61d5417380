#ifndef STAKIT_TIMESHIFT_HPP
#define STAKIT_TIMESHIFT_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stakit/align.hpp"

namespace stakit {

/** Onset/offset analysis of a univariate series.
 *
 * onset is the first index i with x[i+1] != x[i], offset the last one
 * (1-based, both in [1, T-1]); the fluctuation set is [onset, offset].
 * m and m_prime are the head and tail lengths entering the shift bounds.
 */
struct ShiftProfile {
    int t_len = 0;
    int onset = 0;
    int offset = 0;

    int m() const { return onset; }
    int m_prime() const { return t_len - offset; }
};

/// Profile of x; comparisons use |x[i+1] - x[i]| > tolerance. Throws
/// std::domain_error when the series is constant (no fluctuation index).
ShiftProfile profile(std::span<const double> x, double tolerance = 0.0);

/** Right-shift of the fluctuation window by k steps: the head is padded with
 * x[0] and everything else moves k steps later. k = 0 returns the series
 * unchanged. Requires offset(x) + k <= T - 1 so the shifted offset is still
 * a fluctuation index.
 */
std::vector<double> make_kshift(std::span<const double> x, int k);

/// Literal check of the five temporal-shift clauses for the pair (x, y).
/// Violations are reported rather than reinterpreted; the symmetric-lag
/// clause binds both signs of i - j and rejects e.g. plateau pulses.
struct KShiftCheck {
    bool ok = false;
    std::vector<std::string> violations;
};
KShiftCheck verify_kshift(std::span<const double> x, std::span<const double> y, int k,
                          double tolerance = 0.0);

/// Smallest strictly positive entry of the self cost matrix (squared
/// differences), zeros excluded at 1e-12. Throws std::domain_error when no
/// positive entry exists.
double min_positive_self_cost(std::span<const double> x);

/// Squared-difference cost matrix between two univariate series.
CostMatrix scalar_cost_matrix(std::span<const double> x, std::span<const double> y);

/** Exact census of alignment costs between two series: distinct cost values
 * in ascending order with exact multiplicities, brute-forced over every
 * monotone path. Costs closer than 1e-12 are merged into one class.
 * Guarded by the enumeration capacity limit.
 */
struct ZeroCostCensus {
    std::vector<double> costs;
    std::vector<std::uint64_t> counts;

    std::uint64_t total() const;
    /// Multiplicity of the zero-cost class (0 when the cheapest class is not 0).
    std::uint64_t zero_count() const;
};
ZeroCostCensus census(std::span<const double> x, std::span<const double> y,
                      const std::function<double(double, double)>& delta_fn);
ZeroCostCensus census(std::span<const double> x, std::span<const double> y);

/// One (beta, k) row of the shift-gap experiment.
struct ShiftGapRow {
    double beta = 0.0;
    int k = 0;
    double gap = 0.0;              // sdtw(x, x_{+k}) - sdtw(x, x)
    double log_ratio_bound = 0.0;  // beta * log-ratio - beta / (3T)
    double quadratic_bound = 0.0;  // closed-form lower bound
};

/** Measured shift gaps against both theoretical bounds, one row per (beta, k)
 * with k = 0..k_max, rows ordered by (beta, k). Costs are squared scalar
 * differences. Requires positive betas and k_max <= T - 1 - offset(x).
 */
std::vector<ShiftGapRow> shift_gap_experiment(std::span<const double> x,
                                              std::span<const double> betas, int k_max);

} // namespace stakit

#endif
