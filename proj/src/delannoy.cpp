#include "stakit/delannoy.hpp"

#include <cmath>
#include <stdexcept>

namespace stakit {

DelannoyTable::DelannoyTable(int max_m, int max_n) : max_m_(max_m), max_n_(max_n) {
    if (max_m < 1 || max_n < 1) throw std::domain_error("DelannoyTable extent must be >= 1");
    counts_.resize(static_cast<std::size_t>(max_m) * max_n);
    auto at = [&](int m, int n) -> BigNat& {
        return counts_[static_cast<std::size_t>(m - 1) * max_n_ + (n - 1)];
    };
    for (int n = 1; n <= max_n; ++n) at(1, n) = BigNat(1);
    for (int m = 1; m <= max_m; ++m) at(m, 1) = BigNat(1);
    for (int m = 2; m <= max_m; ++m)
        for (int n = 2; n <= max_n; ++n)
            at(m, n) = at(m - 1, n) + at(m, n - 1) + at(m - 1, n - 1);
}

const BigNat& DelannoyTable::value(int m, int n) const {
    if (m < 1 || n < 1 || m > max_m_ || n > max_n_)
        throw std::out_of_range("Delannoy index outside built table");
    return counts_[static_cast<std::size_t>(m - 1) * max_n_ + (n - 1)];
}

BigNat delannoy(int m, int n) {
    if (m < 1 || n < 1) throw std::domain_error("Delannoy indices must be >= 1");
    return DelannoyTable(m, n).value(m, n);
}

bool central_delannoy_recursion_check(const DelannoyTable& table, int m_max) {
    if (m_max < 2) throw std::domain_error("central recursion check needs m_max >= 2");
    for (int m = 2; m <= m_max; ++m) {
        // m*D(m+1) + (m-1)*D(m-1) == (6m-3)*D(m), rearranged to stay nonnegative
        const BigNat lhs = BigNat(static_cast<std::uint64_t>(m)) * table.value(m + 1, m + 1) +
                           BigNat(static_cast<std::uint64_t>(m - 1)) * table.value(m - 1, m - 1);
        const BigNat rhs =
            BigNat(static_cast<std::uint64_t>(6 * m - 3)) * table.value(m, m);
        if (lhs != rhs) return false;
    }
    return true;
}

bool central_delannoy_recursion_check(int m_max) {
    return central_delannoy_recursion_check(DelannoyTable(m_max + 1, m_max + 1), m_max);
}

bool growth_check(const DelannoyTable& table, int m_max) {
    if (m_max < 1) throw std::domain_error("growth check needs m_max >= 1");
    for (int m = 1; m <= m_max; ++m) {
        // D(m+1) <= 3*D(m) + 2*D(m)*sqrt(2), exactly
        const BigNat& dm = table.value(m, m);
        if (!leq_plus_sqrt2(table.value(m + 1, m + 1), BigNat(3) * dm, BigNat(2) * dm))
            return false;
    }
    return true;
}

bool growth_check(int m_max) {
    return growth_check(DelannoyTable(m_max + 1, m_max + 1), m_max);
}

double phi(int m, int k) {
    if (m < 1 || k < 1) throw std::domain_error("phi requires m, k >= 1");
    const double inv_c = 1.0 / silver_ratio();
    return 1.0 - ((1.0 - inv_c) * (k - 1) + inv_c) / (m + k - 1);
}

double psi(int m, int k) {
    if (m < 1 || k < 1) throw std::domain_error("psi requires m, k >= 1");
    const double inv_c = 1.0 / silver_ratio();
    return 1.0 + (1.0 - inv_c) * (k - 1) / m;
}

Quad2 phi_numerator(int m, int k) {
    // phi(m,k) = ((m - k + 2) + (k - 2) sqrt2) / (m + k - 1)
    return {m - k + 2, k - 2};
}

Quad2 psi_numerator(int m, int k) {
    // psi(m,k) = ((m + 2k - 2) - (k - 1) sqrt2) / m
    return {m + 2 * k - 2, -(k - 1)};
}

bool offdiagonal_inequality_check(const DelannoyTable& table, int m_max, int k_max) {
    if (m_max < 1 || k_max < 1) throw std::domain_error("sweep bounds must be >= 1");
    for (int m = 1; m <= m_max; ++m) {
        for (int k = 1; k <= k_max; ++k) {
            const BigNat& d = table.value(m, m + k);       // D(m, m+k)
            const BigNat& d_left = table.value(m, m + k - 1);
            const BigNat& d_down = table.value(m + 1, m + k);
            // A: (m+k-1) D(m,m+k) <= ((m+k-2) + m sqrt2) D(m,m+k-1)
            if (!leq_plus_sqrt2(BigNat(static_cast<std::uint64_t>(m + k - 1)) * d,
                                BigNat(static_cast<std::uint64_t>(m + k - 2)) * d_left,
                                BigNat(static_cast<std::uint64_t>(m)) * d_left))
                return false;
            // B: (m + (m+k-1) sqrt2) D(m,m+k) <= m D(m+1,m+k)
            if (!plus_sqrt2_leq(BigNat(static_cast<std::uint64_t>(m)) * d,
                                BigNat(static_cast<std::uint64_t>(m + k - 1)) * d,
                                BigNat(static_cast<std::uint64_t>(m)) * d_down))
                return false;
        }
    }
    return true;
}

bool offdiagonal_inequality_check(int m_max, int k_max) {
    return offdiagonal_inequality_check(DelannoyTable(m_max + 1, m_max + k_max), m_max, k_max);
}

bool technical_lemma_check(int m_max, int k_max) {
    if (m_max < 1 || k_max < 1) throw std::domain_error("sweep bounds must be >= 1");
    const Quad2 c{1, 1};
    const Quad2 inv_c{-1, 1}; // 1/c = sqrt2 - 1
    for (int m = 1; m <= m_max; ++m) {
        for (int k = 1; k <= k_max; ++k) {
            // all terms scaled by m*(m+k) > 0
            const long long scale = static_cast<long long>(m) * (m + k);
            const Quad2 left = c * psi_numerator(m, k + 1) * phi_numerator(m, k + 1);
            const Quad2 mid = scale * inv_c +
                              static_cast<long long>(m + k) * psi_numerator(m, k) +
                              static_cast<long long>(m) * phi_numerator(m, k + 1);
            const Quad2 right = c * phi_numerator(m + 1, k) * psi_numerator(m, k);
            if (!(left <= mid) || !(mid <= right)) return false;
        }
    }
    return true;
}

OffdiagSlack offdiagonal_slack(const DelannoyTable& table, int m, int k) {
    OffdiagSlack s{};
    const double c = silver_ratio();
    const double d = table.value(m, m + k).log_value();
    const double d_left = table.value(m, m + k - 1).log_value();
    const double d_down = table.value(m + 1, m + k).log_value();
    s.slack_a = c * phi(m, k) * std::exp(d_left - d) - 1.0;
    s.slack_b = std::exp(d_down - d) / (c * psi(m, k)) - 1.0;
    const Quad2 qc{1, 1};
    const Quad2 inv_c{-1, 1};
    const long long scale = static_cast<long long>(m) * (m + k);
    const Quad2 left = qc * psi_numerator(m, k + 1) * phi_numerator(m, k + 1);
    const Quad2 mid = scale * inv_c + static_cast<long long>(m + k) * psi_numerator(m, k) +
                      static_cast<long long>(m) * phi_numerator(m, k + 1);
    const Quad2 right = qc * phi_numerator(m + 1, k) * psi_numerator(m, k);
    s.slack_lemma = std::min((mid - left).value(), (right - mid).value()) / scale;
    s.lemma_holds = (left <= mid) && (mid <= right);
    const BigNat& dmk = table.value(m, m + k);
    const BigNat& dl = table.value(m, m + k - 1);
    const BigNat& dd = table.value(m + 1, m + k);
    s.a_holds = leq_plus_sqrt2(BigNat(static_cast<std::uint64_t>(m + k - 1)) * dmk,
                               BigNat(static_cast<std::uint64_t>(m + k - 2)) * dl,
                               BigNat(static_cast<std::uint64_t>(m)) * dl);
    s.b_holds = plus_sqrt2_leq(BigNat(static_cast<std::uint64_t>(m)) * dmk,
                               BigNat(static_cast<std::uint64_t>(m + k - 1)) * dmk,
                               BigNat(static_cast<std::uint64_t>(m)) * dd);
    return s;
}

LogRatioBound log_ratio_bound(const DelannoyTable& table, int m, int m_prime, int k) {
    if (m < 1 || m_prime < 1) throw std::domain_error("log_ratio_bound requires m, m' >= 1");
    if (k < 0 || k > m_prime - 1)
        throw std::domain_error("log_ratio_bound requires 0 <= k <= m' - 1");
    if (k == 0) return {0.0, 0.0};
    const double log_ratio = table.log_value(m, m) + table.log_value(m_prime, m_prime) -
                             table.log_value(m + k, m) - table.log_value(m_prime - k, m_prime);
    double bound = 0.0;
    for (int i = 1; i <= k; ++i)
        bound += std::log(psi(m_prime - i, i)) - std::log(phi(m, i));
    return {log_ratio, bound};
}

LogRatioBound log_ratio_bound(int m, int m_prime, int k) {
    const int extent = std::max(m + k, m_prime);
    return log_ratio_bound(DelannoyTable(extent, extent), m, m_prime, k);
}

double shift_alpha(int m, int m_prime) {
    if (m < 1 || m_prime < 1) throw std::domain_error("shift_alpha requires m, m' >= 1");
    return (2.0 - M_SQRT2) / 2.0 * (1.0 / m_prime + 1.0 / (m + m_prime));
}

double shift_rho(int t_len) {
    if (t_len < 1) throw std::domain_error("shift_rho requires T >= 1");
    return (3.0 * M_SQRT2 - 4.0) / (3.0 * t_len);
}

double quadratic_bound(double beta, int m, int m_prime, int t_len, int k) {
    if (beta <= 0.0) throw std::domain_error("quadratic_bound requires beta > 0");
    if (k < 1 || k > t_len - 1) throw std::domain_error("quadratic_bound requires 1 <= k <= T-1");
    return beta * shift_alpha(m, m_prime) * k * (k - 1.0) + beta * shift_rho(t_len) * k;
}

double beta_threshold(double mu, int t_len, const DelannoyTable& table) {
    if (mu <= 0.0) throw std::domain_error("beta_threshold requires mu > 0");
    if (t_len < 2) throw std::domain_error("beta_threshold requires T >= 2");
    return mu / (std::log(3.0 * t_len) + table.log_value(t_len, t_len));
}

double beta_threshold(double mu, int t_len) {
    if (t_len < 2) throw std::domain_error("beta_threshold requires T >= 2");
    return beta_threshold(mu, t_len, DelannoyTable(t_len, t_len));
}

} // namespace stakit
