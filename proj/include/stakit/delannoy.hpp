#ifndef STAKIT_DELANNOY_HPP
#define STAKIT_DELANNOY_HPP

#include <cmath>
#include <cstdint>

#include "stakit/bignat.hpp"

namespace stakit {

/// c = 1 + sqrt(2), the growth base of the central lattice-path counts.
inline double silver_ratio() { return 1.0 + M_SQRT2; }

/** Exact table of lattice-path counts D(m, n).
 *
 * D(m, n) counts the monotone paths from (1,1) to (m,n) using right, down
 * and diagonal steps, with the shifted indexing D(1,1) = 1. Built once via
 * the three-term recursion in arbitrary precision; immutable afterwards, so
 * concurrent readers are safe.
 */
class DelannoyTable {
  public:
    DelannoyTable(int max_m, int max_n);

    int max_m() const { return max_m_; }
    int max_n() const { return max_n_; }

    /// D(m, n), 1-based; throws std::out_of_range beyond the built extent.
    const BigNat& value(int m, int n) const;

    /// Natural log of D(m, n); exact-integer source, ~1e-16 relative.
    double log_value(int m, int n) const { return value(m, n).log_value(); }

  private:
    int max_m_;
    int max_n_;
    std::vector<BigNat> counts_;
};

/// Exact D(m, n) through a locally built table; convenient for small m, n.
BigNat delannoy(int m, int n);

/// Verifies m*D(m+1) = (6m-3)*D(m) - (m-1)*D(m-1) exactly for 2 <= m <= m_max.
bool central_delannoy_recursion_check(int m_max);
bool central_delannoy_recursion_check(const DelannoyTable& table, int m_max);

/// Verifies D(m+1) <= (3 + 2*sqrt(2)) * D(m) exactly for 1 <= m <= m_max.
bool growth_check(int m_max);
bool growth_check(const DelannoyTable& table, int m_max);

/// Off-diagonal damping factor, in (0, 1]:
///   phi(m, k) = 1 - ((1 - 1/c)(k - 1) + 1/c) / (m + k - 1).
double phi(int m, int k);

/// Off-diagonal growth factor, >= 1:
///   psi(m, k) = 1 + (1 - 1/c)(k - 1) / m.
double psi(int m, int k);

/// Exact numerator of phi(m, k) over denominator (m + k - 1), in Z[sqrt2].
Quad2 phi_numerator(int m, int k);
/// Exact numerator of psi(m, k) over denominator m, in Z[sqrt2].
Quad2 psi_numerator(int m, int k);

/** Exact check of both off-diagonal inequalities over the sweep range:
 *   A(m, k):  D(m, m+k) <= c * phi(m, k) * D(m, m+k-1)
 *   B(m, k):  c * psi(m, k) * D(m, m+k) <= D(m+1, m+k)
 * Comparisons are carried out in Z[sqrt2] on the exact integer counts, so
 * the equality-adjacent cases cannot be misreported by rounding.
 */
bool offdiagonal_inequality_check(int m_max, int k_max);
bool offdiagonal_inequality_check(const DelannoyTable& table, int m_max, int k_max);

/// Exact check of the chained factor inequalities
///   c*psi(m,k+1)*phi(m,k+1) <= 1/c + psi(m,k) + phi(m,k+1) <= c*phi(m+1,k)*psi(m,k)
/// over the sweep range.
bool technical_lemma_check(int m_max, int k_max);

/// Per-cell slack report used by the CLI sweep dump. Slacks are relative
/// (ratio minus one), so they stay finite for counts far beyond double range.
struct OffdiagSlack {
    double slack_a;     // c*phi*D(m,m+k-1) / D(m,m+k) - 1, >= 0 when A holds
    double slack_b;     // D(m+1,m+k) / (c*psi*D(m,m+k)) - 1, >= 0 when B holds
    double slack_lemma; // min slack of the two factor inequalities
    bool a_holds;       // exact verdicts
    bool b_holds;
    bool lemma_holds;
};
OffdiagSlack offdiagonal_slack(const DelannoyTable& table, int m, int k);

struct LogRatioBound {
    double log_ratio;     // log( D(m,m) D(m',m') / (D(m+k,m) D(m'-k,m')) )
    double product_bound; // log( prod_{i=1..k} psi(m'-i, i) / phi(m, i) )
};

/** Exact log-ratio of diagonal-to-shifted path counts and its closed-form
 * lower bound. Requires k <= m' - 1 so every index stays >= 1; k = 0 gives
 * {0, 0}. Throws std::domain_error on infeasible k.
 */
LogRatioBound log_ratio_bound(const DelannoyTable& table, int m, int m_prime, int k);
LogRatioBound log_ratio_bound(int m, int m_prime, int k);

/// alpha = (2 - sqrt(2))/2 * (1/m' + 1/(m + m')), the quadratic coefficient.
double shift_alpha(int m, int m_prime);

/// rho = (3*sqrt(2) - 4) / (3T), the linear coefficient.
double shift_rho(int t_len);

/// Closed-form lower bound beta*alpha*k*(k-1) + beta*rho*k on the shift gap.
double quadratic_bound(double beta, int m, int m_prime, int t_len, int k);

/** Largest admissible smoothing for the shift theorem:
 *   mu / log(3 T D(T, T)),
 * with log D taken from the exact integer. Throws std::domain_error unless
 * mu > 0 and T >= 2.
 */
double beta_threshold(double mu, int t_len);
double beta_threshold(double mu, int t_len, const DelannoyTable& table);

} // namespace stakit

#endif
