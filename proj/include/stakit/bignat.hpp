#ifndef STAKIT_BIGNAT_HPP
#define STAKIT_BIGNAT_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace stakit {

/** Arbitrary-precision unsigned integer.
 *
 * Little-endian base-2^64 limbs with no trailing zero limb; an empty limb
 * vector denotes zero. Supports exactly the operations the lattice-path
 * counters need: addition, subtraction of a smaller value, schoolbook
 * multiplication, comparison, and a natural logarithm taken from the top
 * 64 bits (values far beyond double range keep ~1e-16 relative accuracy).
 */
class BigNat {
  public:
    BigNat() = default;
    explicit BigNat(std::uint64_t v);

    static int compare(const BigNat& a, const BigNat& b);
    friend bool operator==(const BigNat& a, const BigNat& b) { return compare(a, b) == 0; }
    friend bool operator!=(const BigNat& a, const BigNat& b) { return compare(a, b) != 0; }
    friend bool operator<(const BigNat& a, const BigNat& b) { return compare(a, b) < 0; }
    friend bool operator<=(const BigNat& a, const BigNat& b) { return compare(a, b) <= 0; }
    friend bool operator>(const BigNat& a, const BigNat& b) { return compare(a, b) > 0; }
    friend bool operator>=(const BigNat& a, const BigNat& b) { return compare(a, b) >= 0; }

    friend BigNat operator+(const BigNat& a, const BigNat& b);
    /// Requires a >= b; throws std::domain_error otherwise.
    friend BigNat operator-(const BigNat& a, const BigNat& b);
    friend BigNat operator*(const BigNat& a, const BigNat& b);
    BigNat& operator+=(const BigNat& other);

    bool is_zero() const { return limbs_.empty(); }
    /// Number of bits in the binary representation; 0 for zero.
    std::size_t bit_length() const;
    /// Natural logarithm; -inf for zero. Uses the top 64 bits plus the
    /// bit length, so it stays accurate where double conversion overflows.
    double log_value() const;
    /// True iff the value fits in a uint64_t.
    bool fits_u64() const { return limbs_.size() <= 1; }
    std::uint64_t as_u64() const;

    /// Decimal representation.
    std::string to_string() const;

  private:
    std::vector<std::uint64_t> limbs_;
    void trim();
};

/// Exact test of  a <= u + v*sqrt(2)  for nonnegative integers a, u, v.
bool leq_plus_sqrt2(const BigNat& a, const BigNat& u, const BigNat& v);

/// Exact test of  u + v*sqrt(2) <= a  for nonnegative integers a, u, v.
bool plus_sqrt2_leq(const BigNat& u, const BigNat& v, const BigNat& a);

/** Exact element of Z[sqrt(2)] over small integers: value = u + v*sqrt(2).
 *
 * Used for the closed-form factors of the off-diagonal inequalities, whose
 * coefficients stay tiny; arithmetic is int64 with 128-bit squaring in the
 * comparison, so no overflow up to |u|,|v| < 2^31.
 */
struct Quad2 {
    long long u = 0;
    long long v = 0;

    friend Quad2 operator+(Quad2 a, Quad2 b) { return {a.u + b.u, a.v + b.v}; }
    friend Quad2 operator-(Quad2 a, Quad2 b) { return {a.u - b.u, a.v - b.v}; }
    friend Quad2 operator*(Quad2 a, Quad2 b) {
        return {a.u * b.u + 2 * a.v * b.v, a.u * b.v + a.v * b.u};
    }
    friend Quad2 operator*(long long s, Quad2 a) { return {s * a.u, s * a.v}; }

    double value() const;
    /// Exact sign of u + v*sqrt(2): -1, 0, or +1.
    int sign() const;

    friend bool operator<=(Quad2 a, Quad2 b) { return (b - a).sign() >= 0; }
    friend bool operator==(Quad2 a, Quad2 b) { return a.u == b.u && a.v == b.v; }
};

} // namespace stakit

#endif
