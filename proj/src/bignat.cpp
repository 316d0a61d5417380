#include "stakit/bignat.hpp"

#include <cmath>
#include <stdexcept>

namespace stakit {

BigNat::BigNat(std::uint64_t v) {
    if (v != 0) limbs_.push_back(v);
}

void BigNat::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

int BigNat::compare(const BigNat& a, const BigNat& b) {
    if (a.limbs_.size() != b.limbs_.size())
        return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
    for (std::size_t i = a.limbs_.size(); i-- > 0;) {
        if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
    }
    return 0;
}

BigNat operator+(const BigNat& a, const BigNat& b) {
    BigNat r = a;
    r += b;
    return r;
}

BigNat& BigNat::operator+=(const BigNat& other) {
    const std::size_t n = std::max(limbs_.size(), other.limbs_.size());
    limbs_.resize(n, 0);
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
        unsigned __int128 s = carry + limbs_[i];
        if (i < other.limbs_.size()) s += other.limbs_[i];
        limbs_[i] = static_cast<std::uint64_t>(s);
        carry = s >> 64;
    }
    if (carry) limbs_.push_back(static_cast<std::uint64_t>(carry));
    return *this;
}

BigNat operator-(const BigNat& a, const BigNat& b) {
    if (a < b) throw std::domain_error("BigNat subtraction would underflow");
    BigNat r;
    r.limbs_.resize(a.limbs_.size(), 0);
    std::uint64_t borrow = 0;
    for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
        const std::uint64_t bi = i < b.limbs_.size() ? b.limbs_[i] : 0;
        const std::uint64_t ai = a.limbs_[i];
        std::uint64_t d = ai - bi - borrow;
        borrow = (ai < bi + borrow || (bi == UINT64_MAX && borrow)) ? 1 : 0;
        r.limbs_[i] = d;
    }
    r.trim();
    return r;
}

BigNat operator*(const BigNat& a, const BigNat& b) {
    BigNat r;
    if (a.is_zero() || b.is_zero()) return r;
    r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
        unsigned __int128 carry = 0;
        for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
            unsigned __int128 cur = r.limbs_[i + j];
            cur += static_cast<unsigned __int128>(a.limbs_[i]) * b.limbs_[j];
            cur += carry;
            r.limbs_[i + j] = static_cast<std::uint64_t>(cur);
            carry = cur >> 64;
        }
        std::size_t k = i + b.limbs_.size();
        while (carry) {
            unsigned __int128 cur = static_cast<unsigned __int128>(r.limbs_[k]) + carry;
            r.limbs_[k] = static_cast<std::uint64_t>(cur);
            carry = cur >> 64;
            ++k;
        }
    }
    r.trim();
    return r;
}

std::size_t BigNat::bit_length() const {
    if (limbs_.empty()) return 0;
    std::size_t bits = (limbs_.size() - 1) * 64;
    std::uint64_t top = limbs_.back();
    while (top) {
        ++bits;
        top >>= 1;
    }
    return bits;
}

double BigNat::log_value() const {
    if (limbs_.empty()) return -std::numeric_limits<double>::infinity();
    const std::size_t bits = bit_length();
    if (bits <= 64) return std::log(static_cast<double>(limbs_[0]));
    // top 64 bits as mantissa, remainder as a power-of-two exponent
    const std::size_t shift = bits - 64;
    const std::size_t limb = shift / 64;
    const unsigned off = static_cast<unsigned>(shift % 64);
    std::uint64_t m = limbs_[limb] >> off;
    if (off != 0 && limb + 1 < limbs_.size()) m |= limbs_[limb + 1] << (64 - off);
    return std::log(static_cast<double>(m)) + static_cast<double>(shift) * M_LN2;
}

std::uint64_t BigNat::as_u64() const {
    if (limbs_.size() > 1) throw std::domain_error("BigNat does not fit in 64 bits");
    return limbs_.empty() ? 0 : limbs_[0];
}

std::string BigNat::to_string() const {
    if (limbs_.empty()) return "0";
    // repeated divmod by 1e18 on a copy of the limbs
    std::vector<std::uint64_t> work = limbs_;
    constexpr std::uint64_t base = 1000000000000000000ull;
    std::string out;
    while (!work.empty()) {
        unsigned __int128 rem = 0;
        for (std::size_t i = work.size(); i-- > 0;) {
            unsigned __int128 cur = (rem << 64) | work[i];
            work[i] = static_cast<std::uint64_t>(cur / base);
            rem = cur % base;
        }
        while (!work.empty() && work.back() == 0) work.pop_back();
        std::string chunk = std::to_string(static_cast<std::uint64_t>(rem));
        if (!work.empty()) chunk.insert(0, 18 - chunk.size(), '0');
        out.insert(0, chunk);
    }
    return out;
}

bool leq_plus_sqrt2(const BigNat& a, const BigNat& u, const BigNat& v) {
    if (a <= u) return true;
    const BigNat d = a - u;
    return d * d <= BigNat(2) * (v * v);
}

bool plus_sqrt2_leq(const BigNat& u, const BigNat& v, const BigNat& a) {
    if (u > a) return false;
    const BigNat d = a - u;
    return BigNat(2) * (v * v) <= d * d;
}

double Quad2::value() const {
    return static_cast<double>(u) + static_cast<double>(v) * M_SQRT2;
}

int Quad2::sign() const {
    if (u == 0 && v == 0) return 0;
    if (u >= 0 && v >= 0) return 1;
    if (u <= 0 && v <= 0) return -1;
    const __int128 uu = static_cast<__int128>(u) * u;
    const __int128 vv = 2 * static_cast<__int128>(v) * v;
    if (u > 0) return uu >= vv ? 1 : -1; // u > 0 > v: sign of u^2 - 2v^2
    return vv >= uu ? 1 : -1;            // v > 0 > u: sign of 2v^2 - u^2
}

} // namespace stakit
