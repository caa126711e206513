#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rex {

/// Unsigned arbitrary-precision integer, just large enough for exact
/// accepted-string counts (2^N grows past 64 bits around N = 64).
/// Limbs are little-endian base-2^64; the zero value has no limbs.
class BigUint {
public:
    BigUint() = default;
    BigUint(std::uint64_t v);  // NOLINT(google-explicit-constructor)

    static BigUint pow2(unsigned k);

    BigUint& operator+=(const BigUint& rhs);
    BigUint& operator-=(const BigUint& rhs);  // throws on underflow
    friend BigUint operator+(BigUint lhs, const BigUint& rhs) { return lhs += rhs; }
    friend BigUint operator-(BigUint lhs, const BigUint& rhs) { return lhs -= rhs; }
    friend BigUint operator*(const BigUint& lhs, const BigUint& rhs);

    bool operator==(const BigUint& rhs) const { return limbs_ == rhs.limbs_; }
    bool operator!=(const BigUint& rhs) const { return !(*this == rhs); }
    bool operator<(const BigUint& rhs) const;
    bool operator<=(const BigUint& rhs) const { return !(rhs < *this); }
    bool operator>(const BigUint& rhs) const { return rhs < *this; }

    bool is_zero() const { return limbs_.empty(); }
    /// Number of significant bits; 0 for the zero value.
    unsigned bit_length() const;

    bool fits_u64() const { return limbs_.size() <= 1; }
    std::uint64_t as_u64() const;  // throws if the value does not fit

    /// Nearest double (may round above 2^53; infinite past double range).
    double to_double() const;
    /// Base-2 logarithm computed from the top bits; exact for powers of two.
    double log2() const;  // throws on zero

    std::string to_string() const;  // decimal

private:
    void normalize();
    std::vector<std::uint64_t> limbs_;
};

}  // namespace rex
