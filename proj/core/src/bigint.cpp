#include "rex/bigint.hpp"

#include <cmath>
#include <stdexcept>

namespace rex {

BigUint::BigUint(std::uint64_t v) {
    if (v != 0) limbs_.push_back(v);
}

BigUint BigUint::pow2(unsigned k) {
    BigUint r;
    r.limbs_.assign(k / 64 + 1, 0);
    r.limbs_.back() = std::uint64_t{1} << (k % 64);
    return r;
}

void BigUint::normalize() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

BigUint& BigUint::operator+=(const BigUint& rhs) {
    if (rhs.limbs_.size() > limbs_.size()) limbs_.resize(rhs.limbs_.size(), 0);
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        unsigned __int128 sum = carry + limbs_[i];
        if (i < rhs.limbs_.size()) sum += rhs.limbs_[i];
        limbs_[i] = static_cast<std::uint64_t>(sum);
        carry = sum >> 64;
    }
    if (carry != 0) limbs_.push_back(static_cast<std::uint64_t>(carry));
    return *this;
}

BigUint& BigUint::operator-=(const BigUint& rhs) {
    if (*this < rhs) throw std::underflow_error("BigUint: negative result");
    unsigned __int128 borrow = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        unsigned __int128 need = borrow + (i < rhs.limbs_.size() ? rhs.limbs_[i] : 0);
        unsigned __int128 cur = limbs_[i];
        if (cur >= need) {
            limbs_[i] = static_cast<std::uint64_t>(cur - need);
            borrow = 0;
        } else {
            limbs_[i] = static_cast<std::uint64_t>(cur + (static_cast<unsigned __int128>(1) << 64) - need);
            borrow = 1;
        }
    }
    normalize();
    return *this;
}

BigUint operator*(const BigUint& lhs, const BigUint& rhs) {
    BigUint r;
    if (lhs.is_zero() || rhs.is_zero()) return r;
    r.limbs_.assign(lhs.limbs_.size() + rhs.limbs_.size(), 0);
    for (std::size_t i = 0; i < lhs.limbs_.size(); ++i) {
        unsigned __int128 carry = 0;
        for (std::size_t j = 0; j < rhs.limbs_.size(); ++j) {
            unsigned __int128 cur = static_cast<unsigned __int128>(lhs.limbs_[i]) * rhs.limbs_[j]
                                    + r.limbs_[i + j] + carry;
            r.limbs_[i + j] = static_cast<std::uint64_t>(cur);
            carry = cur >> 64;
        }
        std::size_t k = i + rhs.limbs_.size();
        while (carry != 0) {
            unsigned __int128 cur = carry + r.limbs_[k];
            r.limbs_[k] = static_cast<std::uint64_t>(cur);
            carry = cur >> 64;
            ++k;
        }
    }
    r.normalize();
    return r;
}

bool BigUint::operator<(const BigUint& rhs) const {
    if (limbs_.size() != rhs.limbs_.size()) return limbs_.size() < rhs.limbs_.size();
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        if (limbs_[i] != rhs.limbs_[i]) return limbs_[i] < rhs.limbs_[i];
    }
    return false;
}

unsigned BigUint::bit_length() const {
    if (limbs_.empty()) return 0;
    unsigned top = 64 - static_cast<unsigned>(__builtin_clzll(limbs_.back()));
    return static_cast<unsigned>(limbs_.size() - 1) * 64 + top;
}

std::uint64_t BigUint::as_u64() const {
    if (limbs_.size() > 1) throw std::overflow_error("BigUint: value exceeds 64 bits");
    return limbs_.empty() ? 0 : limbs_[0];
}

double BigUint::to_double() const {
    double r = 0.0;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        r = r * 18446744073709551616.0 + static_cast<double>(limbs_[i]);
    }
    return r;
}

double BigUint::log2() const {
    if (is_zero()) throw std::domain_error("BigUint: log2 of zero");
    unsigned bits = bit_length();
    if (bits <= 1000) return std::log2(to_double());
    // keep the top 128 bits as a mantissa so huge values never overflow a double
    unsigned shift = bits - 128;
    std::size_t limb = shift / 64;
    unsigned off = shift % 64;
    std::uint64_t hi, lo;
    if (off == 0) {
        hi = limbs_[limb + 1];
        lo = limbs_[limb];
    } else {
        hi = (limbs_[limb + 1] >> off) | (limb + 2 < limbs_.size() ? limbs_[limb + 2] << (64 - off) : 0);
        lo = (limbs_[limb] >> off) | (limbs_[limb + 1] << (64 - off));
    }
    double mant = static_cast<double>(hi) * 18446744073709551616.0 + static_cast<double>(lo);
    return std::log2(mant) + static_cast<double>(shift);
}

std::string BigUint::to_string() const {
    if (is_zero()) return "0";
    std::vector<std::uint64_t> work = limbs_;
    std::string out;
    while (!work.empty()) {
        constexpr std::uint64_t kBase = 10000000000000000000ull;  // 10^19
        unsigned __int128 rem = 0;
        for (std::size_t i = work.size(); i-- > 0;) {
            unsigned __int128 cur = (rem << 64) | work[i];
            work[i] = static_cast<std::uint64_t>(cur / kBase);
            rem = cur % kBase;
        }
        while (!work.empty() && work.back() == 0) work.pop_back();
        std::string chunk = std::to_string(static_cast<std::uint64_t>(rem));
        if (work.empty()) {
            out.insert(0, chunk);
        } else {
            out.insert(0, std::string(19 - chunk.size(), '0') + chunk);
        }
    }
    return out;
}

}  // namespace rex
