#pragma once

// GF(2^N) arithmetic, 1 <= N <= 16. Elements are bit patterns of polynomial
// coefficients (bit k = coefficient of x^k); addition is XOR, multiplication
// is a carry-less product reduced modulo a fixed irreducible polynomial.

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace liminfo {

using FieldElement = std::uint32_t;

namespace detail {

inline std::uint64_t clmul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = 0;
    while (b) {
        if (b & 1) r ^= a;
        a <<= 1;
        b >>= 1;
    }
    return r;
}

inline int degree(std::uint64_t p) { return p ? 63 - std::countl_zero(p) : -1; }

inline std::uint64_t poly_mod(std::uint64_t a, std::uint64_t m) {
    const int dm = degree(m);
    for (int da = degree(a); da >= dm; da = degree(a)) a ^= m << (da - dm);
    return a;
}

inline bool is_irreducible(std::uint64_t p) {
    const int d = degree(p);
    if (d < 1) return false;
    for (std::uint64_t q = 2; degree(q) <= d / 2; ++q) {
        if (poly_mod(p, q) == 0) return false;
    }
    return true;
}

}  // namespace detail

/// Lexicographically least irreducible polynomial of degree n over GF(2),
/// leading term included (n=2 -> 0b111, n=4 -> 0b10011).
inline std::uint32_t least_irreducible(int n) {
    if (n < 1 || n > 16) throw std::invalid_argument("field degree must lie in [1, 16]");
    for (std::uint64_t p = std::uint64_t{1} << n;; ++p)
        if (detail::is_irreducible(p)) return static_cast<std::uint32_t>(p);
}

class GF2N {
public:
    explicit GF2N(int n) : n_(n), modulus_(least_irreducible(n)) {}

    int degree() const { return n_; }
    std::uint32_t modulus() const { return modulus_; }
    std::uint32_t size() const { return std::uint32_t{1} << n_; }

    bool contains(FieldElement a) const { return a < size(); }

    FieldElement add(FieldElement a, FieldElement b) const { return a ^ b; }

    FieldElement mul(FieldElement a, FieldElement b) const {
        check(a);
        check(b);
        return static_cast<FieldElement>(detail::poly_mod(detail::clmul(a, b), modulus_));
    }

    FieldElement pow(FieldElement a, std::uint64_t e) const {
        FieldElement r = 1, base = a;
        while (e) {
            if (e & 1) r = mul(r, base);
            base = mul(base, base);
            e >>= 1;
        }
        return r;
    }

    /// a^(2^N - 2).
    FieldElement inv(FieldElement a) const {
        if (a == 0) throw std::domain_error("inverse of zero in GF(2^" + std::to_string(n_) + ")");
        return pow(a, size() - 2);
    }

private:
    void check(FieldElement a) const {
        if (!contains(a)) throw std::out_of_range("element outside GF(2^" + std::to_string(n_) + ")");
    }

    int n_;
    std::uint32_t modulus_;
};

}  // namespace liminfo
