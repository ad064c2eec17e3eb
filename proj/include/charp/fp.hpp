#ifndef CHARP_FP_HPP
#define CHARP_FP_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace charp {

// Element of the prime field F_p. The modulus travels with the value; mixing
// moduli is a programming error and throws.
struct Fp {
    std::uint32_t p = 0;
    std::uint32_t v = 0;

    Fp() = default;
    Fp(std::uint32_t p_, std::int64_t value) : p(p_) {
        if (p_ < 2) throw std::invalid_argument("Fp: modulus must be >= 2");
        std::int64_t r = value % static_cast<std::int64_t>(p_);
        if (r < 0) r += p_;
        v = static_cast<std::uint32_t>(r);
    }

    bool is_zero() const { return v == 0; }

    friend bool operator==(const Fp& a, const Fp& b) { return a.p == b.p && a.v == b.v; }
    friend bool operator!=(const Fp& a, const Fp& b) { return !(a == b); }
};

namespace fp_detail {
inline void require_same(const Fp& a, const Fp& b) {
    if (a.p != b.p) throw std::invalid_argument("Fp: mixed moduli " + std::to_string(a.p) + " and " + std::to_string(b.p));
}
} // namespace fp_detail

inline std::uint32_t add_mod(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
    std::uint64_t s = static_cast<std::uint64_t>(a) + b;
    if (s >= p) s -= p;
    return static_cast<std::uint32_t>(s);
}
inline std::uint32_t sub_mod(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
    return a >= b ? a - b : static_cast<std::uint32_t>(a + static_cast<std::uint64_t>(p) - b);
}
inline std::uint32_t mul_mod(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) % p);
}
inline std::uint32_t pow_mod(std::uint32_t a, std::uint64_t e, std::uint32_t p) {
    std::uint32_t r = 1 % p;
    std::uint32_t base = a % p;
    while (e) {
        if (e & 1) r = mul_mod(r, base, p);
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    return r;
}
// Inverse by Fermat; p prime throughout the library.
inline std::uint32_t inv_mod(std::uint32_t a, std::uint32_t p) {
    if (a % p == 0) throw std::domain_error("inv_mod: zero is not invertible");
    return pow_mod(a, p - 2, p);
}

inline Fp operator+(const Fp& a, const Fp& b) { fp_detail::require_same(a, b); return Fp(a.p, add_mod(a.v, b.v, a.p)); }
inline Fp operator-(const Fp& a, const Fp& b) { fp_detail::require_same(a, b); return Fp(a.p, sub_mod(a.v, b.v, a.p)); }
inline Fp operator*(const Fp& a, const Fp& b) { fp_detail::require_same(a, b); return Fp(a.p, mul_mod(a.v, b.v, a.p)); }
inline Fp operator-(const Fp& a) { return Fp(a.p, sub_mod(0, a.v, a.p)); }
inline Fp inverse(const Fp& a) { return Fp(a.p, inv_mod(a.v, a.p)); }

inline bool is_prime(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

} // namespace charp

#endif
