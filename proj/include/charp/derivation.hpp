#ifndef CHARP_DERIVATION_HPP
#define CHARP_DERIVATION_HPP

#include "charp/poly.hpp"

#include <string>
#include <vector>

namespace charp {

// A k-derivation on F_p[ring], determined by its values on the generators.
// apply() is the Leibniz-linear extension: D(a) = sum_i values[i] * da/dx_i.
struct DerivationOp {
    std::uint32_t p = 0;
    std::vector<std::string> ring;
    std::vector<Poly> values; // values[i] = D(ring[i])

    DerivationOp() = default;
    DerivationOp(std::uint32_t p_, std::vector<std::string> ring_);
    DerivationOp(std::uint32_t p_, std::vector<std::string> ring_, std::vector<Poly> values_);

    static DerivationOp zero(std::uint32_t p, std::vector<std::string> ring);
    // The coordinate field d/d(ring[i]).
    static DerivationOp coordinate(std::uint32_t p, std::vector<std::string> ring, std::size_t i);

    bool is_zero() const;
    void set_value(const std::string& var, const Poly& v);
    const Poly& value(std::size_t i) const { return values[i]; }

    friend bool operator==(const DerivationOp& a, const DerivationOp& b);
    friend bool operator!=(const DerivationOp& a, const DerivationOp& b) { return !(a == b); }

    std::string str() const;
};

Poly apply(const DerivationOp& D, const Poly& a);

DerivationOp operator+(const DerivationOp& a, const DerivationOp& b);
DerivationOp operator-(const DerivationOp& a, const DerivationOp& b);
DerivationOp operator-(const DerivationOp& a);
// Module action c*D.
DerivationOp operator*(const Poly& c, const DerivationOp& D);

DerivationOp lie_bracket(const DerivationOp& a, const DerivationOp& b);

// Honest p-th power: D composed with itself p times (a derivation by Hochschild).
DerivationOp p_power(const DerivationOp& D);
// n-fold iterate of p_power ([p]^n).
DerivationOp p_power_iterate(const DerivationOp& D, int n);

// Hochschild identity (c*D)^p = c^p*D^p + ((c*D)^(p-1)(c))*D, with witnesses.
struct SemilinearityReport {
    bool ok = false;
    DerivationOp lhs;
    DerivationOp rhs;
};
SemilinearityReport p_power_semilinearity_check(const DerivationOp& D, const Poly& c);

// Derivation-valued polynomial in a formal parameter t; carrier for extracting
// the universal Lie polynomials from ad(t*D1 + D2)^(p-1)(D1).
struct TDerivation {
    std::vector<DerivationOp> coeffs; // coeffs[k] multiplies t^k

    void trim();
};

TDerivation ad_action(const DerivationOp& D1, const DerivationOp& D2, const TDerivation& X);

// Jacobson formula: (D1+D2)^p = D1^p + D2^p + sum s_i, where i*s_i is the
// t^(i-1) coefficient of ad(t*D1 + D2)^(p-1)(D1). residual must vanish.
struct JacobsonDecomposition {
    std::vector<DerivationOp> s; // s[i-1] = s_i, i = 1..p-1
    DerivationOp residual;
};
JacobsonDecomposition jacobson_decompose(const DerivationOp& D1, const DerivationOp& D2);

// Text form: `D: x1 -> <poly>; x2 -> <poly>` (unlisted generators map to 0).
DerivationOp parse_derivation(std::uint32_t p, const std::vector<std::string>& ring, const std::string& text);

} // namespace charp

#endif
