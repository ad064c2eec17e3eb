#ifndef CHARP_POLY_HPP
#define CHARP_POLY_HPP

#include "charp/fp.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace charp {

// Exponent multi-index, one slot per ring variable.
using Exponents = std::vector<int>;

// Total-degree-then-lex order on exponent vectors of equal length.
struct DegLexLess {
    bool operator()(const Exponents& a, const Exponents& b) const;
};

int total_degree(const Exponents& e);

// Raised when an operation would produce a term above the configured total-degree cap.
struct DegreeCapExceeded : std::runtime_error {
    explicit DegreeCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Global degree guard. Default 200; the environment variable CHARP_HODGE_MAX_DEGREE
// overrides it at startup, set_degree_cap at runtime.
int degree_cap();
void set_degree_cap(int cap);

// Exact multivariate polynomial over F_p in an ordered list of named variables.
// Invariants: no stored zero coefficients; terms keyed by deg-lex order, so
// equality is structural; every exponent vector has ring().size() slots.
class Poly {
  public:
    using TermMap = std::map<Exponents, std::uint32_t, DegLexLess>;

    Poly() = default;
    Poly(std::uint32_t p, std::vector<std::string> ring);

    static Poly zero(std::uint32_t p, std::vector<std::string> ring);
    static Poly constant(std::uint32_t p, std::vector<std::string> ring, std::int64_t c);
    static Poly variable(std::uint32_t p, std::vector<std::string> ring, const std::string& name);
    static Poly monomial(std::uint32_t p, std::vector<std::string> ring, Exponents e, std::int64_t c);

    std::uint32_t modulus() const { return p_; }
    const std::vector<std::string>& ring() const { return ring_; }
    const TermMap& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    // Constant term as field element.
    Fp constant_term() const;
    int total_degree() const; // -1 for the zero polynomial

    void add_term(const Exponents& e, std::int64_t c);
    std::uint32_t coeff(const Exponents& e) const;

    // Reinterpret in a larger ring (vars must contain ring() as a subsequence).
    Poly embedded_into(const std::vector<std::string>& vars) const;

    friend bool operator==(const Poly& a, const Poly& b);
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
    // Deg-lex order on term lists; used for deterministic sorting only.
    friend bool poly_order_less(const Poly& a, const Poly& b);

    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a);
    Poly& operator+=(const Poly& b) { *this = *this + b; return *this; }
    Poly& operator-=(const Poly& b) { *this = *this - b; return *this; }
    Poly& operator*=(const Poly& b) { *this = *this * b; return *this; }

    Poly scaled(std::int64_t c) const;

    std::string str() const;

  private:
    std::uint32_t p_ = 0;
    std::vector<std::string> ring_;
    TermMap terms_;

    void check_degree_guard(const Exponents& e) const;
};

// d/d(var index i); obeys Leibniz, exact.
Poly derivative(const Poly& a, std::size_t var_index);
Poly derivative(const Poly& a, const std::string& var);

Poly pow(const Poly& a, unsigned e);

// Substitute every variable x -> x^(p^k); ring homomorphism, coefficients fixed.
Poly frobenius_substitute(const Poly& a, int k);
// Same substitution restricted to the given variable indices (relative-Frobenius
// pullback along the base of a product ring).
Poly frobenius_substitute_vars(const Poly& a, const std::vector<std::size_t>& var_indices, int k);

// If every exponent of a is divisible by p, return b with frobenius_substitute(b,1) == a.
std::optional<Poly> poly_pth_power_test(const Poly& a);

// Substitute var -> value (value in the same ring).
Poly substitute(const Poly& a, std::size_t var_index, const Poly& value);

// Union of two variable lists. Shared variables must appear in the same relative
// order in both; otherwise throws (incompatible orders).
std::vector<std::string> merge_rings(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Embed a and b into their merged ring.
std::pair<Poly, Poly> align(const Poly& a, const Poly& b);

// Text form: sum of terms c*x1^e1*...*xn^en with +/- and whitespace.
Poly parse_poly(std::uint32_t p, const std::vector<std::string>& ring, const std::string& text);

} // namespace charp

#endif
