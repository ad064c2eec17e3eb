#include "charp/poly.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <sstream>

namespace charp {

bool DegLexLess::operator()(const Exponents& a, const Exponents& b) const {
    int da = total_degree(a);
    int db = total_degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

int total_degree(const Exponents& e) {
    int d = 0;
    for (int x : e) d += x;
    return d;
}

namespace {
std::atomic<int> g_degree_cap{[] {
    if (const char* env = std::getenv("CHARP_HODGE_MAX_DEGREE")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 200;
}()};
} // namespace

int degree_cap() { return g_degree_cap.load(); }
void set_degree_cap(int cap) {
    if (cap < 1) throw std::invalid_argument("degree cap must be positive");
    g_degree_cap.store(cap);
}

Poly::Poly(std::uint32_t p, std::vector<std::string> ring) : p_(p), ring_(std::move(ring)) {
    if (p < 2) throw std::invalid_argument("Poly: modulus must be >= 2");
}

Poly Poly::zero(std::uint32_t p, std::vector<std::string> ring) { return Poly(p, std::move(ring)); }

Poly Poly::constant(std::uint32_t p, std::vector<std::string> ring, std::int64_t c) {
    Poly r(p, std::move(ring));
    r.add_term(Exponents(r.ring_.size(), 0), c);
    return r;
}

Poly Poly::variable(std::uint32_t p, std::vector<std::string> ring, const std::string& name) {
    Poly r(p, std::move(ring));
    auto it = std::find(r.ring_.begin(), r.ring_.end(), name);
    if (it == r.ring_.end()) throw std::invalid_argument("Poly::variable: '" + name + "' not in ring");
    Exponents e(r.ring_.size(), 0);
    e[static_cast<std::size_t>(it - r.ring_.begin())] = 1;
    r.add_term(e, 1);
    return r;
}

Poly Poly::monomial(std::uint32_t p, std::vector<std::string> ring, Exponents e, std::int64_t c) {
    Poly r(p, std::move(ring));
    if (e.size() != r.ring_.size()) throw std::invalid_argument("Poly::monomial: exponent arity mismatch");
    r.add_term(e, c);
    return r;
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && total_degree() == 0);
}

Fp Poly::constant_term() const {
    Exponents e(ring_.size(), 0);
    return Fp(p_, coeff(e));
}

int Poly::total_degree() const {
    if (terms_.empty()) return -1;
    // deg-lex keyed map: the last key has maximal total degree
    return charp::total_degree(terms_.rbegin()->first);
}

void Poly::check_degree_guard(const Exponents& e) const {
    int d = charp::total_degree(e);
    if (d > degree_cap())
        throw DegreeCapExceeded("total degree " + std::to_string(d) + " exceeds cap " + std::to_string(degree_cap()));
}

void Poly::add_term(const Exponents& e, std::int64_t c) {
    if (e.size() != ring_.size()) throw std::invalid_argument("Poly::add_term: exponent arity mismatch");
    for (int x : e)
        if (x < 0) throw std::invalid_argument("Poly::add_term: negative exponent");
    check_degree_guard(e);
    std::int64_t r = c % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    if (r == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, static_cast<std::uint32_t>(r));
    if (!inserted) {
        it->second = add_mod(it->second, static_cast<std::uint32_t>(r), p_);
        if (it->second == 0) terms_.erase(it);
    }
}

std::uint32_t Poly::coeff(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0u : it->second;
}

Poly Poly::embedded_into(const std::vector<std::string>& vars) const {
    if (vars == ring_) return *this;
    std::vector<std::size_t> slot(ring_.size());
    for (std::size_t i = 0; i < ring_.size(); ++i) {
        auto it = std::find(vars.begin(), vars.end(), ring_[i]);
        if (it == vars.end())
            throw std::invalid_argument("Poly::embedded_into: variable '" + ring_[i] + "' missing from target ring");
        slot[i] = static_cast<std::size_t>(it - vars.begin());
    }
    Poly r(p_, vars);
    for (const auto& [e, c] : terms_) {
        Exponents ne(vars.size(), 0);
        for (std::size_t i = 0; i < e.size(); ++i) ne[slot[i]] = e[i];
        r.add_term(ne, c);
    }
    return r;
}

bool operator==(const Poly& a, const Poly& b) {
    return a.p_ == b.p_ && a.ring_ == b.ring_ && a.terms_ == b.terms_;
}

bool poly_order_less(const Poly& a, const Poly& b) {
    auto ia = a.terms_.begin();
    auto ib = b.terms_.begin();
    DegLexLess less;
    for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
        if (less(ia->first, ib->first)) return true;
        if (less(ib->first, ia->first)) return false;
        if (ia->second != ib->second) return ia->second < ib->second;
    }
    return ia == a.terms_.end() && ib != b.terms_.end();
}

namespace {
void require_compatible(const Poly& a, const Poly& b) {
    if (a.modulus() != b.modulus())
        throw std::invalid_argument("Poly: mixed moduli " + std::to_string(a.modulus()) + " and " + std::to_string(b.modulus()));
}
} // namespace

std::vector<std::string> merge_rings(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a == b) return a;
    // two-pointer merge; shared variables must occur in the same relative order
    std::vector<std::string> out;
    std::size_t i = 0, j = 0;
    auto in_rest = [](const std::vector<std::string>& v, std::size_t from, const std::string& name) {
        return std::find(v.begin() + static_cast<std::ptrdiff_t>(from), v.end(), name) != v.end();
    };
    while (i < a.size() || j < b.size()) {
        if (i == a.size()) { out.push_back(b[j++]); continue; }
        if (j == b.size()) { out.push_back(a[i++]); continue; }
        if (a[i] == b[j]) { out.push_back(a[i]); ++i; ++j; continue; }
        bool a_in_b = in_rest(b, j, a[i]);
        bool b_in_a = in_rest(a, i, b[j]);
        if (a_in_b && b_in_a)
            throw std::invalid_argument("merge_rings: variables '" + a[i] + "' and '" + b[j] + "' are ordered incompatibly");
        if (!a_in_b) out.push_back(a[i++]);
        else out.push_back(b[j++]);
    }
    for (std::size_t k = 0; k < out.size(); ++k)
        for (std::size_t l = k + 1; l < out.size(); ++l)
            if (out[k] == out[l]) throw std::invalid_argument("merge_rings: duplicate variable '" + out[k] + "'");
    return out;
}

std::pair<Poly, Poly> align(const Poly& a, const Poly& b) {
    require_compatible(a, b);
    if (a.ring() == b.ring()) return {a, b};
    auto u = merge_rings(a.ring(), b.ring());
    return {a.embedded_into(u), b.embedded_into(u)};
}

Poly operator+(const Poly& a, const Poly& b) {
    auto [x, y] = align(a, b);
    Poly r = x;
    for (const auto& [e, c] : y.terms()) r.add_term(e, c);
    return r;
}

Poly operator-(const Poly& a, const Poly& b) {
    auto [x, y] = align(a, b);
    Poly r = x;
    for (const auto& [e, c] : y.terms()) r.add_term(e, -static_cast<std::int64_t>(c));
    return r;
}

Poly operator-(const Poly& a) { return a.scaled(-1); }

Poly Poly::scaled(std::int64_t c) const {
    Poly r(p_, ring_);
    std::int64_t cc = c % static_cast<std::int64_t>(p_);
    if (cc < 0) cc += p_;
    if (cc == 0) return r;
    for (const auto& [e, v] : terms_)
        r.add_term(e, static_cast<std::int64_t>(mul_mod(v, static_cast<std::uint32_t>(cc), p_)));
    return r;
}

Poly operator*(const Poly& a, const Poly& b) {
    auto [x, y] = align(a, b);
    Poly r(x.modulus(), x.ring());
    Exponents e(x.ring().size());
    for (const auto& [ea, ca] : x.terms()) {
        for (const auto& [eb, cb] : y.terms()) {
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, static_cast<std::int64_t>(mul_mod(ca, cb, x.modulus())));
        }
    }
    return r;
}

Poly derivative(const Poly& a, std::size_t var_index) {
    if (var_index >= a.ring().size()) throw std::invalid_argument("derivative: variable index out of range");
    Poly r(a.modulus(), a.ring());
    for (const auto& [e, c] : a.terms()) {
        if (e[var_index] == 0) continue;
        std::uint32_t k = static_cast<std::uint32_t>(e[var_index]) % a.modulus();
        if (k == 0) continue;
        Exponents ne = e;
        --ne[var_index];
        r.add_term(ne, static_cast<std::int64_t>(mul_mod(c, k, a.modulus())));
    }
    return r;
}

Poly derivative(const Poly& a, const std::string& var) {
    auto it = std::find(a.ring().begin(), a.ring().end(), var);
    if (it == a.ring().end()) throw std::invalid_argument("derivative: '" + var + "' not in ring");
    return derivative(a, static_cast<std::size_t>(it - a.ring().begin()));
}

Poly pow(const Poly& a, unsigned e) {
    Poly r = Poly::constant(a.modulus(), a.ring(), 1);
    Poly base = a;
    while (e) {
        if (e & 1) r = r * base;
        if (e > 1) base = base * base;
        e >>= 1;
    }
    return r;
}

Poly frobenius_substitute(const Poly& a, int k) {
    std::vector<std::size_t> all(a.ring().size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return frobenius_substitute_vars(a, all, k);
}

Poly frobenius_substitute_vars(const Poly& a, const std::vector<std::size_t>& var_indices, int k) {
    if (k < 1) throw std::invalid_argument("frobenius_substitute: exponent level must be >= 1");
    std::int64_t q = 1;
    for (int i = 0; i < k; ++i) {
        q *= a.modulus();
        if (q > (1 << 30)) throw DegreeCapExceeded("frobenius_substitute: p^k too large");
    }
    std::vector<char> mark(a.ring().size(), 0);
    for (std::size_t idx : var_indices) {
        if (idx >= mark.size()) throw std::invalid_argument("frobenius_substitute_vars: index out of range");
        mark[idx] = 1;
    }
    Poly r(a.modulus(), a.ring());
    for (const auto& [e, c] : a.terms()) {
        Exponents ne = e;
        for (std::size_t i = 0; i < ne.size(); ++i)
            if (mark[i]) ne[i] = static_cast<int>(ne[i] * q);
        r.add_term(ne, c);
    }
    return r;
}

std::optional<Poly> poly_pth_power_test(const Poly& a) {
    const int p = static_cast<int>(a.modulus());
    Poly r(a.modulus(), a.ring());
    for (const auto& [e, c] : a.terms()) {
        Exponents ne = e;
        for (auto& x : ne) {
            if (x % p != 0) return std::nullopt;
            x /= p;
        }
        // prime-field coefficients are Frobenius-fixed
        r.add_term(ne, c);
    }
    return r;
}

Poly substitute(const Poly& a, std::size_t var_index, const Poly& value) {
    if (var_index >= a.ring().size()) throw std::invalid_argument("substitute: variable index out of range");
    Poly val = value.ring() == a.ring() ? value : value.embedded_into(merge_rings(a.ring(), value.ring()));
    Poly r(a.modulus(), val.ring());
    for (const auto& [e, c] : a.terms()) {
        Exponents ne = e;
        int k = ne[var_index];
        ne[var_index] = 0;
        Poly m = Poly::monomial(a.modulus(), a.ring(), ne, c).embedded_into(val.ring());
        r += m * pow(val, static_cast<unsigned>(k));
    }
    return r;
}

std::string Poly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // highest degree first
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        if (!first) os << " + ";
        first = false;
        bool has_vars = charp::total_degree(e) > 0;
        if (c != 1 || !has_vars) {
            os << c;
            if (has_vars) os << "*";
        }
        bool first_var = true;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (!first_var) os << "*";
            first_var = false;
            os << ring_[i];
            if (e[i] > 1) os << "^" << e[i];
        }
    }
    return os.str();
}

namespace {

struct PolyLexer {
    const std::string& s;
    std::size_t pos = 0;

    explicit PolyLexer(const std::string& text) : s(text) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) { ++pos; return true; }
        return false;
    }
    std::int64_t integer() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw std::invalid_argument("parse_poly: expected integer at position " + std::to_string(start) + " in '" + s + "'");
        return std::stoll(s.substr(start, pos - start));
    }
    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_' || s[pos] == '\'')) ++pos;
        if (pos == start) throw std::invalid_argument("parse_poly: expected identifier at position " + std::to_string(start) + " in '" + s + "'");
        return s.substr(start, pos - start);
    }
};

} // namespace

Poly parse_poly(std::uint32_t p, const std::vector<std::string>& ring, const std::string& text) {
    PolyLexer lex(text);
    Poly result(p, ring);
    bool first_term = true;
    while (!lex.eof()) {
        std::int64_t sign = 1;
        while (true) {
            if (lex.accept('+')) { if (first_term && lex.eof()) throw std::invalid_argument("parse_poly: dangling '+'"); continue; }
            if (lex.accept('-')) { sign = -sign; continue; }
            break;
        }
        if (lex.eof()) throw std::invalid_argument("parse_poly: trailing sign in '" + text + "'");
        std::int64_t coeff = 1;
        Exponents e(ring.size(), 0);
        bool saw_factor = false;
        while (true) {
            char c = lex.peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                coeff *= lex.integer() % static_cast<std::int64_t>(p);
                coeff %= static_cast<std::int64_t>(p);
                saw_factor = true;
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string name = lex.ident();
                auto it = std::find(ring.begin(), ring.end(), name);
                if (it == ring.end())
                    throw std::invalid_argument("parse_poly: unknown variable '" + name + "'");
                int exp = 1;
                if (lex.accept('^')) exp = static_cast<int>(lex.integer());
                if (exp < 0) throw std::invalid_argument("parse_poly: negative exponent");
                e[static_cast<std::size_t>(it - ring.begin())] += exp;
                saw_factor = true;
            } else {
                break;
            }
            if (!lex.accept('*')) break;
        }
        if (!saw_factor) throw std::invalid_argument("parse_poly: unexpected character '" + std::string(1, lex.peek()) + "' in '" + text + "'");
        result.add_term(e, sign * coeff);
        first_term = false;
    }
    return result;
}

} // namespace charp
