#include "charp/derivation.hpp"

#include <algorithm>
#include <sstream>

namespace charp {

DerivationOp::DerivationOp(std::uint32_t p_, std::vector<std::string> ring_)
    : p(p_), ring(std::move(ring_)) {
    values.assign(ring.size(), Poly::zero(p, ring));
}

DerivationOp::DerivationOp(std::uint32_t p_, std::vector<std::string> ring_, std::vector<Poly> values_)
    : p(p_), ring(std::move(ring_)), values(std::move(values_)) {
    if (values.size() != ring.size())
        throw std::invalid_argument("DerivationOp: one value per generator required");
    for (auto& v : values) v = v.embedded_into(ring);
}

DerivationOp DerivationOp::zero(std::uint32_t p, std::vector<std::string> ring) {
    return DerivationOp(p, std::move(ring));
}

DerivationOp DerivationOp::coordinate(std::uint32_t p, std::vector<std::string> ring, std::size_t i) {
    DerivationOp D(p, std::move(ring));
    if (i >= D.ring.size()) throw std::invalid_argument("DerivationOp::coordinate: index out of range");
    D.values[i] = Poly::constant(p, D.ring, 1);
    return D;
}

bool DerivationOp::is_zero() const {
    return std::all_of(values.begin(), values.end(), [](const Poly& v) { return v.is_zero(); });
}

void DerivationOp::set_value(const std::string& var, const Poly& v) {
    auto it = std::find(ring.begin(), ring.end(), var);
    if (it == ring.end()) throw std::invalid_argument("DerivationOp: '" + var + "' not in ring");
    values[static_cast<std::size_t>(it - ring.begin())] = v.embedded_into(ring);
}

bool operator==(const DerivationOp& a, const DerivationOp& b) {
    return a.p == b.p && a.ring == b.ring && a.values == b.values;
}

std::string DerivationOp::str() const {
    std::ostringstream os;
    os << "D:";
    bool first = true;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        if (values[i].is_zero()) continue;
        os << (first ? " " : "; ") << ring[i] << " -> " << values[i].str();
        first = false;
    }
    if (first) os << " 0";
    return os.str();
}

namespace {
void require_same_ring(const DerivationOp& a, const DerivationOp& b) {
    if (a.p != b.p || a.ring != b.ring)
        throw std::invalid_argument("DerivationOp: ring mismatch");
}
} // namespace

Poly apply(const DerivationOp& D, const Poly& a) {
    Poly x = a.ring() == D.ring ? a : a.embedded_into(D.ring);
    Poly r(D.p, D.ring);
    for (std::size_t i = 0; i < D.ring.size(); ++i) {
        if (D.values[i].is_zero()) continue;
        r += D.values[i] * derivative(x, i);
    }
    return r;
}

DerivationOp operator+(const DerivationOp& a, const DerivationOp& b) {
    require_same_ring(a, b);
    DerivationOp r(a.p, a.ring);
    for (std::size_t i = 0; i < a.values.size(); ++i) r.values[i] = a.values[i] + b.values[i];
    return r;
}

DerivationOp operator-(const DerivationOp& a, const DerivationOp& b) {
    require_same_ring(a, b);
    DerivationOp r(a.p, a.ring);
    for (std::size_t i = 0; i < a.values.size(); ++i) r.values[i] = a.values[i] - b.values[i];
    return r;
}

DerivationOp operator-(const DerivationOp& a) {
    DerivationOp r(a.p, a.ring);
    for (std::size_t i = 0; i < a.values.size(); ++i) r.values[i] = -a.values[i];
    return r;
}

DerivationOp operator*(const Poly& c, const DerivationOp& D) {
    DerivationOp r(D.p, D.ring);
    Poly cc = c.embedded_into(D.ring);
    for (std::size_t i = 0; i < D.values.size(); ++i) r.values[i] = cc * D.values[i];
    return r;
}

DerivationOp lie_bracket(const DerivationOp& a, const DerivationOp& b) {
    require_same_ring(a, b);
    DerivationOp r(a.p, a.ring);
    for (std::size_t i = 0; i < a.ring.size(); ++i)
        r.values[i] = apply(a, b.values[i]) - apply(b, a.values[i]);
    return r;
}

DerivationOp p_power(const DerivationOp& D) {
    DerivationOp r(D.p, D.ring);
    for (std::size_t i = 0; i < D.ring.size(); ++i) {
        Poly v = D.values[i];
        for (std::uint32_t k = 1; k < D.p; ++k) v = apply(D, v);
        r.values[i] = v;
    }
    return r;
}

DerivationOp p_power_iterate(const DerivationOp& D, int n) {
    DerivationOp r = D;
    for (int k = 0; k < n; ++k) r = p_power(r);
    return r;
}

SemilinearityReport p_power_semilinearity_check(const DerivationOp& D, const Poly& c) {
    Poly cc = c.embedded_into(D.ring);
    DerivationOp cD = cc * D;
    SemilinearityReport rep;
    rep.lhs = p_power(cD);
    // (c*D)^(p-1)(c): p-1 successive applications of c*D to c
    Poly w = cc;
    for (std::uint32_t k = 1; k < D.p; ++k) w = apply(cD, w);
    rep.rhs = pow(cc, D.p) * p_power(D) + w * D;
    rep.ok = rep.lhs == rep.rhs;
    return rep;
}

void TDerivation::trim() {
    while (!coeffs.empty() && coeffs.back().is_zero()) coeffs.pop_back();
}

TDerivation ad_action(const DerivationOp& D1, const DerivationOp& D2, const TDerivation& X) {
    // [t*D1 + D2, sum_k X_k t^k] = sum_k ([D1, X_k] t^(k+1) + [D2, X_k] t^k)
    TDerivation out;
    out.coeffs.assign(X.coeffs.size() + 1, DerivationOp::zero(D1.p, D1.ring));
    for (std::size_t k = 0; k < X.coeffs.size(); ++k) {
        out.coeffs[k + 1] = out.coeffs[k + 1] + lie_bracket(D1, X.coeffs[k]);
        out.coeffs[k] = out.coeffs[k] + lie_bracket(D2, X.coeffs[k]);
    }
    out.trim();
    return out;
}

JacobsonDecomposition jacobson_decompose(const DerivationOp& D1, const DerivationOp& D2) {
    require_same_ring(D1, D2);
    const std::uint32_t p = D1.p;
    TDerivation X;
    X.coeffs = {D1};
    for (std::uint32_t k = 1; k < p; ++k) X = ad_action(D1, D2, X);
    JacobsonDecomposition out;
    out.s.reserve(p - 1);
    for (std::uint32_t i = 1; i < p; ++i) {
        DerivationOp si = (i - 1) < X.coeffs.size() ? X.coeffs[i - 1] : DerivationOp::zero(p, D1.ring);
        Poly scale = Poly::constant(p, D1.ring, static_cast<std::int64_t>(inv_mod(i, p)));
        out.s.push_back(scale * si);
    }
    out.residual = p_power(D1 + D2) - p_power(D1) - p_power(D2);
    for (const auto& si : out.s) out.residual = out.residual - si;
    return out;
}

DerivationOp parse_derivation(std::uint32_t p, const std::vector<std::string>& ring, const std::string& text) {
    std::string body = text;
    // optional leading "D:"
    auto pos = body.find_first_not_of(" \t");
    if (pos != std::string::npos && body.compare(pos, 2, "D:") == 0) body = body.substr(pos + 2);
    DerivationOp D(p, ring);
    {
        auto a = body.find_first_not_of(" \t");
        auto b = body.find_last_not_of(" \t");
        if (a == std::string::npos) return D;
        if (body.substr(a, b - a + 1) == "0") return D;
    }
    std::stringstream ss(body);
    std::string clause;
    while (std::getline(ss, clause, ';')) {
        if (clause.find_first_not_of(" \t") == std::string::npos) continue;
        auto arrow = clause.find("->");
        if (arrow == std::string::npos)
            throw std::invalid_argument("parse_derivation: missing '->' in clause '" + clause + "'");
        std::string var = clause.substr(0, arrow);
        var.erase(0, var.find_first_not_of(" \t"));
        var.erase(var.find_last_not_of(" \t") + 1);
        D.set_value(var, parse_poly(p, ring, clause.substr(arrow + 2)));
    }
    return D;
}

} // namespace charp
