#include "charp/frobenius.hpp"

#include <stdexcept>

namespace charp {

FrobLift::FrobLift(std::uint32_t p_, std::vector<std::string> base_vars_, std::vector<Poly> a_)
    : p(p_), base_vars(std::move(base_vars_)), a(std::move(a_)) {
    if (a.size() != base_vars.size())
        throw std::invalid_argument("FrobLift: one a_i per coordinate required");
    for (auto& ai : a) ai = ai.embedded_into(base_vars);
}

FrobLift FrobLift::standard(std::uint32_t p, std::vector<std::string> base_vars) {
    std::vector<Poly> a(base_vars.size(), Poly::zero(p, base_vars));
    return FrobLift(p, std::move(base_vars), std::move(a));
}

ZetaMatrix zeta_matrix(const FrobLift& L) {
    const std::size_t m = L.base_vars.size();
    ZetaMatrix Z;
    Z.p = L.p;
    Z.base_vars = L.base_vars;
    Z.f = PolyMat(L.p, L.base_vars, m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            Z.f.at(i, j) = derivative(L.a[j], i);
            if (i == j) {
                Exponents e(m, 0);
                e[j] = static_cast<int>(L.p) - 1;
                Z.f.at(i, j) += Poly::monomial(L.p, L.base_vars, e, 1);
            }
        }
    return Z;
}

ZetaIdentityReport zeta_identities_check(const ZetaMatrix& Z) {
    ZetaIdentityReport rep;
    const std::size_t m = Z.base_vars.size();
    for (std::size_t i = 0; i < m && rep.symmetry_ok; ++i)
        for (std::size_t j = 0; j < m && rep.symmetry_ok; ++j)
            for (std::size_t k = 0; k < m; ++k) {
                if (derivative(Z.f.at(i, k), j) != derivative(Z.f.at(j, k), i)) {
                    rep.symmetry_ok = false;
                    rep.detail = "symmetry fails at (i,j,k) = (" + std::to_string(i) + "," +
                                 std::to_string(j) + "," + std::to_string(k) + ")";
                    break;
                }
            }
    for (std::size_t i = 0; i < m && rep.derivative_ok; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            Poly d = Z.f.at(i, j);
            for (std::uint32_t k = 0; k + 1 < Z.p; ++k) d = derivative(d, i);
            Poly expected = Poly::constant(Z.p, Z.base_vars, i == j ? -1 : 0);
            if (d != expected) {
                rep.derivative_ok = false;
                rep.detail = "(p-1)-fold derivative fails at (i,j) = (" + std::to_string(i) + "," +
                             std::to_string(j) + "): got " + d.str();
                break;
            }
        }
    rep.ok = rep.symmetry_ok && rep.derivative_ok;
    return rep;
}

PolyMat zeta_iterate(const ZetaMatrix& Z, int n) {
    if (n < 1) throw std::invalid_argument("zeta_iterate: n must be >= 1");
    PolyMat acc = Z.f;
    PolyMat twisted = Z.f;
    for (int k = 1; k < n; ++k) {
        twisted = frobenius_substitute(twisted, 1);
        acc = acc * twisted;
    }
    return acc;
}

std::vector<Poly> di_cocycle(const FrobLift& La, const FrobLift& Lb) {
    if (La.p != Lb.p || La.base_vars != Lb.base_vars)
        throw std::invalid_argument("di_cocycle: lifts must share base coordinates");
    std::vector<Poly> h;
    h.reserve(La.a.size());
    for (std::size_t j = 0; j < La.a.size(); ++j) h.push_back(La.a[j] - Lb.a[j]);
    return h;
}

} // namespace charp
