#ifndef CHARP_FROBENIUS_HPP
#define CHARP_FROBENIUS_HPP

#include "charp/matrix.hpp"
#include "charp/poly.hpp"

#include <string>
#include <vector>

namespace charp {

// Mod-p^2 Frobenius lifting data on affine coordinates: F~*(s_i) = s_i^p + p*a_i.
// Any choice of the a_i is a valid lift.
struct FrobLift {
    std::uint32_t p = 0;
    std::vector<std::string> base_vars;
    std::vector<Poly> a;

    FrobLift() = default;
    FrobLift(std::uint32_t p_, std::vector<std::string> base_vars_, std::vector<Poly> a_);

    // The standard lift (a = 0).
    static FrobLift standard(std::uint32_t p, std::vector<std::string> base_vars);
};

// zeta(d/ds_i) = sum_j f_ij d/ds_j with f_ij = da_j/ds_i + delta_ij s_j^(p-1).
struct ZetaMatrix {
    std::uint32_t p = 0;
    std::vector<std::string> base_vars;
    PolyMat f;
};

ZetaMatrix zeta_matrix(const FrobLift& L);

struct ZetaIdentityReport {
    bool ok = true;
    bool symmetry_ok = true;    // df_ik/ds_j == df_jk/ds_i
    bool derivative_ok = true;  // d^(p-1) f_ij / ds_i^(p-1) == -delta_ij
    std::string detail;         // first failing triple/pair, if any
};
ZetaIdentityReport zeta_identities_check(const ZetaMatrix& Z);

// F^(n) = Z . Z^[p] . Z^[p^2] ... Z^[p^(n-1)], the Frobenius-twisted matrix
// product realizing (f* zeta)^n over F_p.
PolyMat zeta_iterate(const ZetaMatrix& Z, int n);

// Deligne-Illusie difference of two lifts: h_ab[j] = a_j^alpha - a_j^beta,
// so that d(h_ab)_j/ds_i = (f^alpha - f^beta)_ij and h is additive in chains.
std::vector<Poly> di_cocycle(const FrobLift& La, const FrobLift& Lb);

} // namespace charp

#endif
