#ifndef CHARP_NONLINEAR_HPP
#define CHARP_NONLINEAR_HPP

#include "charp/derivation.hpp"
#include "charp/frobenius.hpp"
#include "charp/linear.hpp"

#include <optional>
#include <string>
#include <vector>

namespace charp {

// Affine total space F_p[base, fiber] with a transversal foliation in normal
// form: D_i(s_j) = delta_ij, [D_i, D_j] = 0.
struct FoliatedTotalSpace {
    std::uint32_t p = 0;
    std::vector<std::string> base_vars;
    std::vector<std::string> fiber_vars;
    // optional quotient presentation of the total algebra; accepted as data,
    // but the graded solvers require free polynomial fibers and reject it
    std::vector<Poly> relations;
    std::vector<DerivationOp> nabla; // one per base variable, on F_p[base, fiber]

    std::vector<std::string> ring() const;
    // Throws on broken transversality or integrability.
    void validate() const;
};

// Same total space with vertical, pairwise-commuting Higgs derivations.
struct HiggsTotalSpace {
    std::uint32_t p = 0;
    std::vector<std::string> base_vars;
    std::vector<std::string> fiber_vars;
    std::vector<Poly> relations; // see FoliatedTotalSpace::relations
    std::vector<DerivationOp> theta;

    std::vector<std::string> ring() const;
    void validate() const;
};

// psi_i = D_i^p on the coordinate frame; vertical, commuting, commuting with
// the foliation.
struct VerticalPCurvature {
    std::vector<DerivationOp> psi;

    bool is_zero() const;
};

VerticalPCurvature foliation_p_curvature(const FoliatedTotalSpace& F);

// Least n <= n_max such that the n-fold honest p-power of every component
// vanishes; empty when not nilpotent within the bound.
std::optional<int> nilpotency_level_derivations(const std::vector<DerivationOp>& comps, int n_max);

// Frobenius pullback of the Higgs data along the base (s -> s^p in values).
std::vector<DerivationOp> pullback_vertical(const HiggsTotalSpace& H);

// Inverse Cartier transform: deform the canonical foliation d_i on the
// Frobenius pullback by the zeta-series
//   D_i = d_i - sum_{n} sum_k zeta_iterate(Z,n+1)(i,k) * [p]^n(pullback theta_k).
// Verifies integrability and the p-curvature formula psi = pullback(theta).
FoliatedTotalSpace inverse_cartier_nonlinear(const HiggsTotalSpace& H, const FrobLift& L, int n_max = 8);

// Kill the p-curvature of a nilpotent foliation:
//   D_i^new = D_i + sum_n sum_k zeta_iterate(Z,n+1)(i,k) * [p]^n(psi_k).
// Verifies integrability and psi_new = 0.
FoliatedTotalSpace forward_deform(const FoliatedTotalSpace& F, const FrobLift& L, int n_max = 8);

// Horizontal subalgebra C' = { c : D_i(c) = 0 } of a p-curvature-zero
// foliation, by graded kernel computation up to deg_bound, together with the
// p-basis surjectivity certificate.
struct HorizontalSubalgebra {
    std::vector<Poly> generators; // the base p-th powers first, then swept generators
    bool certified = false;
    int deg_bound = 0;
    int certified_degree = -1; // surjectivity verified through this degree
    std::string message;       // failure detail when not certified
};
// deg_bound <= 0 selects the default p*(1 + max degree of the D values).
// When require_certificate is set, certification failure throws.
HorizontalSubalgebra horizontal_subalgebra(const FoliatedTotalSpace& F, int deg_bound = 0,
                                           bool require_certificate = true);

// Basis of the annihilator foliation {D : D(g) = 0 for all generators g},
// found degree-by-degree and reduced to module generators over the total ring.
std::vector<DerivationOp> ekedahl_ann_of_subalgebra(std::uint32_t p, const std::vector<std::string>& ring,
                                                    const std::vector<Poly>& generators, int deg_bound);

struct ChartCheckReport {
    bool ok = true;
    std::string detail; // first failing pairing
};
// Verifies e_i(f_j) = delta_ij.
ChartCheckReport transversal_chart_check(const std::vector<DerivationOp>& e, const std::vector<Poly>& f);

// Linear-scheme functor: total space on fiber generators with degree-one values
// D_i(a_j) = sum_k A_i(j,k) a_k (and D_i(s_j) = lambda delta_ij).
FoliatedTotalSpace functor_G_foliation(const LinearConnection& C,
                                       const std::vector<std::string>& fiber_names = {});
HiggsTotalSpace functor_G_higgs(const LinearHiggs& H, const std::vector<std::string>& fiber_names = {});

// Is X in the C-module span of the given derivations, with polynomial
// multipliers of degree <= bound?
bool derivation_in_module_span(const std::vector<DerivationOp>& gens, const DerivationOp& X, int bound);

// Mutual module-span inclusion of two derivation families.
bool same_derivation_span(const std::vector<DerivationOp>& a, const std::vector<DerivationOp>& b, int bound);

// Is x in the F_p-span of products (degree <= bound) of the given generators?
bool subalgebra_contains(std::uint32_t p, const std::vector<std::string>& ring,
                         const std::vector<Poly>& generators, const Poly& x, int bound);

} // namespace charp

#endif
