#ifndef CHARP_REES_HPP
#define CHARP_REES_HPP

#include "charp/frobenius.hpp"
#include "charp/linear.hpp"
#include "charp/matrix.hpp"

#include <optional>
#include <string>
#include <vector>

namespace charp {

// Decreasing filtration Fil^1 >= Fil^2 >= ... on a free rank-r module over
// F_p[base_vars]; Fil^0 is the whole module. fil[i] holds generator columns
// of Fil^(i+1).
struct FilteredModule {
    std::uint32_t p = 0;
    std::vector<std::string> base_vars;
    std::size_t rank = 0;
    std::vector<PolyMat> fil;

    int level() const; // largest i with Fil^i != 0
};

// Adapted basis with weights: column j of `basis` spans the weight[j] piece;
// the Rees module is free on { t^-weight[j] * basis_j }.
struct ReesModule {
    PolyMat basis;            // r x r, unit determinant
    std::vector<int> weights; // per column, non-increasing
};

struct ReesBuildResult {
    bool ok = false;
    ReesModule rees;
    std::string message; // failure detail (no adapted basis / filtration defect)
};

// Adapted-basis search by unit-pivot column reduction, deepest level first.
// Failure is meaningful output (the non-locally-split case), not an exception.
ReesBuildResult rees_build(const FilteredModule& M);

struct GriffithsExtension {
    bool ok = false;
    std::string violation;          // offending entry when transversality fails
    std::vector<int> weights;
    LinearConnection adapted;       // connection matrices in the adapted basis
    std::vector<PolyMat> t_matrices; // entries in F_p[base_vars, t]
    LinearHiggs graded_higgs;       // t = 0 fiber (weight-lowering part)
};

// Extend the connection to the Rees module: entry (j,k) of the adapted matrix
// acquires t^(1 + w_k - w_j); a negative exponent on a nonzero entry is
// exactly a Griffiths-transversality violation and is reported.
GriffithsExtension griffiths_extend(const LinearConnection& C, const FilteredModule& M,
                                    const std::string& t_name = "t");

enum class FontaineStatus { pass, fail, inconclusive };

struct FontaineReport {
    FontaineStatus status = FontaineStatus::inconclusive;
    std::string detail;
    PolyMat witness;                 // gauge phi with gauge_transform(C^-1(-theta), phi) = C
    GriffithsExtension extension;
};

// One-periodicity: build the graded Higgs field theta of (C, Fil), apply the
// inverse Cartier transform to -theta with the given lift, and search for a
// polynomial gauge witness intertwining it with C. deg_bound <= 0 selects
// 2*(1 + max input degree); absence of a witness within the bound is
// inconclusive, not refutation.
FontaineReport fontaine_periodicity_check(const LinearConnection& C, const FilteredModule& M,
                                          const FrobLift& L, int deg_bound = 0,
                                          std::uint64_t seed = 0);

struct TaylorRuleReport {
    bool ok = false;
    std::string detail;
    PolyMat composed_witness; // phi_beta * exp(-theta~ . h_ab)
};

// Two-chart Frobenius structure compatibility: the beta-chart witness composed
// with the exponential cocycle of the -theta data is a witness for the alpha
// chart.
TaylorRuleReport fontaine_taylor_rule_check(const LinearConnection& C, const FilteredModule& M,
                                            const FrobLift& La, const FrobLift& Lb,
                                            int deg_bound = 0, std::uint64_t seed = 0);

// Theta-direct form of the same rule: for C := gauge(IC(-theta, Lb), phi_beta),
// verify that phi_beta composed with the exponential cocycle of -theta
// intertwines IC(-theta, La) with C.
TaylorRuleReport fontaine_taylor_rule_check(const LinearHiggs& theta, const FrobLift& La,
                                            const FrobLift& Lb, const PolyMat& phi_beta);

} // namespace charp

#endif
