#ifndef CHARP_GLUING_HPP
#define CHARP_GLUING_HPP

#include "charp/frobenius.hpp"
#include "charp/linear.hpp"
#include "charp/matrix.hpp"

#include <string>
#include <vector>

namespace charp {

// One chart of a formal cover: a label and a Frobenius lift. All charts share
// the same coordinate base; restriction maps are identities.
struct Chart {
    std::string id;
    FrobLift lift;
};

bool is_nilpotent_of_order_at_most(const PolyMat& N, unsigned k);

// exp(N) = sum_{k<p} N^k / k!; requires N^p = 0 so that the truncation is the
// honest exponential (all k! with k < p invertible).
PolyMat truncated_exp(const PolyMat& N);
// log(I + M) = sum_{1<=k<p} (-1)^(k+1) M^k / k; requires (G - I)^p = 0.
PolyMat truncated_log(const PolyMat& G);

// Transition matrices g_ab = exp(theta~ . h_ab) from the Deligne-Illusie
// differences h_ab of the chart lifts, contracting the Frobenius-pulled-back
// Higgs components theta~_j against h. Requires commuting, p-nilpotent theta.
struct GluingCocycle {
    std::vector<std::string> chart_ids;
    // g[a][b], square matrices; g[a][a] = I
    std::vector<std::vector<PolyMat>> g;
};
GluingCocycle gluing_cocycle(const std::vector<Chart>& charts, const LinearHiggs& theta);

struct GluingReport {
    bool ok = true;
    std::string detail;     // first failing pair/triple
    PolyMat defect;         // defect matrix witness when failing
};

// g_ab * g_bc = g_ac on every triple.
GluingReport cocycle_condition_check(const GluingCocycle& G);

// Per-chart connections nabla_a = inverse_cartier_linear(theta, lift_a) are
// transported into each other by the cocycle: gauge_transform(A^a, g_ab) = A^b.
GluingReport gluing_compatibility_check(const std::vector<Chart>& charts, const LinearHiggs& theta);
// Same check against externally supplied cocycle matrices (verification-harness
// use; lets corpus files exercise negative controls).
GluingReport gluing_compatibility_check(const std::vector<Chart>& charts, const LinearHiggs& theta,
                                        const GluingCocycle& G);

} // namespace charp

#endif
