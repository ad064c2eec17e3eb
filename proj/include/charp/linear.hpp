#ifndef CHARP_LINEAR_HPP
#define CHARP_LINEAR_HPP

#include "charp/derivation.hpp"
#include "charp/frobenius.hpp"
#include "charp/matrix.hpp"

#include <optional>
#include <vector>

namespace charp {

// lambda-connection / Higgs field on a free module over B = F_p[base_vars],
// as one r x r matrix per coordinate direction. Row convention throughout:
// the operator along d/ds_i sends basis vector e_j to
//   lambda * d_i(e_j) + sum_k A[i](j,k) e_k.
// lambda = 1 is an ordinary connection, lambda = 0 a Higgs field.
struct LinearConnection {
    std::uint32_t p = 0;
    std::vector<std::string> base_vars;
    std::uint32_t lambda = 1;
    std::size_t rank = 0;
    std::vector<PolyMat> A; // one per base variable

    LinearConnection() = default;
    LinearConnection(std::uint32_t p_, std::vector<std::string> base_vars_, std::uint32_t lambda_,
                     std::size_t rank_, std::vector<PolyMat> A_);

    static LinearConnection canonical(std::uint32_t p, std::vector<std::string> base_vars,
                                      std::uint32_t lambda, std::size_t rank);
};

using LinearHiggs = LinearConnection;

// p-curvature along each coordinate direction, evaluated on the frame.
struct PCurvatureTensor {
    std::vector<PolyMat> psi;
};

// Component (i,j), i<j: lambda*(d_i A_j - d_j A_i) + [A_j, A_i].
// Integrable iff every component vanishes.
std::vector<PolyMat> curvature(const LinearConnection& C);
bool is_integrable(const LinearConnection& C);

// Recursion B_1 = A_i, B_{k+1} = d_i(B_k) + B_k A_i, psi_i = B_p;
// equals the p-fold power of the operator d_i + A_i on the frame.
PCurvatureTensor p_curvature_linear(const LinearConnection& C);

// Restricted p-power on matrix Higgs data: the plain p-fold matrix power,
// i.e. the p-th power of the associated linear vertical field.
PolyMat matrix_p_operation(const PolyMat& M);

// Least n <= n_max with the n-fold [p]-power of every component zero; level 0
// means already zero, level <= 1 is "p-nilpotent". Empty when not nilpotent.
std::optional<int> nilpotency_level(const std::vector<PolyMat>& components, int n_max);

// Inverse Cartier transform of a nilpotent Higgs field, using a Frobenius lift:
//   A_i = - sum_{n>=0} sum_k zeta_iterate(Z,n+1)(i,k) * ([p]^n of F* theta_k),
// truncated at the nilpotency level. p_curvature_linear of the result equals
// the Frobenius pullback of theta (the oracle pinning all conventions).
LinearConnection inverse_cartier_linear(const LinearHiggs& H, const FrobLift& L, int n_max = 8);

// Basis of horizontal sections of a p-curvature-zero connection, found by a
// degree-graded solve. Columns of `basis` are the horizontal coordinate
// vectors; det(basis) is a nonzero constant (the module is a Frobenius
// pullback of their span).
struct HorizontalBasis {
    PolyMat basis;
};
// deg_bound <= 0 selects the default p*(1 + max degree in A).
HorizontalBasis cartier_descend_linear(const LinearConnection& C, int deg_bound = 0);

// Gauge action on connection matrices (row convention):
//   A'_i = (lambda * d_i(g) + g A_i) g^{-1}.
LinearConnection gauge_transform(const LinearConnection& C, const PolyMat& g);

// Default degree bound of the horizontal-section solver.
int descend_default_bound(const LinearConnection& C);

} // namespace charp

#endif
