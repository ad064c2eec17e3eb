#include "charp/linear.hpp"

#include "charp/fpsolve.hpp"

#include <algorithm>
#include <stdexcept>

namespace charp {

LinearConnection::LinearConnection(std::uint32_t p_, std::vector<std::string> base_vars_,
                                   std::uint32_t lambda_, std::size_t rank_, std::vector<PolyMat> A_)
    : p(p_), base_vars(std::move(base_vars_)), lambda(lambda_), rank(rank_), A(std::move(A_)) {
    if (lambda > 1) throw std::invalid_argument("LinearConnection: lambda must be 0 or 1");
    if (A.size() != base_vars.size())
        throw std::invalid_argument("LinearConnection: one matrix per base variable required");
    for (auto& m : A) {
        if (m.rows() != rank || m.cols() != rank)
            throw std::invalid_argument("LinearConnection: matrix rank mismatch");
        m = m.embedded_into(base_vars);
    }
}

LinearConnection LinearConnection::canonical(std::uint32_t p, std::vector<std::string> base_vars,
                                             std::uint32_t lambda, std::size_t rank) {
    std::vector<PolyMat> A(base_vars.size(), PolyMat(p, base_vars, rank, rank));
    return LinearConnection(p, std::move(base_vars), lambda, rank, std::move(A));
}

std::vector<PolyMat> curvature(const LinearConnection& C) {
    std::vector<PolyMat> out;
    const std::size_t m = C.base_vars.size();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            PolyMat comp = C.A[j] * C.A[i] - C.A[i] * C.A[j];
            if (C.lambda == 1) comp = comp + derivative(C.A[j], i) - derivative(C.A[i], j);
            out.push_back(std::move(comp));
        }
    return out;
}

bool is_integrable(const LinearConnection& C) {
    auto comps = curvature(C);
    return std::all_of(comps.begin(), comps.end(), [](const PolyMat& m) { return m.is_zero(); });
}

PCurvatureTensor p_curvature_linear(const LinearConnection& C) {
    if (C.lambda != 1) throw std::invalid_argument("p_curvature_linear: lambda must be 1");
    PCurvatureTensor out;
    for (std::size_t i = 0; i < C.base_vars.size(); ++i) {
        PolyMat B = C.A[i];
        for (std::uint32_t k = 1; k < C.p; ++k) B = derivative(B, i) + B * C.A[i];
        out.psi.push_back(std::move(B));
    }
    return out;
}

PolyMat matrix_p_operation(const PolyMat& M) { return mat_pow(M, M.modulus()); }

std::optional<int> nilpotency_level(const std::vector<PolyMat>& components, int n_max) {
    if (n_max < 0) throw std::invalid_argument("nilpotency_level: n_max must be >= 0");
    std::vector<PolyMat> cur = components;
    for (int level = 0; level <= n_max; ++level) {
        bool all_zero = std::all_of(cur.begin(), cur.end(), [](const PolyMat& m) { return m.is_zero(); });
        if (all_zero) return level;
        if (level == n_max) break;
        for (auto& m : cur) m = matrix_p_operation(m);
    }
    return std::nullopt;
}

LinearConnection inverse_cartier_linear(const LinearHiggs& H, const FrobLift& L, int n_max) {
    if (H.lambda != 0) throw std::invalid_argument("inverse_cartier_linear: input must be a Higgs field");
    if (H.base_vars != L.base_vars || H.p != L.p)
        throw std::invalid_argument("inverse_cartier_linear: lift and Higgs field live on different bases");
    auto level = nilpotency_level(H.A, n_max);
    if (!level)
        throw std::domain_error("inverse_cartier_linear: Higgs field is not nilpotent within n_max = " +
                                std::to_string(n_max));
    ZetaMatrix Z = zeta_matrix(L);
    const std::size_t m = H.base_vars.size();
    std::vector<PolyMat> A(m, PolyMat(H.p, H.base_vars, H.rank, H.rank));
    // [p]^n of the pulled-back components, built once per series order
    std::vector<PolyMat> twisted;
    twisted.reserve(m);
    for (std::size_t k = 0; k < m; ++k) twisted.push_back(frobenius_substitute(H.A[k], 1));
    for (int n = 0; n < *level; ++n) {
        PolyMat G = zeta_iterate(Z, n + 1);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = 0; k < m; ++k) {
                if (G.at(i, k).is_zero() || twisted[k].is_zero()) continue;
                A[i] = A[i] - G.at(i, k) * twisted[k];
            }
        if (n + 1 < *level)
            for (auto& t : twisted) t = matrix_p_operation(t);
    }
    return LinearConnection(H.p, H.base_vars, 1, H.rank, std::move(A));
}

int descend_default_bound(const LinearConnection& C) {
    int maxdeg = 0;
    for (const auto& m : C.A)
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                maxdeg = std::max(maxdeg, m.at(i, j).total_degree());
    return static_cast<int>(C.p) * (1 + maxdeg);
}

HorizontalBasis cartier_descend_linear(const LinearConnection& C, int deg_bound) {
    if (C.lambda != 1) throw std::invalid_argument("cartier_descend_linear: lambda must be 1");
    auto psi = p_curvature_linear(C);
    for (const auto& comp : psi.psi)
        if (!comp.is_zero())
            throw std::domain_error("cartier_descend_linear: p-curvature does not vanish");
    const int B = deg_bound > 0 ? deg_bound : descend_default_bound(C);
    const std::size_t m = C.base_vars.size();
    const std::size_t r = C.rank;
    int maxdegA = 0;
    for (const auto& mat : C.A)
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) maxdegA = std::max(maxdegA, mat.at(i, j).total_degree());
    MonomialBasis dom(m, B);
    MonomialBasis img(m, B + std::max(0, maxdegA));
    const std::size_t N = dom.size(), M = img.size();

    // unknown x_(j, mu); equations d_i x_k + sum_j A_i(j,k) x_j = 0
    FpMat sys(C.p, m * r * M, r * N);
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t mu = 0; mu < N; ++mu) {
            Poly mono = Poly::monomial(C.p, C.base_vars, dom[mu], 1);
            std::size_t col = j * N + mu;
            for (std::size_t i = 0; i < m; ++i) {
                auto dmono = derivative(mono, i);
                for (const auto& [e, c] : dmono.terms()) {
                    auto row_idx = img.index_of(e);
                    sys.at((i * r + j) * M + static_cast<std::size_t>(row_idx), col) =
                        add_mod(sys.at((i * r + j) * M + static_cast<std::size_t>(row_idx), col), c, C.p);
                }
                for (std::size_t k = 0; k < r; ++k) {
                    if (C.A[i].at(j, k).is_zero()) continue;
                    Poly prod = C.A[i].at(j, k) * mono;
                    for (const auto& [e, c] : prod.terms()) {
                        auto row_idx = img.index_of(e);
                        if (row_idx < 0)
                            throw std::domain_error("cartier_descend_linear: internal degree overflow");
                        sys.at((i * r + k) * M + static_cast<std::size_t>(row_idx), col) =
                            add_mod(sys.at((i * r + k) * M + static_cast<std::size_t>(row_idx), col), c, C.p);
                    }
                }
            }
        }

    auto kernel = kernel_basis(std::move(sys));
    // prefer low-degree solutions, deterministic tie-break
    std::vector<std::vector<Poly>> sols;
    for (const auto& vec : kernel) {
        std::vector<Poly> x;
        x.reserve(r);
        for (std::size_t j = 0; j < r; ++j) {
            std::vector<std::uint32_t> coords(vec.begin() + static_cast<std::ptrdiff_t>(j * N),
                                              vec.begin() + static_cast<std::ptrdiff_t>((j + 1) * N));
            x.push_back(dom.from_coords(C.p, C.base_vars, coords));
        }
        sols.push_back(std::move(x));
    }
    auto sol_deg = [](const std::vector<Poly>& x) {
        int d = -1;
        for (const auto& q : x) d = std::max(d, q.total_degree());
        return d;
    };
    std::stable_sort(sols.begin(), sols.end(), [&](const auto& a, const auto& b) {
        int da = sol_deg(a), db = sol_deg(b);
        if (da != db) return da < db;
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (a[j] == b[j]) continue;
            return poly_order_less(a[j], b[j]);
        }
        return false;
    });

    // greedy frame: constant terms must stay independent
    FpSpan const_span(C.p, r);
    std::vector<std::vector<Poly>> frame;
    for (const auto& x : sols) {
        if (frame.size() == r) break;
        std::vector<std::uint32_t> c0(r);
        for (std::size_t j = 0; j < r; ++j) c0[j] = x[j].constant_term().v;
        if (const_span.insert(c0)) frame.push_back(x);
    }
    if (frame.size() < r)
        throw std::domain_error("cartier_descend_linear: only " + std::to_string(frame.size()) + " of " +
                                std::to_string(r) + " horizontal sections found within degree bound " +
                                std::to_string(B) + "; raise the bound");
    HorizontalBasis out;
    out.basis = PolyMat(C.p, C.base_vars, r, r);
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t j = 0; j < r; ++j) out.basis.at(j, a) = frame[a][j];
    Poly d = det(out.basis);
    if (!d.is_constant() || d.is_zero())
        throw std::domain_error("cartier_descend_linear: horizontal frame determinant " + d.str() +
                                " is not a unit; raise the degree bound");
    // normalize: constant term of the frame becomes the identity
    PolyMat h0(C.p, C.base_vars, r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            h0.at(i, j) = Poly::constant(C.p, C.base_vars, out.basis.at(i, j).constant_term().v);
    out.basis = out.basis * inverse(h0);
    return out;
}

LinearConnection gauge_transform(const LinearConnection& C, const PolyMat& g) {
    if (g.rows() != C.rank || g.cols() != C.rank)
        throw std::invalid_argument("gauge_transform: rank mismatch");
    PolyMat gi = inverse(g.embedded_into(C.base_vars));
    PolyMat ge = g.embedded_into(C.base_vars);
    std::vector<PolyMat> A;
    A.reserve(C.A.size());
    for (std::size_t i = 0; i < C.A.size(); ++i) {
        PolyMat t = ge * C.A[i];
        if (C.lambda == 1) t = t + derivative(ge, i);
        A.push_back(t * gi);
    }
    return LinearConnection(C.p, C.base_vars, C.lambda, C.rank, std::move(A));
}

} // namespace charp
