#include "charp/nonlinear.hpp"

#include "charp/fpsolve.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace charp {

namespace {

std::vector<std::string> concat_vars(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::string> r = a;
    r.insert(r.end(), b.begin(), b.end());
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = i + 1; j < r.size(); ++j)
            if (r[i] == r[j]) throw std::invalid_argument("total space: duplicate variable '" + r[i] + "'");
    return r;
}

int max_value_degree(const std::vector<DerivationOp>& ops) {
    int d = 0;
    for (const auto& D : ops)
        for (const auto& v : D.values) d = std::max(d, v.total_degree());
    return d;
}

} // namespace

std::vector<std::string> FoliatedTotalSpace::ring() const { return concat_vars(base_vars, fiber_vars); }
std::vector<std::string> HiggsTotalSpace::ring() const { return concat_vars(base_vars, fiber_vars); }

namespace {
void require_free_fibers(const std::vector<Poly>& relations, const char* op) {
    if (!relations.empty())
        throw std::domain_error(std::string(op) +
                                ": total algebra has a quotient presentation; the graded solvers "
                                "require free polynomial fibers");
}
} // namespace

void FoliatedTotalSpace::validate() const {
    auto vars = ring();
    if (nabla.size() != base_vars.size())
        throw std::invalid_argument("foliation: one derivation per base variable required");
    for (std::size_t i = 0; i < nabla.size(); ++i) {
        if (nabla[i].ring != vars) throw std::invalid_argument("foliation: derivation ring mismatch");
        for (std::size_t j = 0; j < base_vars.size(); ++j) {
            Poly expect = Poly::constant(p, vars, i == j ? 1 : 0);
            if (nabla[i].values[j] != expect)
                throw std::invalid_argument("foliation: transversality fails, D_" + std::to_string(i + 1) +
                                            "(" + base_vars[j] + ") = " + nabla[i].values[j].str());
        }
    }
    for (std::size_t i = 0; i < nabla.size(); ++i)
        for (std::size_t j = i + 1; j < nabla.size(); ++j)
            if (!lie_bracket(nabla[i], nabla[j]).is_zero())
                throw std::invalid_argument("foliation: integrability fails, [D_" + std::to_string(i + 1) +
                                            ", D_" + std::to_string(j + 1) + "] != 0");
}

void HiggsTotalSpace::validate() const {
    auto vars = ring();
    if (theta.size() != base_vars.size())
        throw std::invalid_argument("higgs: one derivation per base variable required");
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (theta[i].ring != vars) throw std::invalid_argument("higgs: derivation ring mismatch");
        for (std::size_t j = 0; j < base_vars.size(); ++j)
            if (!theta[i].values[j].is_zero())
                throw std::invalid_argument("higgs: verticality fails, Theta_" + std::to_string(i + 1) + "(" +
                                            base_vars[j] + ") = " + theta[i].values[j].str());
    }
    for (std::size_t i = 0; i < theta.size(); ++i)
        for (std::size_t j = i + 1; j < theta.size(); ++j)
            if (!lie_bracket(theta[i], theta[j]).is_zero())
                throw std::invalid_argument("higgs: integrability fails, [Theta_" + std::to_string(i + 1) +
                                            ", Theta_" + std::to_string(j + 1) + "] != 0");
}

bool VerticalPCurvature::is_zero() const {
    return std::all_of(psi.begin(), psi.end(), [](const DerivationOp& d) { return d.is_zero(); });
}

VerticalPCurvature foliation_p_curvature(const FoliatedTotalSpace& F) {
    VerticalPCurvature out;
    out.psi.reserve(F.nabla.size());
    for (const auto& D : F.nabla) out.psi.push_back(p_power(D));
    // verticality: D_i^p(s_j) = D_i^(p-1)(delta_ij) = 0 holds structurally;
    // a nonzero value signals corrupted input
    for (const auto& v : out.psi)
        for (std::size_t j = 0; j < F.base_vars.size(); ++j)
            if (!v.values[j].is_zero())
                throw std::logic_error("foliation_p_curvature: non-vertical result (input invariants broken)");
    return out;
}

std::optional<int> nilpotency_level_derivations(const std::vector<DerivationOp>& comps, int n_max) {
    std::vector<DerivationOp> cur = comps;
    for (int level = 0; level <= n_max; ++level) {
        bool all_zero = std::all_of(cur.begin(), cur.end(), [](const DerivationOp& d) { return d.is_zero(); });
        if (all_zero) return level;
        if (level == n_max) break;
        for (auto& d : cur) d = p_power(d);
    }
    return std::nullopt;
}

std::vector<DerivationOp> pullback_vertical(const HiggsTotalSpace& H) {
    auto vars = H.ring();
    std::vector<std::size_t> base_idx(H.base_vars.size());
    for (std::size_t i = 0; i < base_idx.size(); ++i) base_idx[i] = i;
    std::vector<DerivationOp> out;
    out.reserve(H.theta.size());
    for (const auto& T : H.theta) {
        DerivationOp D(H.p, vars);
        for (std::size_t v = 0; v < vars.size(); ++v)
            D.values[v] = frobenius_substitute_vars(T.values[v], base_idx, 1);
        out.push_back(std::move(D));
    }
    return out;
}

namespace {

// Shared series: start_i + sign * sum_{n<level} sum_k G^(n+1)(i,k) * [p]^n(W_k).
std::vector<DerivationOp> zeta_series(const std::vector<DerivationOp>& start,
                                      const std::vector<DerivationOp>& W, int level, int sign,
                                      const FrobLift& L, const std::vector<std::string>& vars) {
    std::vector<DerivationOp> out = start;
    if (level == 0) return out;
    ZetaMatrix Z = zeta_matrix(L);
    std::vector<DerivationOp> powered = W;
    for (int n = 0; n < level; ++n) {
        PolyMat G = zeta_iterate(Z, n + 1);
        for (std::size_t i = 0; i < out.size(); ++i)
            for (std::size_t k = 0; k < W.size(); ++k) {
                if (G.at(i, k).is_zero() || powered[k].is_zero()) continue;
                Poly coeff = G.at(i, k).embedded_into(vars);
                if (sign > 0)
                    out[i] = out[i] + coeff * powered[k];
                else
                    out[i] = out[i] - coeff * powered[k];
            }
        if (n + 1 < level)
            for (auto& w : powered) w = p_power(w);
    }
    return out;
}

} // namespace

FoliatedTotalSpace inverse_cartier_nonlinear(const HiggsTotalSpace& H, const FrobLift& L, int n_max) {
    require_free_fibers(H.relations, "inverse_cartier_nonlinear");
    H.validate();
    if (L.base_vars != H.base_vars || L.p != H.p)
        throw std::invalid_argument("inverse_cartier_nonlinear: lift base mismatch");
    auto level = nilpotency_level_derivations(H.theta, n_max);
    if (!level)
        throw std::domain_error("inverse_cartier_nonlinear: Higgs field not nilpotent within n_max = " +
                                std::to_string(n_max));
    auto vars = H.ring();
    auto pulled = pullback_vertical(H);
    std::vector<DerivationOp> start;
    for (std::size_t i = 0; i < H.base_vars.size(); ++i)
        start.push_back(DerivationOp::coordinate(H.p, vars, i));
    FoliatedTotalSpace F;
    F.p = H.p;
    F.base_vars = H.base_vars;
    F.fiber_vars = H.fiber_vars;
    F.nabla = zeta_series(start, pulled, *level, -1, L, vars);
    // contracts of the construction, verified rather than assumed
    F.validate();
    auto psi = foliation_p_curvature(F);
    for (std::size_t i = 0; i < psi.psi.size(); ++i)
        if (psi.psi[i] != pulled[i])
            throw std::logic_error("inverse_cartier_nonlinear: p-curvature formula violated at direction " +
                                   std::to_string(i + 1));
    return F;
}

FoliatedTotalSpace forward_deform(const FoliatedTotalSpace& F, const FrobLift& L, int n_max) {
    require_free_fibers(F.relations, "forward_deform");
    F.validate();
    if (L.base_vars != F.base_vars || L.p != F.p)
        throw std::invalid_argument("forward_deform: lift base mismatch");
    auto psi = foliation_p_curvature(F);
    auto level = nilpotency_level_derivations(psi.psi, n_max);
    if (!level)
        throw std::domain_error("forward_deform: p-curvature not nilpotent within n_max = " + std::to_string(n_max));
    auto vars = F.ring();
    FoliatedTotalSpace out;
    out.p = F.p;
    out.base_vars = F.base_vars;
    out.fiber_vars = F.fiber_vars;
    out.nabla = zeta_series(F.nabla, psi.psi, *level, +1, L, vars);
    out.validate();
    if (!foliation_p_curvature(out).is_zero())
        throw std::logic_error("forward_deform: deformed foliation is not p-closed");
    return out;
}

namespace {

// F_p-span of all products of the generators with formal degree <= bound.
// Formal degree of prod g_a^{e_a} is sum e_a * deg(g_a), which equals the
// polynomial degree (domain), so the span sits inside C_{<= bound}.
struct SubalgebraSpan {
    MonomialBasis basis;
    FpSpan span;

    SubalgebraSpan(std::uint32_t p, std::size_t nvars, int bound)
        : basis(nvars, bound), span(p, basis.size()) {}

    void absorb_products(const std::vector<Poly>& gens, std::uint32_t p,
                         const std::vector<std::string>& ring, int bound) {
        span = FpSpan(p, basis.size());
        Poly one = Poly::constant(p, ring, 1);
        dfs(gens, 0, one, 0, bound);
    }

  private:
    void dfs(const std::vector<Poly>& gens, std::size_t idx, const Poly& acc, int deg, int bound) {
        span.insert(basis.coords(acc));
        if (idx == gens.size()) return;
        int gdeg = std::max(1, gens[idx].total_degree());
        Poly cur = acc;
        for (int e = 0; deg + gdeg * (e + 1) <= bound; ++e) {
            cur = cur * gens[idx];
            dfs(gens, idx + 1, cur, deg + gdeg * (e + 1), bound);
        }
        dfs(gens, idx + 1, acc, deg, bound);
    }
};

} // namespace

bool subalgebra_contains(std::uint32_t p, const std::vector<std::string>& ring,
                         const std::vector<Poly>& generators, const Poly& x, int bound) {
    SubalgebraSpan s(p, ring.size(), bound);
    s.absorb_products(generators, p, ring, bound);
    return s.span.contains(s.basis.coords(x.embedded_into(ring)));
}

HorizontalSubalgebra horizontal_subalgebra(const FoliatedTotalSpace& F, int deg_bound,
                                           bool require_certificate) {
    require_free_fibers(F.relations, "horizontal_subalgebra");
    F.validate();
    if (!foliation_p_curvature(F).is_zero())
        throw std::domain_error("horizontal_subalgebra: foliation is not p-closed (psi != 0)");
    const auto vars = F.ring();
    const std::uint32_t p = F.p;
    const int B = deg_bound > 0 ? deg_bound
                               : std::max(static_cast<int>(p) * (1 + max_value_degree(F.nabla)),
                                          2 * static_cast<int>(p));

    HorizontalSubalgebra out;
    out.deg_bound = B;

    const int shift = std::max(0, max_value_degree(F.nabla) - 1);
    MonomialBasis dom(vars.size(), B);
    MonomialBasis img(vars.size(), B + shift);
    const std::size_t N = dom.size(), M = img.size();
    FpMat sys(p, F.nabla.size() * M, N);
    for (std::size_t mu = 0; mu < N; ++mu) {
        Poly mono = Poly::monomial(p, vars, dom[mu], 1);
        for (std::size_t i = 0; i < F.nabla.size(); ++i) {
            Poly im = apply(F.nabla[i], mono);
            for (const auto& [e, c] : im.terms()) {
                auto idx = img.index_of(e);
                if (idx < 0) throw std::domain_error("horizontal_subalgebra: internal degree overflow");
                sys.at(i * M + static_cast<std::size_t>(idx), mu) =
                    add_mod(sys.at(i * M + static_cast<std::size_t>(idx), mu), c, p);
            }
        }
    }
    auto kernel = kernel_basis(std::move(sys));

    // reduce the kernel to distinct minimal leading monomials (deg-lex)
    FpMat red(p, kernel.size(), N);
    for (std::size_t r = 0; r < kernel.size(); ++r)
        for (std::size_t c = 0; c < N; ++c) red.at(r, c) = kernel[r][c];
    auto pivots = red.rref();

    // seed with the base p-th powers, then sweep kernel elements by leading term
    std::vector<Poly> gens;
    for (std::size_t i = 0; i < F.base_vars.size(); ++i) {
        Exponents e(vars.size(), 0);
        e[i] = static_cast<int>(p);
        gens.push_back(Poly::monomial(p, vars, e, 1));
    }
    SubalgebraSpan span(p, vars.size(), B);
    span.absorb_products(gens, p, vars, B);
    for (std::size_t r = 0; r < pivots.size(); ++r) {
        if (pivots[r] == 0) continue; // constants
        std::vector<std::uint32_t> coords(N);
        for (std::size_t c = 0; c < N; ++c) coords[c] = red.at(r, c);
        Poly cand = dom.from_coords(p, vars, coords);
        if (span.span.contains(span.basis.coords(cand))) continue;
        gens.push_back(cand);
        span.absorb_products(gens, p, vars, B);
    }
    out.generators = gens;

    // certificate: products of the found generators times s^I (I < p on base
    // variables) span every monomial of degree <= B - p
    const int cert_bound = B - static_cast<int>(p);
    if (cert_bound < 0) {
        out.message = "degree bound " + std::to_string(B) + " below p; nothing to certify";
        if (require_certificate) throw std::domain_error("horizontal_subalgebra: " + out.message);
        return out;
    }
    FpSpan cert(p, dom.size());
    {
        // all generator products of degree <= B
        SubalgebraSpan prods(p, vars.size(), B);
        prods.absorb_products(gens, p, vars, B);
        // multiply each spanned element by each s^I; SubalgebraSpan keeps only the
        // span, so rebuild from products directly
        std::vector<Exponents> base_multi;
        Exponents cur(vars.size(), 0);
        std::function<void(std::size_t)> gen = [&](std::size_t i) {
            if (i == F.base_vars.size()) {
                base_multi.push_back(cur);
                return;
            }
            for (int e = 0; e < static_cast<int>(p); ++e) {
                cur[i] = e;
                gen(i + 1);
            }
            cur[i] = 0;
        };
        gen(0);
        std::function<void(std::size_t, const Poly&, int)> dfs = [&](std::size_t idx, const Poly& acc, int deg) {
            for (const auto& I : base_multi) {
                int id = total_degree(I);
                if (deg + id > B) continue;
                Poly v = acc * Poly::monomial(p, vars, I, 1);
                cert.insert(dom.coords(v));
            }
            if (idx == gens.size()) return;
            int gdeg = std::max(1, gens[idx].total_degree());
            Poly c2 = acc;
            for (int e = 0; deg + gdeg * (e + 1) <= B; ++e) {
                c2 = c2 * gens[idx];
                dfs(idx + 1, c2, deg + gdeg * (e + 1));
            }
            dfs(idx + 1, acc, deg);
        };
        dfs(0, Poly::constant(p, vars, 1), 0);
    }
    out.certified = true;
    out.certified_degree = cert_bound;
    MonomialBasis low(vars.size(), cert_bound);
    for (std::size_t i = 0; i < low.size(); ++i) {
        std::vector<std::uint32_t> v(dom.size(), 0);
        auto idx = dom.index_of(low[i]);
        v[static_cast<std::size_t>(idx)] = 1;
        if (!cert.contains(v)) {
            out.certified = false;
            out.certified_degree = total_degree(low[i]) - 1;
            out.message = "surjectivity fails in degree " + std::to_string(total_degree(low[i])) +
                          " at monomial " + Poly::monomial(p, vars, low[i], 1).str();
            break;
        }
    }
    if (!out.certified && require_certificate)
        throw std::domain_error("horizontal_subalgebra: " + out.message);
    return out;
}

bool derivation_in_module_span(const std::vector<DerivationOp>& gens, const DerivationOp& X, int bound) {
    if (gens.empty()) return X.is_zero();
    const auto& ring = X.ring;
    const std::uint32_t p = X.p;
    int maxdeg = std::max(max_value_degree(gens), max_value_degree({X}));
    MonomialBasis mul(ring.size(), bound);
    MonomialBasis img(ring.size(), bound + maxdeg);
    const std::size_t nv = ring.size();
    FpMat sys(p, nv * img.size(), gens.size() * mul.size());
    for (std::size_t a = 0; a < gens.size(); ++a)
        for (std::size_t mu = 0; mu < mul.size(); ++mu) {
            Poly mono = Poly::monomial(p, ring, mul[mu], 1);
            std::size_t col = a * mul.size() + mu;
            for (std::size_t v = 0; v < nv; ++v) {
                if (gens[a].values[v].is_zero()) continue;
                Poly prod = mono * gens[a].values[v];
                for (const auto& [e, c] : prod.terms()) {
                    auto idx = img.index_of(e);
                    if (idx < 0) throw std::domain_error("derivation_in_module_span: degree overflow");
                    sys.at(v * img.size() + static_cast<std::size_t>(idx), col) =
                        add_mod(sys.at(v * img.size() + static_cast<std::size_t>(idx), col), c, p);
                }
            }
        }
    std::vector<std::uint32_t> target(nv * img.size(), 0);
    for (std::size_t v = 0; v < nv; ++v)
        for (const auto& [e, c] : X.values[v].terms()) {
            auto idx = img.index_of(e);
            if (idx < 0) return false;
            target[v * img.size() + static_cast<std::size_t>(idx)] = c;
        }
    std::vector<std::uint32_t> sol;
    return solve_linear(sys, target, sol);
}

bool same_derivation_span(const std::vector<DerivationOp>& a, const std::vector<DerivationOp>& b, int bound) {
    for (const auto& x : a)
        if (!derivation_in_module_span(b, x, bound)) return false;
    for (const auto& x : b)
        if (!derivation_in_module_span(a, x, bound)) return false;
    return true;
}

std::vector<DerivationOp> ekedahl_ann_of_subalgebra(std::uint32_t p, const std::vector<std::string>& ring,
                                                    const std::vector<Poly>& generators, int deg_bound) {
    if (deg_bound < 0) throw std::invalid_argument("ekedahl_ann_of_subalgebra: negative degree bound");
    const std::size_t nv = ring.size();
    std::vector<Poly> gens;
    gens.reserve(generators.size());
    int maxdeg = 0;
    for (const auto& g : generators) {
        gens.push_back(g.embedded_into(ring));
        maxdeg = std::max(maxdeg, gens.back().total_degree());
    }
    MonomialBasis dom(nv, deg_bound);
    MonomialBasis img(nv, deg_bound + std::max(0, maxdeg - 1));
    const std::size_t N = dom.size();
    // unknowns: coefficients of c_v, v over ring; equations sum_v c_v dg/dv = 0
    FpMat sys(p, gens.size() * img.size(), nv * N);
    for (std::size_t v = 0; v < nv; ++v) {
        std::vector<Poly> dgs;
        dgs.reserve(gens.size());
        for (const auto& g : gens) dgs.push_back(derivative(g, v));
        for (std::size_t mu = 0; mu < N; ++mu) {
            Poly mono = Poly::monomial(p, ring, dom[mu], 1);
            std::size_t col = v * N + mu;
            for (std::size_t a = 0; a < gens.size(); ++a) {
                if (dgs[a].is_zero()) continue;
                Poly prod = mono * dgs[a];
                for (const auto& [e, c] : prod.terms()) {
                    auto idx = img.index_of(e);
                    if (idx < 0) throw std::domain_error("ekedahl_ann_of_subalgebra: degree overflow");
                    sys.at(a * img.size() + static_cast<std::size_t>(idx), col) =
                        add_mod(sys.at(a * img.size() + static_cast<std::size_t>(idx), col), c, p);
                }
            }
        }
    }
    auto kernel = kernel_basis(std::move(sys));
    if (kernel.empty())
        throw std::domain_error("ekedahl_ann_of_subalgebra: rank deficiency, no annihilating derivation "
                                "within degree bound " + std::to_string(deg_bound));
    FpMat red(p, kernel.size(), nv * N);
    for (std::size_t r = 0; r < kernel.size(); ++r)
        for (std::size_t c = 0; c < nv * N; ++c) red.at(r, c) = kernel[r][c];
    auto pivots = red.rref();

    std::vector<DerivationOp> basis;
    for (std::size_t r = 0; r < pivots.size(); ++r) {
        DerivationOp D(p, ring);
        for (std::size_t v = 0; v < nv; ++v) {
            std::vector<std::uint32_t> coords(N);
            for (std::size_t c = 0; c < N; ++c) coords[c] = red.at(r, v * N + c);
            D.values[v] = dom.from_coords(p, ring, coords);
        }
        if (D.is_zero()) continue;
        if (!derivation_in_module_span(basis, D, deg_bound)) basis.push_back(std::move(D));
    }
    if (basis.empty())
        throw std::domain_error("ekedahl_ann_of_subalgebra: rank deficiency at degree bound " +
                                std::to_string(deg_bound));
    return basis;
}

ChartCheckReport transversal_chart_check(const std::vector<DerivationOp>& e, const std::vector<Poly>& f) {
    ChartCheckReport rep;
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = 0; j < f.size(); ++j) {
            Poly pairing = apply(e[i], f[j].embedded_into(e[i].ring));
            Poly expect = Poly::constant(e[i].p, e[i].ring, i == j ? 1 : 0);
            if (pairing != expect) {
                rep.ok = false;
                rep.detail = "<e_" + std::to_string(i + 1) + ", df_" + std::to_string(j + 1) +
                             "> = " + pairing.str();
                return rep;
            }
        }
    return rep;
}

namespace {
std::vector<std::string> default_fiber_names(std::size_t r, const std::vector<std::string>& fiber_names) {
    if (!fiber_names.empty()) {
        if (fiber_names.size() != r) throw std::invalid_argument("functor_G: fiber name count mismatch");
        return fiber_names;
    }
    std::vector<std::string> names;
    for (std::size_t j = 1; j <= r; ++j) names.push_back("a" + std::to_string(j));
    return names;
}

std::vector<DerivationOp> functor_G_values(const LinearConnection& C, const std::vector<std::string>& fiber,
                                           const std::vector<std::string>& vars) {
    std::vector<DerivationOp> out;
    const std::size_t m = C.base_vars.size();
    for (std::size_t i = 0; i < m; ++i) {
        DerivationOp D(C.p, vars);
        if (C.lambda == 1) D.values[i] = Poly::constant(C.p, vars, 1);
        for (std::size_t j = 0; j < C.rank; ++j) {
            Poly v(C.p, vars);
            for (std::size_t k = 0; k < C.rank; ++k) {
                if (C.A[i].at(j, k).is_zero()) continue;
                v += C.A[i].at(j, k).embedded_into(vars) * Poly::variable(C.p, vars, fiber[k]);
            }
            D.values[m + j] = v;
        }
        out.push_back(std::move(D));
    }
    return out;
}
} // namespace

FoliatedTotalSpace functor_G_foliation(const LinearConnection& C, const std::vector<std::string>& fiber_names) {
    if (C.lambda != 1) throw std::invalid_argument("functor_G_foliation: lambda must be 1");
    FoliatedTotalSpace F;
    F.p = C.p;
    F.base_vars = C.base_vars;
    F.fiber_vars = default_fiber_names(C.rank, fiber_names);
    auto vars = F.ring();
    F.nabla = functor_G_values(C, F.fiber_vars, vars);
    return F;
}

HiggsTotalSpace functor_G_higgs(const LinearHiggs& C, const std::vector<std::string>& fiber_names) {
    if (C.lambda != 0) throw std::invalid_argument("functor_G_higgs: lambda must be 0");
    HiggsTotalSpace H;
    H.p = C.p;
    H.base_vars = C.base_vars;
    H.fiber_vars = default_fiber_names(C.rank, fiber_names);
    auto vars = H.ring();
    H.theta = functor_G_values(C, H.fiber_vars, vars);
    return H;
}

} // namespace charp
