#include "charp/rees.hpp"

#include "charp/fpsolve.hpp"
#include "charp/gluing.hpp"

#include <algorithm>
#include <stdexcept>

namespace charp {

int FilteredModule::level() const {
    int lv = 0;
    for (std::size_t i = 0; i < fil.size(); ++i)
        if (fil[i].cols() > 0 && !fil[i].is_zero()) lv = static_cast<int>(i) + 1;
    return lv;
}

namespace {

struct AdaptedColumn {
    std::vector<Poly> v;
    int weight = 0;
    std::size_t pivot_row = 0;
};

// Reduce col against the chosen columns (clearing their pivot rows).
void reduce_column(std::vector<Poly>& col, const std::vector<AdaptedColumn>& chosen) {
    for (const auto& ac : chosen) {
        Poly f = col[ac.pivot_row];
        if (f.is_zero()) continue;
        for (std::size_t r = 0; r < col.size(); ++r) col[r] -= f * ac.v[r];
    }
}

std::optional<std::size_t> find_unit_row(const std::vector<Poly>& col) {
    for (std::size_t r = 0; r < col.size(); ++r)
        if (col[r].is_constant() && !col[r].is_zero()) return r;
    return std::nullopt;
}

} // namespace

ReesBuildResult rees_build(const FilteredModule& M) {
    ReesBuildResult out;
    const std::uint32_t p = M.p;
    const std::size_t r = M.rank;
    for (const auto& f : M.fil)
        if (f.cols() > 0 && f.rows() != r) {
            out.message = "filtration generator rows do not match rank";
            return out;
        }
    std::vector<AdaptedColumn> chosen;
    for (int lvl = static_cast<int>(M.fil.size()); lvl >= 1; --lvl) {
        const PolyMat& gens = M.fil[static_cast<std::size_t>(lvl - 1)];
        for (std::size_t c = 0; c < gens.cols(); ++c) {
            std::vector<Poly> col(r, Poly::zero(p, M.base_vars));
            for (std::size_t rr = 0; rr < r; ++rr) col[rr] = gens.at(rr, c);
            reduce_column(col, chosen);
            bool zero = std::all_of(col.begin(), col.end(), [](const Poly& q) { return q.is_zero(); });
            if (zero) continue;
            auto pivot = find_unit_row(col);
            if (!pivot) {
                out.message = "no adapted basis found: Fil^" + std::to_string(lvl) +
                              " generator column " + std::to_string(c + 1) +
                              " has no unit pivot after reduction (filtration not locally split at desk scale)";
                return out;
            }
            std::uint32_t inv = inv_mod(col[*pivot].constant_term().v, p);
            for (auto& q : col) q = q.scaled(static_cast<std::int64_t>(inv));
            chosen.push_back({std::move(col), lvl, *pivot});
        }
        // decreasing-filtration sanity: deeper chosen columns must lie in the
        // span of this level's generators; test against an echelon built from
        // the generators alone (skip when that echelon gets stuck)
        std::vector<AdaptedColumn> level_echelon;
        bool level_echelon_complete = true;
        for (std::size_t c = 0; c < gens.cols(); ++c) {
            std::vector<Poly> col(r, Poly::zero(p, M.base_vars));
            for (std::size_t rr = 0; rr < r; ++rr) col[rr] = gens.at(rr, c);
            reduce_column(col, level_echelon);
            if (std::all_of(col.begin(), col.end(), [](const Poly& q) { return q.is_zero(); })) continue;
            auto pv = find_unit_row(col);
            if (!pv) { level_echelon_complete = false; break; }
            std::uint32_t inv = inv_mod(col[*pv].constant_term().v, p);
            for (auto& q : col) q = q.scaled(static_cast<std::int64_t>(inv));
            level_echelon.push_back({std::move(col), lvl, *pv});
        }
        if (level_echelon_complete) {
            for (const auto& ac : chosen) {
                if (ac.weight <= lvl) continue;
                std::vector<Poly> probe = ac.v;
                reduce_column(probe, level_echelon);
                if (!std::all_of(probe.begin(), probe.end(), [](const Poly& q) { return q.is_zero(); })) {
                    out.message = "filtration is not decreasing: a Fil^" + std::to_string(ac.weight) +
                                  " vector is missing from Fil^" + std::to_string(lvl);
                    return out;
                }
            }
        }
    }
    if (chosen.size() > r) {
        out.message = "filtration spans exceed the module rank";
        return out;
    }
    for (std::size_t k = 0; k < r && chosen.size() < r; ++k) {
        std::vector<Poly> col(r, Poly::zero(p, M.base_vars));
        col[k] = Poly::constant(p, M.base_vars, 1);
        reduce_column(col, chosen);
        if (std::all_of(col.begin(), col.end(), [](const Poly& q) { return q.is_zero(); })) continue;
        auto pivot = find_unit_row(col);
        if (!pivot) continue;
        std::uint32_t inv = inv_mod(col[*pivot].constant_term().v, p);
        for (auto& q : col) q = q.scaled(static_cast<std::int64_t>(inv));
        chosen.push_back({std::move(col), 0, *pivot});
    }
    if (chosen.size() != r) {
        out.message = "could not complete the adapted basis to full rank";
        return out;
    }
    std::stable_sort(chosen.begin(), chosen.end(),
                     [](const AdaptedColumn& a, const AdaptedColumn& b) { return a.weight > b.weight; });
    out.rees.basis = PolyMat(p, M.base_vars, r, r);
    out.rees.weights.clear();
    for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t i = 0; i < r; ++i) out.rees.basis.at(i, j) = chosen[j].v[i];
        out.rees.weights.push_back(chosen[j].weight);
    }
    Poly d = det(out.rees.basis);
    if (!d.is_constant() || d.is_zero()) {
        out.message = "adapted basis determinant " + d.str() + " is not a unit";
        return out;
    }
    out.ok = true;
    return out;
}

GriffithsExtension griffiths_extend(const LinearConnection& C, const FilteredModule& M,
                                    const std::string& t_name) {
    if (C.lambda != 1) throw std::invalid_argument("griffiths_extend: lambda must be 1");
    if (C.rank != M.rank || C.base_vars != M.base_vars || C.p != M.p)
        throw std::invalid_argument("griffiths_extend: module and connection mismatch");
    for (const auto& v : C.base_vars)
        if (v == t_name) throw std::invalid_argument("griffiths_extend: base variable clashes with '" + t_name + "'");
    auto built = rees_build(M);
    if (!built.ok) throw std::domain_error("griffiths_extend: " + built.message);
    GriffithsExtension out;
    out.weights = built.rees.weights;
    // row-convention change of basis: f_j = sum_k V(k,j) e_k, so g = V^T
    PolyMat g(C.p, C.base_vars, C.rank, C.rank);
    for (std::size_t j = 0; j < C.rank; ++j)
        for (std::size_t k = 0; k < C.rank; ++k) g.at(j, k) = built.rees.basis.at(k, j);
    out.adapted = gauge_transform(C, g);

    std::vector<std::string> tring = C.base_vars;
    tring.push_back(t_name);
    Poly t = Poly::variable(C.p, tring, t_name);
    out.graded_higgs = LinearConnection::canonical(C.p, C.base_vars, 0, C.rank);
    out.ok = true;
    for (std::size_t i = 0; i < C.base_vars.size(); ++i) {
        PolyMat tm(C.p, tring, C.rank, C.rank);
        for (std::size_t j = 0; j < C.rank; ++j)
            for (std::size_t k = 0; k < C.rank; ++k) {
                const Poly& entry = out.adapted.A[i].at(j, k);
                if (entry.is_zero()) continue;
                int expo = 1 + out.weights[k] - out.weights[j];
                if (expo < 0) {
                    out.ok = false;
                    if (out.violation.empty())
                        out.violation = "A[" + std::to_string(i + 1) + "](" + std::to_string(j + 1) + "," +
                                        std::to_string(k + 1) + ") = " + entry.str() + " needs t^" +
                                        std::to_string(expo);
                    continue;
                }
                tm.at(j, k) = entry.embedded_into(tring) * pow(t, static_cast<unsigned>(expo));
                if (expo == 0) out.graded_higgs.A[i].at(j, k) = entry;
            }
        out.t_matrices.push_back(std::move(tm));
    }
    if (!out.ok) {
        out.t_matrices.clear();
        out.graded_higgs = LinearConnection::canonical(C.p, C.base_vars, 0, C.rank);
    }
    return out;
}

namespace {

int max_input_degree(const LinearConnection& C, const FilteredModule& M) {
    int d = 0;
    for (const auto& m : C.A)
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) d = std::max(d, m.at(i, j).total_degree());
    for (const auto& m : M.fil)
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) d = std::max(d, m.at(i, j).total_degree());
    return d;
}

// Solutions of the linear intertwining system d_i(phi) + phi D_i = C_i phi.
std::vector<PolyMat> intertwiner_space(const LinearConnection& D, const LinearConnection& C, int bound) {
    const std::uint32_t p = C.p;
    const std::size_t r = C.rank;
    const std::size_t m = C.base_vars.size();
    int maxdeg = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = 0; b < r; ++b)
                maxdeg = std::max({maxdeg, D.A[i].at(a, b).total_degree(), C.A[i].at(a, b).total_degree()});
    MonomialBasis dom(m, bound);
    MonomialBasis img(m, bound + std::max(1, maxdeg));
    const std::size_t N = dom.size(), Mi = img.size();
    FpMat sys(p, m * r * r * Mi, r * r * N);
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b)
            for (std::size_t mu = 0; mu < N; ++mu) {
                std::size_t col = (a * r + b) * N + mu;
                Poly mono = Poly::monomial(p, C.base_vars, dom[mu], 1);
                for (std::size_t i = 0; i < m; ++i) {
                    auto put = [&](std::size_t j, std::size_t k, const Poly& q) {
                        for (const auto& [e, cf] : q.terms()) {
                            auto idx = img.index_of(e);
                            if (idx < 0) throw std::domain_error("fontaine: degree overflow in witness solve");
                            std::size_t row = ((i * r + j) * r + k) * Mi + static_cast<std::size_t>(idx);
                            sys.at(row, col) = add_mod(sys.at(row, col), cf, p);
                        }
                    };
                    // d_i phi contributes at (a,b)
                    put(a, b, derivative(mono, i));
                    // (phi D_i)(a,k) = sum_b phi(a,b) D_i(b,k)
                    for (std::size_t k = 0; k < r; ++k)
                        if (!D.A[i].at(b, k).is_zero()) put(a, k, mono * D.A[i].at(b, k));
                    // -(C_i phi)(j,b) = -sum_a C_i(j,a) phi(a,b)
                    for (std::size_t j = 0; j < r; ++j)
                        if (!C.A[i].at(j, a).is_zero()) put(j, b, -(mono * C.A[i].at(j, a)));
                }
            }
    auto kernel = kernel_basis(std::move(sys));
    std::vector<PolyMat> sols;
    for (const auto& vec : kernel) {
        PolyMat phi(p, C.base_vars, r, r);
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = 0; b < r; ++b) {
                std::vector<std::uint32_t> coords(vec.begin() + static_cast<std::ptrdiff_t>(((a * r + b)) * N),
                                                  vec.begin() + static_cast<std::ptrdiff_t>(((a * r + b) + 1) * N));
                phi.at(a, b) = dom.from_coords(p, C.base_vars, coords);
            }
        sols.push_back(std::move(phi));
    }
    return sols;
}

bool is_unit_det(const PolyMat& phi) {
    Poly d = det(phi);
    return d.is_constant() && !d.is_zero();
}

} // namespace

FontaineReport fontaine_periodicity_check(const LinearConnection& C, const FilteredModule& M,
                                          const FrobLift& L, int deg_bound, std::uint64_t seed) {
    FontaineReport rep;
    rep.extension = griffiths_extend(C, M);
    if (!rep.extension.ok) {
        rep.status = FontaineStatus::fail;
        rep.detail = "Griffiths transversality violated: " + rep.extension.violation;
        return rep;
    }
    if (rep.extension.weights.front() > static_cast<int>(C.p) - 1) {
        rep.status = FontaineStatus::fail;
        rep.detail = "filtration level " + std::to_string(rep.extension.weights.front()) +
                     " exceeds p - 1";
        return rep;
    }
    LinearHiggs neg = rep.extension.graded_higgs;
    for (auto& m : neg.A) m = -m;
    auto lvl = nilpotency_level(neg.A, 1);
    if (!lvl) {
        rep.status = FontaineStatus::fail;
        rep.detail = "graded Higgs field is not p-nilpotent";
        return rep;
    }
    LinearConnection D = inverse_cartier_linear(neg, L, 1);
    const int B = deg_bound > 0 ? deg_bound : 2 * (1 + max_input_degree(C, M));
    auto sols = intertwiner_space(D, C, B);
    if (sols.empty()) {
        rep.status = FontaineStatus::inconclusive;
        rep.detail = "no intertwiner within degree bound " + std::to_string(B);
        return rep;
    }
    for (const auto& phi : sols)
        if (is_unit_det(phi)) {
            rep.witness = phi;
            rep.status = FontaineStatus::pass;
            rep.detail = "witness found among " + std::to_string(sols.size()) + " basis intertwiners";
            return rep;
        }
    // randomized combinations, low-degree solutions first (their determinants
    // have the fewest coefficients forced to cancel)
    auto mat_deg = [](const PolyMat& m) {
        int d = 0;
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) d = std::max(d, m.at(i, j).total_degree());
        return d;
    };
    std::vector<std::size_t> order(sols.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return mat_deg(sols[a]) < mat_deg(sols[b]); });
    Rng rng(seed ^ 0x466f6e7461696eULL);
    for (std::size_t take : {std::size_t(4), std::size_t(8), sols.size()}) {
        std::size_t n = std::min(take, sols.size());
        for (int attempt = 0; attempt < 96; ++attempt) {
            PolyMat phi(C.p, C.base_vars, C.rank, C.rank);
            for (std::size_t k = 0; k < n; ++k) {
                std::uint32_t c = static_cast<std::uint32_t>(rng.below(C.p));
                if (c == 0) continue;
                phi = phi + Poly::constant(C.p, C.base_vars, c) * sols[order[k]];
            }
            if (is_unit_det(phi)) {
                rep.witness = phi;
                rep.status = FontaineStatus::pass;
                rep.detail = "witness found by randomized combination (seeded)";
                return rep;
            }
        }
    }
    rep.status = FontaineStatus::inconclusive;
    rep.detail = "intertwiners exist but no unit-determinant witness found within degree bound " +
                 std::to_string(B);
    return rep;
}

TaylorRuleReport fontaine_taylor_rule_check(const LinearConnection& C, const FilteredModule& M,
                                            const FrobLift& La, const FrobLift& Lb, int deg_bound,
                                            std::uint64_t seed) {
    TaylorRuleReport out;
    auto repb = fontaine_periodicity_check(C, M, Lb, deg_bound, seed);
    if (repb.status != FontaineStatus::pass) {
        out.detail = "beta-chart witness unavailable: " + repb.detail;
        return out;
    }
    LinearHiggs neg = repb.extension.graded_higgs;
    for (auto& m : neg.A) m = -m;
    // exponential cocycle of the -theta data between the two lifts
    std::vector<Chart> charts{{"alpha", La}, {"beta", Lb}};
    auto cocycle = gluing_cocycle(charts, neg);
    out.composed_witness = repb.witness * cocycle.g[0][1];
    LinearConnection Da = inverse_cartier_linear(neg, La, 1);
    LinearConnection moved = gauge_transform(Da, out.composed_witness);
    for (std::size_t i = 0; i < C.base_vars.size(); ++i)
        if (moved.A[i] != C.A[i]) {
            out.detail = "composed witness fails to intertwine along d/d" + C.base_vars[i];
            return out;
        }
    out.ok = true;
    return out;
}

TaylorRuleReport fontaine_taylor_rule_check(const LinearHiggs& theta, const FrobLift& La,
                                            const FrobLift& Lb, const PolyMat& phi_beta) {
    TaylorRuleReport out;
    LinearHiggs neg = theta;
    for (auto& m : neg.A) m = -m;
    LinearConnection Db = inverse_cartier_linear(neg, Lb, 1);
    LinearConnection C = gauge_transform(Db, phi_beta);
    std::vector<Chart> charts{{"alpha", La}, {"beta", Lb}};
    auto cocycle = gluing_cocycle(charts, neg);
    out.composed_witness = phi_beta * cocycle.g[0][1];
    LinearConnection Da = inverse_cartier_linear(neg, La, 1);
    LinearConnection moved = gauge_transform(Da, out.composed_witness);
    for (std::size_t i = 0; i < C.base_vars.size(); ++i)
        if (moved.A[i] != C.A[i]) {
            out.detail = "composed witness fails to intertwine along d/d" + C.base_vars[i];
            return out;
        }
    out.ok = true;
    return out;
}

} // namespace charp
