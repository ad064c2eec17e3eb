#include "charp/gluing.hpp"

#include <stdexcept>

namespace charp {

bool is_nilpotent_of_order_at_most(const PolyMat& N, unsigned k) {
    return mat_pow(N, k).is_zero();
}

PolyMat truncated_exp(const PolyMat& N) {
    if (N.rows() != N.cols()) throw std::invalid_argument("truncated_exp: square matrix required");
    const std::uint32_t p = N.modulus();
    if (!is_nilpotent_of_order_at_most(N, p))
        throw std::domain_error("truncated_exp: nilpotency order >= p, truncated series is not exp");
    PolyMat acc = PolyMat::identity(p, N.ring(), N.rows());
    PolyMat term = PolyMat::identity(p, N.ring(), N.rows());
    std::uint32_t factorial = 1;
    for (std::uint32_t k = 1; k < p; ++k) {
        term = term * N;
        if (term.is_zero()) break;
        factorial = mul_mod(factorial, k, p);
        Poly c = Poly::constant(p, N.ring(), static_cast<std::int64_t>(inv_mod(factorial, p)));
        acc = acc + c * term;
    }
    return acc;
}

PolyMat truncated_log(const PolyMat& G) {
    if (G.rows() != G.cols()) throw std::invalid_argument("truncated_log: square matrix required");
    const std::uint32_t p = G.modulus();
    PolyMat M = G - PolyMat::identity(p, G.ring(), G.rows());
    if (!is_nilpotent_of_order_at_most(M, p))
        throw std::domain_error("truncated_log: G - I has nilpotency order >= p");
    PolyMat acc(p, G.ring(), G.rows(), G.cols());
    PolyMat term = PolyMat::identity(p, G.ring(), G.rows());
    for (std::uint32_t k = 1; k < p; ++k) {
        term = term * M;
        if (term.is_zero()) break;
        std::uint32_t c = inv_mod(k, p);
        if (k % 2 == 0) c = sub_mod(0, c, p);
        acc = acc + Poly::constant(p, G.ring(), static_cast<std::int64_t>(c)) * term;
    }
    return acc;
}

namespace {

void require_gluing_input(const std::vector<Chart>& charts, const LinearHiggs& theta) {
    if (charts.empty()) throw std::invalid_argument("gluing: at least one chart required");
    if (theta.lambda != 0) throw std::invalid_argument("gluing: Higgs data must have lambda = 0");
    for (const auto& ch : charts)
        if (ch.lift.base_vars != theta.base_vars || ch.lift.p != theta.p)
            throw std::invalid_argument("gluing: chart '" + ch.id + "' does not share the Higgs base");
    // commuting components: the exponential-additivity the cocycle relies on
    for (std::size_t i = 0; i < theta.A.size(); ++i)
        for (std::size_t j = i + 1; j < theta.A.size(); ++j)
            if (!(theta.A[i] * theta.A[j] - theta.A[j] * theta.A[i]).is_zero())
                throw std::domain_error("gluing: Higgs components do not commute");
    auto level = nilpotency_level(theta.A, 1);
    if (!level)
        throw std::domain_error("gluing: Higgs data must be p-nilpotent");
}

} // namespace

GluingCocycle gluing_cocycle(const std::vector<Chart>& charts, const LinearHiggs& theta) {
    require_gluing_input(charts, theta);
    const std::size_t n = charts.size();
    const std::uint32_t p = theta.p;
    std::vector<PolyMat> pulled;
    pulled.reserve(theta.A.size());
    for (const auto& t : theta.A) pulled.push_back(frobenius_substitute(t, 1));
    GluingCocycle out;
    for (const auto& ch : charts) out.chart_ids.push_back(ch.id);
    out.g.assign(n, std::vector<PolyMat>(n, PolyMat::identity(p, theta.base_vars, theta.rank)));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            auto h = di_cocycle(charts[a].lift, charts[b].lift);
            PolyMat N(p, theta.base_vars, theta.rank, theta.rank);
            for (std::size_t j = 0; j < h.size(); ++j) {
                if (h[j].is_zero()) continue;
                N = N + h[j] * pulled[j];
            }
            out.g[a][b] = truncated_exp(N);
        }
    return out;
}

GluingReport cocycle_condition_check(const GluingCocycle& G) {
    GluingReport rep;
    const std::size_t n = G.chart_ids.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                PolyMat lhs = G.g[a][b] * G.g[b][c];
                if (lhs != G.g[a][c]) {
                    rep.ok = false;
                    rep.detail = "cocycle fails on (" + G.chart_ids[a] + "," + G.chart_ids[b] + "," +
                                 G.chart_ids[c] + ")";
                    rep.defect = lhs - G.g[a][c];
                    return rep;
                }
            }
    return rep;
}

GluingReport gluing_compatibility_check(const std::vector<Chart>& charts, const LinearHiggs& theta,
                                        const GluingCocycle& G) {
    GluingReport rep;
    require_gluing_input(charts, theta);
    std::vector<LinearConnection> local;
    local.reserve(charts.size());
    for (const auto& ch : charts) local.push_back(inverse_cartier_linear(theta, ch.lift, 1));
    for (std::size_t a = 0; a < charts.size(); ++a)
        for (std::size_t b = 0; b < charts.size(); ++b) {
            if (a == b) continue;
            LinearConnection moved = gauge_transform(local[a], G.g[a][b]);
            for (std::size_t i = 0; i < theta.base_vars.size(); ++i) {
                if (moved.A[i] != local[b].A[i]) {
                    rep.ok = false;
                    rep.detail = "gauge transport fails on (" + charts[a].id + "," + charts[b].id +
                                 ") along d/d" + theta.base_vars[i];
                    rep.defect = moved.A[i] - local[b].A[i];
                    return rep;
                }
            }
        }
    return rep;
}

GluingReport gluing_compatibility_check(const std::vector<Chart>& charts, const LinearHiggs& theta) {
    return gluing_compatibility_check(charts, theta, gluing_cocycle(charts, theta));
}

} // namespace charp
