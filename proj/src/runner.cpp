#include "charp/runner.hpp"

#include "charp/gen.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace charp {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "inconclusive";
    }
}

void Report::add(const std::string& key, const std::string& value) {
    lines.push_back(key + " = " + value);
}

void Report::verdict(const std::string& check_name, Verdict v, const std::string& detail) {
    add("check." + check_name, to_string(v));
    if (!detail.empty()) add("detail." + check_name, detail);
    switch (v) {
        case Verdict::pass: ++pass_count; break;
        case Verdict::fail: ++fail_count; break;
        default: ++inconclusive_count; break;
    }
}

void Report::check(const std::string& name, bool ok, const std::string& detail) {
    verdict(name, ok ? Verdict::pass : Verdict::fail, detail);
}

Verdict Report::overall() const {
    if (fail_count > 0) return Verdict::fail;
    if (inconclusive_count > 0) return Verdict::inconclusive;
    return Verdict::pass;
}

int Report::exit_code() const {
    switch (overall()) {
        case Verdict::pass: return 0;
        case Verdict::fail: return 1;
        default: return 2;
    }
}

std::string Report::text() const {
    std::ostringstream os;
    for (const auto& l : lines) os << l << "\n";
    os << "result = " << to_string(overall()) << "\n";
    return os.str();
}

const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names = {"check",   "inverse-cartier", "cartier",
                                                   "descend", "ekedahl",         "glue",
                                                   "rees",    "fontaine",        "suite"};
    return names;
}

namespace {

struct Ctx {
    const ProblemFile& pf;
    Report& rep;
    std::uint64_t seed;
    int deg_bound; // 0 = per-operation default
    int n_max;
};

std::string poly_list_str(const std::vector<Poly>& v) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i].str();
    os << "]";
    return os.str();
}

template <typename F>
void guarded(Ctx& c, const std::string& name, F&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        c.rep.verdict(name, Verdict::fail, e.what());
    }
}

// ---- check ---------------------------------------------------------------

void run_check(Ctx& c) {
    const auto& pf = c.pf;
    for (std::size_t i = 0; i < pf.lifts.size(); ++i) {
        std::string tag = "lift." + std::to_string(i + 1);
        guarded(c, tag + ".zeta_identities", [&] {
            auto repz = zeta_identities_check(zeta_matrix(pf.lifts[i]));
            c.rep.check(tag + ".zeta_identities", repz.ok, repz.detail);
        });
    }
    for (std::size_t i = 0; i < pf.connections.size(); ++i) {
        const auto& C = pf.connections[i];
        std::string tag = "connection." + std::to_string(i + 1);
        c.rep.add(tag + ".lambda", std::to_string(C.lambda));
        c.rep.add(tag + ".rank", std::to_string(C.rank));
        guarded(c, tag + ".integrable", [&] {
            c.rep.check(tag + ".integrable", is_integrable(C));
            if (C.lambda == 1) {
                auto psi = p_curvature_linear(C);
                auto lvl = nilpotency_level(psi.psi, c.n_max);
                c.rep.add(tag + ".psi_nilpotency_level", lvl ? std::to_string(*lvl) : "none");
            } else {
                auto lvl = nilpotency_level(C.A, c.n_max);
                c.rep.add(tag + ".nilpotency_level", lvl ? std::to_string(*lvl) : "none");
            }
        });
    }
    for (std::size_t i = 0; i < pf.higgs.size(); ++i) {
        std::string tag = "higgs." + std::to_string(i + 1);
        guarded(c, tag + ".invariants", [&] {
            pf.higgs[i].validate();
            c.rep.check(tag + ".invariants", true);
            auto lvl = nilpotency_level_derivations(pf.higgs[i].theta, c.n_max);
            c.rep.add(tag + ".nilpotency_level", lvl ? std::to_string(*lvl) : "none");
        });
    }
    for (std::size_t i = 0; i < pf.foliations.size(); ++i) {
        std::string tag = "foliation." + std::to_string(i + 1);
        guarded(c, tag + ".invariants", [&] {
            pf.foliations[i].validate();
            c.rep.check(tag + ".invariants", true);
            auto psi = foliation_p_curvature(pf.foliations[i]);
            auto lvl = nilpotency_level_derivations(psi.psi, c.n_max);
            c.rep.add(tag + ".psi_nilpotency_level", lvl ? std::to_string(*lvl) : "none");
        });
    }
    if (pf.cover) {
        guarded(c, "cover.invariants", [&] {
            for (const auto& ch : pf.cover->charts)
                if (ch.lift.base_vars != pf.cover->theta.base_vars)
                    throw std::invalid_argument("chart '" + ch.id + "' base mismatch");
            auto lvl = nilpotency_level(pf.cover->theta.A, 1);
            if (!lvl) throw std::domain_error("cover Higgs data not p-nilpotent");
            c.rep.check("cover.invariants", true);
        });
    }
    if (pf.fontaine) {
        guarded(c, "fontaine.filtration_split", [&] {
            auto built = rees_build(pf.fontaine->filtration);
            c.rep.check("fontaine.filtration_split", built.ok, built.message);
        });
    }
}

// ---- inverse-cartier -------------------------------------------------------

const FrobLift& require_lift(Ctx& c) {
    if (!c.pf.lifts.empty()) return c.pf.lifts.front();
    if (c.pf.fontaine && !c.pf.fontaine->lifts.empty()) return c.pf.fontaine->lifts.front();
    throw std::runtime_error("task requires a lift block");
}

void run_inverse_cartier(Ctx& c) {
    bool any = false;
    for (std::size_t i = 0; i < c.pf.higgs.size(); ++i) {
        any = true;
        const auto& H = c.pf.higgs[i];
        std::string tag = "higgs." + std::to_string(i + 1);
        guarded(c, tag + ".inverse_cartier", [&] {
            auto F = inverse_cartier_nonlinear(H, require_lift(c), c.n_max);
            // construction verifies integrability and psi = pullback(theta)
            c.rep.check(tag + ".inverse_cartier.integrable", true);
            c.rep.check(tag + ".inverse_cartier.p_curvature_formula", true);
            for (std::size_t k = 0; k < F.nabla.size(); ++k)
                c.rep.add(tag + ".result.D" + std::to_string(k + 1), F.nabla[k].str());
        });
    }
    for (std::size_t i = 0; i < c.pf.connections.size(); ++i) {
        const auto& C = c.pf.connections[i];
        if (C.lambda != 0) continue;
        any = true;
        std::string tag = "connection." + std::to_string(i + 1);
        guarded(c, tag + ".inverse_cartier", [&] {
            auto conn = inverse_cartier_linear(C, require_lift(c), c.n_max);
            auto psi = p_curvature_linear(conn);
            bool oracle = true;
            for (std::size_t k = 0; k < psi.psi.size(); ++k)
                if (psi.psi[k] != frobenius_substitute(C.A[k], 1)) oracle = false;
            c.rep.check(tag + ".inverse_cartier.p_curvature_is_pullback", oracle);
            for (std::size_t k = 0; k < conn.A.size(); ++k)
                c.rep.add(tag + ".result.A" + std::to_string(k + 1), conn.A[k].str());
        });
    }
    if (!any) throw std::runtime_error("inverse-cartier: no higgs block or lambda=0 connection present");
}

// ---- cartier / descend -----------------------------------------------------

void descend_foliation(Ctx& c, const FoliatedTotalSpace& F, const std::string& tag) {
    auto sub = horizontal_subalgebra(F, c.deg_bound, false);
    c.rep.check(tag + ".descent_certificate", sub.certified, sub.message);
    c.rep.add(tag + ".descent_generators", poly_list_str(sub.generators));
    c.rep.add(tag + ".descent_certified_degree", std::to_string(sub.certified_degree));
}

void run_cartier(Ctx& c) {
    bool any = false;
    for (std::size_t i = 0; i < c.pf.foliations.size(); ++i) {
        any = true;
        const auto& F = c.pf.foliations[i];
        std::string tag = "foliation." + std::to_string(i + 1);
        guarded(c, tag + ".cartier", [&] {
            auto Fnew = forward_deform(F, require_lift(c), c.n_max);
            c.rep.check(tag + ".forward_deform.p_closed", foliation_p_curvature(Fnew).is_zero());
            for (std::size_t k = 0; k < Fnew.nabla.size(); ++k)
                c.rep.add(tag + ".deformed.D" + std::to_string(k + 1), Fnew.nabla[k].str());
            descend_foliation(c, Fnew, tag);
            auto psi = foliation_p_curvature(F);
            for (std::size_t k = 0; k < psi.psi.size(); ++k)
                c.rep.add(tag + ".higgs_pullback.Theta" + std::to_string(k + 1), psi.psi[k].str());
        });
    }
    for (std::size_t i = 0; i < c.pf.connections.size(); ++i) {
        const auto& C = c.pf.connections[i];
        if (C.lambda != 1) continue;
        any = true;
        std::string tag = "connection." + std::to_string(i + 1);
        guarded(c, tag + ".cartier", [&] {
            auto psi = p_curvature_linear(C);
            bool flat = std::all_of(psi.psi.begin(), psi.psi.end(),
                                    [](const PolyMat& m) { return m.is_zero(); });
            if (flat) {
                auto hb = cartier_descend_linear(C, c.deg_bound);
                c.rep.check(tag + ".descend.horizontal_frame", true);
                c.rep.add(tag + ".horizontal_basis", hb.basis.str());
            } else {
                auto F = functor_G_foliation(C);
                auto Fnew = forward_deform(F, require_lift(c), c.n_max);
                c.rep.check(tag + ".forward_deform.p_closed", foliation_p_curvature(Fnew).is_zero());
                descend_foliation(c, Fnew, tag);
            }
        });
    }
    if (!any) throw std::runtime_error("cartier: no foliation or lambda=1 connection present");
}

void run_descend(Ctx& c) {
    bool any = false;
    for (std::size_t i = 0; i < c.pf.foliations.size(); ++i) {
        any = true;
        std::string tag = "foliation." + std::to_string(i + 1);
        guarded(c, tag + ".descend", [&] {
            if (!foliation_p_curvature(c.pf.foliations[i]).is_zero()) {
                c.rep.add(tag + ".descend", "skipped (p-curvature nonzero; run cartier)");
                return;
            }
            descend_foliation(c, c.pf.foliations[i], tag);
        });
    }
    for (std::size_t i = 0; i < c.pf.connections.size(); ++i) {
        const auto& C = c.pf.connections[i];
        if (C.lambda != 1) continue;
        any = true;
        std::string tag = "connection." + std::to_string(i + 1);
        guarded(c, tag + ".descend", [&] {
            auto hb = cartier_descend_linear(C, c.deg_bound);
            c.rep.check(tag + ".descend.horizontal_frame", true);
            c.rep.add(tag + ".horizontal_basis", hb.basis.str());
        });
    }
    if (!any) throw std::runtime_error("descend: no foliation or lambda=1 connection present");
}

void run_ekedahl(Ctx& c) {
    if (c.pf.foliations.empty()) throw std::runtime_error("ekedahl: no foliation block present");
    for (std::size_t i = 0; i < c.pf.foliations.size(); ++i) {
        const auto& F = c.pf.foliations[i];
        std::string tag = "foliation." + std::to_string(i + 1);
        guarded(c, tag + ".ekedahl", [&] {
            if (!foliation_p_curvature(F).is_zero()) {
                c.rep.add(tag + ".ekedahl", "skipped (p-curvature nonzero; run cartier first)");
                return;
            }
            auto sub = horizontal_subalgebra(F, c.deg_bound, false);
            c.rep.check(tag + ".descent_certificate", sub.certified, sub.message);
            int bound = c.deg_bound > 0 ? c.deg_bound : sub.deg_bound;
            auto ann = ekedahl_ann_of_subalgebra(F.p, F.ring(), sub.generators, bound);
            for (std::size_t k = 0; k < ann.size(); ++k)
                c.rep.add(tag + ".ann.e" + std::to_string(k + 1), ann[k].str());
            c.rep.check(tag + ".ann_involution", same_derivation_span(ann, F.nabla, bound));
            auto chart = transversal_chart_check(
                F.nabla, [&] {
                    std::vector<Poly> fs;
                    for (const auto& v : F.base_vars) fs.push_back(Poly::variable(F.p, F.ring(), v));
                    return fs;
                }());
            c.rep.check(tag + ".transversal_chart", chart.ok, chart.detail);
        });
    }
}

// ---- glue -------------------------------------------------------------------

void run_glue(Ctx& c) {
    if (!c.pf.cover) throw std::runtime_error("glue: no cover block present");
    const auto& cb = *c.pf.cover;
    guarded(c, "cover.glue", [&] {
        auto cocycle = gluing_cocycle(cb.charts, cb.theta);
        for (const auto& [a, b, m] : cb.overrides) {
            auto ia = std::find(cocycle.chart_ids.begin(), cocycle.chart_ids.end(), a);
            auto ib = std::find(cocycle.chart_ids.begin(), cocycle.chart_ids.end(), b);
            if (ia == cocycle.chart_ids.end() || ib == cocycle.chart_ids.end())
                throw std::runtime_error("cover override names unknown chart '" + a + "'/'" + b + "'");
            cocycle.g[static_cast<std::size_t>(ia - cocycle.chart_ids.begin())]
                     [static_cast<std::size_t>(ib - cocycle.chart_ids.begin())] =
                         m.embedded_into(cb.theta.base_vars);
        }
        for (std::size_t a = 0; a < cb.charts.size(); ++a)
            for (std::size_t b = a + 1; b < cb.charts.size(); ++b)
                c.rep.add("cover.g." + cocycle.chart_ids[a] + "." + cocycle.chart_ids[b],
                          cocycle.g[a][b].str());
        auto cond = cocycle_condition_check(cocycle);
        c.rep.check("cover.cocycle_condition", cond.ok, cond.detail);
        if (!cond.ok && cond.defect.rows() > 0) c.rep.add("cover.cocycle_defect", cond.defect.str());
        auto transport = gluing_compatibility_check(cb.charts, cb.theta, cocycle);
        c.rep.check("cover.gauge_transport", transport.ok, transport.detail);
        if (!transport.ok && transport.defect.rows() > 0)
            c.rep.add("cover.gauge_defect", transport.defect.str());
        // exp/log consistency on the computed matrices
        bool explog = true;
        for (std::size_t a = 0; a < cb.charts.size() && explog; ++a)
            for (std::size_t b = 0; b < cb.charts.size(); ++b) {
                if (a == b) continue;
                if (truncated_exp(truncated_log(cocycle.g[a][b])) != cocycle.g[a][b]) {
                    explog = false;
                    break;
                }
            }
        c.rep.check("cover.exp_log_roundtrip", explog);
    });
}

// ---- rees / fontaine ---------------------------------------------------------

void run_rees(Ctx& c) {
    if (!c.pf.fontaine) throw std::runtime_error("rees: no fontaine block present");
    const auto& fb = *c.pf.fontaine;
    guarded(c, "fontaine.rees", [&] {
        auto built = rees_build(fb.filtration);
        c.rep.check("fontaine.rees_build", built.ok, built.message);
        if (!built.ok) return;
        std::ostringstream w;
        for (std::size_t i = 0; i < built.rees.weights.size(); ++i)
            w << (i ? "," : "") << built.rees.weights[i];
        c.rep.add("fontaine.weights", w.str());
        c.rep.add("fontaine.adapted_basis", built.rees.basis.str());
        auto ext = griffiths_extend(fb.connection, fb.filtration);
        c.rep.check("fontaine.griffiths_transversal", ext.ok, ext.violation);
        if (ext.ok) {
            for (std::size_t i = 0; i < ext.t_matrices.size(); ++i)
                c.rep.add("fontaine.t_connection.A" + std::to_string(i + 1), ext.t_matrices[i].str());
            for (std::size_t i = 0; i < ext.graded_higgs.A.size(); ++i)
                c.rep.add("fontaine.graded_higgs.theta" + std::to_string(i + 1),
                          ext.graded_higgs.A[i].str());
        }
    });
}

void run_fontaine(Ctx& c) {
    if (!c.pf.fontaine) throw std::runtime_error("fontaine: no fontaine block present");
    const auto& fb = *c.pf.fontaine;
    guarded(c, "fontaine.periodicity", [&] {
        auto rep = fontaine_periodicity_check(fb.connection, fb.filtration, fb.lifts.front(),
                                              c.deg_bound, c.seed);
        Verdict v = rep.status == FontaineStatus::pass          ? Verdict::pass
                    : rep.status == FontaineStatus::fail        ? Verdict::fail
                                                                : Verdict::inconclusive;
        c.rep.verdict("fontaine.periodicity", v, rep.detail);
        if (rep.status == FontaineStatus::pass) c.rep.add("fontaine.witness", rep.witness.str());
        if (fb.lifts.size() >= 2) {
            auto tr = fontaine_taylor_rule_check(fb.connection, fb.filtration, fb.lifts[0], fb.lifts[1],
                                                 c.deg_bound, c.seed);
            c.rep.check("fontaine.taylor_rule", tr.ok, tr.detail);
            if (tr.ok) c.rep.add("fontaine.taylor_witness", tr.composed_witness.str());
        }
    });
}

// ---- seeded property mini-suites ---------------------------------------------

void run_properties(Ctx& c) {
    const std::uint32_t p = c.pf.p;
    Rng rng(c.seed * 0x9e3779b97f4a7c15ULL + p);
    std::vector<std::string> base = {"s"};
    if (!c.pf.lifts.empty()) base = c.pf.lifts.front().base_vars;

    guarded(c, "properties.jacobson_residual", [&] {
        std::vector<std::string> ring = base;
        ring.push_back("u");
        bool ok = true;
        for (int i = 0; i < 5 && ok; ++i) {
            auto D1 = random_derivation(rng, p, ring, 2, 2);
            auto D2 = random_derivation(rng, p, ring, 2, 2);
            ok = jacobson_decompose(D1, D2).residual.is_zero();
        }
        c.rep.check("properties.jacobson_residual", ok);
    });
    guarded(c, "properties.zeta_identities_random", [&] {
        bool ok = true;
        for (int i = 0; i < 3 && ok; ++i)
            ok = zeta_identities_check(zeta_matrix(random_lift(rng, p, base, 3, 2))).ok;
        c.rep.check("properties.zeta_identities_random", ok);
    });
    guarded(c, "properties.linear_inverse_cartier_oracle", [&] {
        bool ok = true;
        for (int i = 0; i < 2 && ok; ++i) {
            auto H = random_linear_higgs(rng, p, base, 2, 2, false);
            auto L = random_lift(rng, p, base, 2, 2);
            auto C = inverse_cartier_linear(H, L, 1);
            auto psi = p_curvature_linear(C);
            for (std::size_t k = 0; k < psi.psi.size(); ++k)
                if (psi.psi[k] != frobenius_substitute(H.A[k], 1)) ok = false;
        }
        c.rep.check("properties.linear_inverse_cartier_oracle", ok);
    });
    for (std::size_t i = 0; i < c.pf.foliations.size(); ++i) {
        const auto& F = c.pf.foliations[i];
        std::string tag = "properties.foliation." + std::to_string(i + 1);
        guarded(c, tag + ".p_curvature_laws", [&] {
            auto psi = foliation_p_curvature(F);
            bool ok = true;
            for (std::size_t a = 0; a < psi.psi.size() && ok; ++a) {
                for (std::size_t b = 0; b < psi.psi.size() && ok; ++b)
                    ok = lie_bracket(psi.psi[a], psi.psi[b]).is_zero();
                for (std::size_t b = 0; b < F.nabla.size() && ok; ++b)
                    ok = lie_bracket(psi.psi[a], F.nabla[b]).is_zero();
            }
            // semilinearity of the p-power on a random function multiple
            auto cpoly = random_poly(rng, p, F.ring(), 2, 2);
            for (std::size_t a = 0; a < F.nabla.size() && ok; ++a)
                ok = p_power_semilinearity_check(F.nabla[a], cpoly).ok;
            c.rep.check(tag + ".p_curvature_laws", ok);
        });
    }
}

} // namespace

Report run_task(const ProblemFile& pf, const std::string& task, const RunOptions& opts) {
    if (std::find(task_names().begin(), task_names().end(), task) == task_names().end())
        throw std::runtime_error("unknown task '" + task + "'");
    Report rep;
    rep.add("format_version", "1");
    rep.add("task", task);
    rep.add("p", std::to_string(pf.p));
    std::uint64_t seed = opts.seed_overridden ? opts.seed : pf.seed;
    rep.add("seed", std::to_string(seed));
    if (pf.max_degree > 0) set_degree_cap(pf.max_degree);
    Ctx ctx{pf, rep, seed, opts.deg_bound > 0 ? opts.deg_bound : pf.deg_bound, pf.n_max};

    auto applicable = [&](const std::string& t) {
        if (t == "check") return true;
        if (t == "inverse-cartier")
            return !pf.higgs.empty() || std::any_of(pf.connections.begin(), pf.connections.end(),
                                                    [](const auto& c) { return c.lambda == 0; });
        if (t == "cartier" || t == "descend")
            return !pf.foliations.empty() || std::any_of(pf.connections.begin(), pf.connections.end(),
                                                         [](const auto& c) { return c.lambda == 1; });
        if (t == "ekedahl") return !pf.foliations.empty();
        if (t == "glue") return pf.cover.has_value();
        if (t == "rees" || t == "fontaine") return pf.fontaine.has_value();
        return false;
    };
    auto dispatch = [&](const std::string& t) {
        if (t == "check") run_check(ctx);
        else if (t == "inverse-cartier") run_inverse_cartier(ctx);
        else if (t == "cartier") run_cartier(ctx);
        else if (t == "descend") run_descend(ctx);
        else if (t == "ekedahl") run_ekedahl(ctx);
        else if (t == "glue") run_glue(ctx);
        else if (t == "rees") run_rees(ctx);
        else if (t == "fontaine") run_fontaine(ctx);
    };
    if (task == "suite") {
        for (const auto& t : task_names()) {
            if (t == "suite" || !applicable(t)) continue;
            rep.add("section", t);
            dispatch(t);
        }
        rep.add("section", "properties");
        run_properties(ctx);
    } else {
        dispatch(task);
    }
    return rep;
}

} // namespace charp
