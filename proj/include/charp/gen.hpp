#ifndef CHARP_GEN_HPP
#define CHARP_GEN_HPP

#include "charp/fpsolve.hpp"
#include "charp/frobenius.hpp"
#include "charp/linear.hpp"
#include "charp/nonlinear.hpp"

namespace charp {

// Seeded instance generators for the randomized identity suites. Everything
// here is deterministic in the Rng stream.

inline Poly random_poly(Rng& rng, std::uint32_t p, const std::vector<std::string>& ring, int maxdeg,
                        int terms) {
    Poly r(p, ring);
    for (int t = 0; t < terms; ++t) {
        Exponents e(ring.size(), 0);
        int budget = static_cast<int>(rng.below(static_cast<std::uint64_t>(maxdeg) + 1));
        for (std::size_t i = 0; i < ring.size() && budget > 0; ++i) {
            int d = static_cast<int>(rng.below(static_cast<std::uint64_t>(budget) + 1));
            e[i] = d;
            budget -= d;
        }
        r.add_term(e, static_cast<std::int64_t>(rng.below(p)));
    }
    return r;
}

inline DerivationOp random_derivation(Rng& rng, std::uint32_t p, const std::vector<std::string>& ring,
                                      int maxdeg, int terms) {
    DerivationOp D(p, ring);
    for (std::size_t i = 0; i < ring.size(); ++i) D.values[i] = random_poly(rng, p, ring, maxdeg, terms);
    return D;
}

inline FrobLift random_lift(Rng& rng, std::uint32_t p, const std::vector<std::string>& base, int maxdeg,
                            int terms) {
    std::vector<Poly> a;
    for (std::size_t i = 0; i < base.size(); ++i) a.push_back(random_poly(rng, p, base, maxdeg, terms));
    return FrobLift(p, base, a);
}

inline PolyMat random_strictly_upper(Rng& rng, std::uint32_t p, const std::vector<std::string>& ring,
                                     std::size_t r, int maxdeg, int terms) {
    PolyMat N(p, ring, r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) N.at(i, j) = random_poly(rng, p, ring, maxdeg, terms);
    return N;
}

// Integrable nilpotent Higgs data: theta_i = f_i(s) * N for one strictly upper
// triangular N, so all components commute. With r <= p the data is p-nilpotent;
// a single Jordan block of size r > p gives nilpotency level 2.
inline LinearHiggs random_linear_higgs(Rng& rng, std::uint32_t p, const std::vector<std::string>& base,
                                       std::size_t r, int maxdeg, bool jordan_block) {
    PolyMat N(p, base, r, r);
    if (jordan_block) {
        for (std::size_t i = 0; i + 1 < r; ++i) N.at(i, i + 1) = Poly::constant(p, base, 1);
    } else {
        N = random_strictly_upper(rng, p, base, r, 0, 1);
    }
    std::vector<PolyMat> A;
    for (std::size_t i = 0; i < base.size(); ++i) {
        Poly f = random_poly(rng, p, base, maxdeg, 2);
        if (i == 0 && f.is_zero()) f = Poly::constant(p, base, 1);
        A.push_back(f * N);
    }
    return LinearHiggs(p, base, 0, r, A);
}

// Unimodular gauge: I + (strictly upper with polynomial entries).
inline PolyMat random_unimodular(Rng& rng, std::uint32_t p, const std::vector<std::string>& ring,
                                 std::size_t r, int maxdeg) {
    PolyMat g = PolyMat::identity(p, ring, r);
    return g + random_strictly_upper(rng, p, ring, r, maxdeg, 2);
}

// Vertical derivation-level Higgs data on F_p[base, fiber]: one commuting
// family f_i(s) * W with W = t_1^2 d/dt_1 style fields (p-nilpotent for all p).
inline HiggsTotalSpace random_higgs_space(Rng& rng, std::uint32_t p, const std::vector<std::string>& base,
                                          const std::vector<std::string>& fiber, int maxdeg) {
    HiggsTotalSpace H;
    H.p = p;
    H.base_vars = base;
    H.fiber_vars = fiber;
    auto vars = H.ring();
    DerivationOp W(p, vars);
    Poly t1 = Poly::variable(p, vars, fiber.front());
    W.set_value(fiber.front(), t1 * t1);
    for (std::size_t i = 0; i < base.size(); ++i) {
        Poly f = random_poly(rng, p, base, maxdeg, 2).embedded_into(vars);
        if (i == 0 && f.is_zero()) f = Poly::constant(p, vars, 1);
        H.theta.push_back(f * W);
    }
    return H;
}

} // namespace charp

#endif
