#include <doctest.h>

#include "charp/fpsolve.hpp"
#include "charp/gen.hpp"
#include "charp/gluing.hpp"

using namespace charp;

namespace {

const std::vector<std::string> S1 = {"s"};

PolyMat make_mat(std::uint32_t p, const std::vector<std::string>& ring,
                 std::vector<std::vector<std::string>> rows) {
    PolyMat m(p, ring, rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = parse_poly(p, ring, rows[i][j]);
    return m;
}

LinearHiggs jordan_higgs(std::uint32_t p, std::size_t r) {
    PolyMat N(p, S1, r, r);
    for (std::size_t i = 0; i + 1 < r; ++i) N.at(i, i + 1) = Poly::constant(p, S1, 1);
    return LinearHiggs(p, S1, 0, r, {N});
}

} // namespace

TEST_CASE("truncated exponential examples") {
    // N = 0
    CHECK(truncated_exp(PolyMat(5, S1, 2, 2)) == PolyMat::identity(5, S1, 2));

    // p=3, full Jordan 3x3: I + N + 2 N^2
    auto N = make_mat(3, S1, {{"0", "1", "0"}, {"0", "0", "1"}, {"0", "0", "0"}});
    auto E = truncated_exp(N);
    auto expect = PolyMat::identity(3, S1, 3) + N + Poly::constant(3, S1, 2) * (N * N);
    CHECK(E == expect);
}

TEST_CASE("exp(N) exp(-N) = I on random strictly upper matrices") {
    Rng rng(2024);
    for (int i = 0; i < 10; ++i) {
        auto N = random_strictly_upper(rng, 5, S1, 4, 2, 2);
        CHECK(truncated_exp(N) * truncated_exp(-N) == PolyMat::identity(5, S1, 4));
    }
}

TEST_CASE("exp is a homomorphism on commuting nilpotents") {
    Rng rng(2025);
    for (int i = 0; i < 5; ++i) {
        // commuting pair: polynomial multiples of one nilpotent
        PolyMat N(5, S1, 3, 3);
        N.at(0, 1) = Poly::constant(5, S1, 1);
        N.at(1, 2) = parse_poly(5, S1, "s");
        Poly f = random_poly(rng, 5, S1, 2, 2);
        Poly g = random_poly(rng, 5, S1, 2, 2);
        PolyMat M1 = f * N, M2 = g * N;
        CHECK(truncated_exp(M1 + M2) == truncated_exp(M1) * truncated_exp(M2));
    }
}

TEST_CASE("exp rejects nilpotency order >= p") {
    // Jordan block of size 4 over F_3: N^3 != 0
    auto N = make_mat(3, S1, {{"0", "1", "0", "0"},
                              {"0", "0", "1", "0"},
                              {"0", "0", "0", "1"},
                              {"0", "0", "0", "0"}});
    CHECK_THROWS_AS(truncated_exp(N), std::domain_error);
}

TEST_CASE("exp/log inverse pair") {
    Rng rng(2026);
    for (std::uint32_t p : {3u, 5u}) {
        for (int i = 0; i < 5; ++i) {
            auto N = random_strictly_upper(rng, p, S1, p == 3 ? 3 : 4, 1, 1);
            CHECK(truncated_log(truncated_exp(N)) == N);
            auto G = PolyMat::identity(p, S1, 3) + random_strictly_upper(rng, p, S1, 3, 1, 1);
            CHECK(truncated_exp(truncated_log(G)) == G);
        }
    }
}

TEST_CASE("identical lifts glue trivially") {
    std::vector<Chart> charts = {{"a", FrobLift::standard(3, S1)}, {"b", FrobLift::standard(3, S1)}};
    auto theta = jordan_higgs(3, 2);
    auto G = gluing_cocycle(charts, theta);
    CHECK(G.g[0][1] == PolyMat::identity(3, S1, 2));
    CHECK(cocycle_condition_check(G).ok);
    CHECK(gluing_compatibility_check(charts, theta).ok);
}

TEST_CASE("single chart and zero Higgs data are vacuous") {
    std::vector<Chart> one = {{"a", FrobLift::standard(3, S1)}};
    auto theta = jordan_higgs(3, 2);
    CHECK(gluing_compatibility_check(one, theta).ok);
    // theta = 0: all transitions are the identity and transport is canonical
    auto zero = LinearHiggs::canonical(3, S1, 0, 2);
    std::vector<Chart> charts = {{"a", FrobLift::standard(3, S1)},
                                 {"b", FrobLift(3, S1, {parse_poly(3, S1, "s")})}};
    auto G = gluing_cocycle(charts, zero);
    CHECK(G.g[0][1] == PolyMat::identity(3, S1, 2));
    CHECK(gluing_compatibility_check(charts, zero, G).ok);
}

TEST_CASE("two-chart worked example, p=3") {
    // lifts a=0 and a=s, theta the 2x2 Jordan block: g_ab = exp(theta~ h) = I - s theta
    std::vector<Chart> charts = {{"a", FrobLift::standard(3, S1)},
                                 {"b", FrobLift(3, S1, {parse_poly(3, S1, "s")})}};
    auto theta = jordan_higgs(3, 2);
    auto G = gluing_cocycle(charts, theta);
    auto expect = PolyMat::identity(3, S1, 2) + parse_poly(3, S1, "-s") * theta.A[0];
    CHECK(G.g[0][1] == expect);
    CHECK(cocycle_condition_check(G).ok);
    // this check pins the h sign convention
    CHECK(gluing_compatibility_check(charts, theta, G).ok);
}

TEST_CASE("three-chart cocycle and transport") {
    for (std::uint32_t p : {2u, 3u, 5u}) {
        std::vector<Chart> charts = {{"a", FrobLift::standard(p, S1)},
                                     {"b", FrobLift(p, S1, {parse_poly(p, S1, "s")})},
                                     {"c", FrobLift(p, S1, {parse_poly(p, S1, "s^2")})}};
        auto theta = jordan_higgs(p, 2);
        auto G = gluing_cocycle(charts, theta);
        CHECK(cocycle_condition_check(G).ok);
        CHECK(gluing_compatibility_check(charts, theta, G).ok);
    }
}

TEST_CASE("random covers glue") {
    for (std::uint32_t p : {2u, 3u, 5u}) {
        Rng rng(301 * p);
        for (int i = 0; i < 10; ++i) {
            std::vector<Chart> charts;
            for (int k = 0; k < 3; ++k)
                charts.push_back({std::string(1, static_cast<char>('a' + k)),
                                  random_lift(rng, p, S1, 3, 2)});
            std::size_t r = p == 2 ? 2 : 3;
            auto theta = random_linear_higgs(rng, p, S1, r, 2, false);
            auto G = gluing_cocycle(charts, theta);
            CHECK(cocycle_condition_check(G).ok);
            CHECK(gluing_compatibility_check(charts, theta, G).ok);
        }
    }
}

TEST_CASE("independence of the cover: subcover gluings are compatible") {
    // glued object from charts {a,b} vs {a,c}: transporting through either
    // path lands on the same connection, i.e. g_ac = g_ab * g_bc on the nose
    std::vector<Chart> charts = {{"a", FrobLift::standard(5, S1)},
                                 {"b", FrobLift(5, S1, {parse_poly(5, S1, "s^2")})},
                                 {"c", FrobLift(5, S1, {parse_poly(5, S1, "3*s")})}};
    auto theta = jordan_higgs(5, 3);
    auto G = gluing_cocycle(charts, theta);
    CHECK(G.g[0][2] == G.g[0][1] * G.g[1][2]);
    auto Gab = gluing_cocycle({charts[0], charts[1]}, theta);
    auto Gac = gluing_cocycle({charts[0], charts[2]}, theta);
    CHECK(Gab.g[0][1] == G.g[0][1]);
    CHECK(Gac.g[0][1] == G.g[0][2]);
}

TEST_CASE("non-commuting Higgs components are rejected") {
    std::vector<std::string> S2 = {"s1", "s2"};
    PolyMat N1(3, S2, 3, 3), N2(3, S2, 3, 3);
    N1.at(0, 1) = Poly::constant(3, S2, 1);
    N2.at(1, 2) = Poly::constant(3, S2, 1);
    LinearHiggs theta(3, S2, 0, 3, {N1, N2}); // [N1, N2] != 0
    std::vector<Chart> charts = {{"a", FrobLift::standard(3, S2)},
                                 {"b", FrobLift(3, S2, {parse_poly(3, S2, "s1"), Poly::zero(3, S2)})}};
    CHECK_THROWS_AS(gluing_cocycle(charts, theta), std::domain_error);
}

TEST_CASE("bad cocycle override fails transport with a defect witness") {
    std::vector<Chart> charts = {{"a", FrobLift::standard(3, S1)},
                                 {"b", FrobLift(3, S1, {parse_poly(3, S1, "s")})}};
    auto theta = jordan_higgs(3, 2);
    auto G = gluing_cocycle(charts, theta);
    // flip the sign convention by hand
    G.g[0][1] = truncated_exp(parse_poly(3, S1, "s") * frobenius_substitute(theta.A[0], 1));
    auto rep = gluing_compatibility_check(charts, theta, G);
    CHECK_FALSE(rep.ok);
    CHECK_FALSE(rep.defect.is_zero());
}
