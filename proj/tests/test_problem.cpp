#include <doctest.h>

#include "charp/problem.hpp"
#include "charp/runner.hpp"

using namespace charp;

TEST_CASE("parse a full problem file") {
    std::string text = R"(
# header
p = 3
seed = 7
n_max = 4
task = suite

lift { vars = [s]; a = [s^2] }
connection { vars = [s]; lambda = 1; rank = 2; A[1] = [[0, s], [0, 0]] }
higgs { base = [s]; fiber = [t1, t2]; Theta[1] = t1 -> t2 }
foliation { base = [s]; fiber = [t]; D[1] = s -> 1; t -> t^2 }
)";
    auto pf = parse_problem_file(text);
    CHECK(pf.p == 3);
    CHECK(pf.seed == 7);
    CHECK(pf.n_max == 4);
    CHECK(pf.default_task == "suite");
    REQUIRE(pf.lifts.size() == 1);
    CHECK(pf.lifts[0].a[0] == parse_poly(3, {"s"}, "s^2"));
    REQUIRE(pf.connections.size() == 1);
    CHECK(pf.connections[0].A[0].at(0, 1) == parse_poly(3, {"s"}, "s"));
    REQUIRE(pf.higgs.size() == 1);
    pf.higgs[0].validate();
    REQUIRE(pf.foliations.size() == 1);
    pf.foliations[0].validate();
}

TEST_CASE("derivation clause lookahead ends at the next block key") {
    std::string text = R"(
p = 2
foliation { base = [s]; fiber = [t, u]; D[1] = s -> 1; t -> t^2; u -> t*u }
)";
    auto pf = parse_problem_file(text);
    auto vars = pf.foliations[0].ring();
    CHECK(pf.foliations[0].nabla[0].values[2] == parse_poly(2, vars, "t*u"));
}

TEST_CASE("connection block inherits lift variables") {
    std::string text = R"(
p = 5
lift { vars = [x, y]; a = [0, x] }
connection { lambda = 0; rank = 1; A[2] = [[x]] }
)";
    auto pf = parse_problem_file(text);
    CHECK(pf.connections[0].base_vars == std::vector<std::string>{"x", "y"});
    CHECK(pf.connections[0].A[1].at(0, 0) == parse_poly(5, {"x", "y"}, "x"));
    CHECK(pf.connections[0].A[0].is_zero());
}

TEST_CASE("cover block with linear higgs data and override") {
    std::string text = R"(
p = 3
cover {
  chart a { lift { vars = [s]; a = [0] } }
  chart b { lift { vars = [s]; a = [s] } }
  higgs { base = [s]; fiber = [t1, t2]; Theta[1] = t1 -> s*t2 }
  g[a][b] = [[1, 0], [0, 1]]
}
)";
    auto pf = parse_problem_file(text);
    REQUIRE(pf.cover.has_value());
    CHECK(pf.cover->charts.size() == 2);
    CHECK(pf.cover->theta.A[0].at(0, 1) == parse_poly(3, {"s"}, "s"));
    CHECK(pf.cover->overrides.size() == 1);
}

TEST_CASE("nonlinear higgs data in a cover is rejected") {
    std::string text = R"(
p = 3
cover {
  chart a { lift { vars = [s]; a = [0] } }
  higgs { base = [s]; fiber = [t]; Theta[1] = t -> t^2 }
}
)";
    CHECK_THROWS_AS(parse_problem_file(text), ParseError);
}

TEST_CASE("fontaine block") {
    std::string text = R"(
p = 3
fontaine {
  connection { vars = [s]; lambda = 1; rank = 2; A[1] = [[0, 1], [0, 0]] }
  filtration = [ [[1, 0]] ]
  lift { vars = [s]; a = [0] }
  lift { vars = [s]; a = [s] }
}
)";
    auto pf = parse_problem_file(text);
    REQUIRE(pf.fontaine.has_value());
    CHECK(pf.fontaine->lifts.size() == 2);
    CHECK(pf.fontaine->filtration.fil.size() == 1);
    CHECK(pf.fontaine->filtration.fil[0].cols() == 1);
    CHECK(pf.fontaine->filtration.fil[0].at(0, 0) == parse_poly(3, {"s"}, "1"));
}

TEST_CASE("parse errors carry line/column positions") {
    try {
        parse_problem_file("p = 4\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
    }
    CHECK_THROWS_AS(parse_problem_file("p = 3\nlift { vars = [s]; a = [0 }\n"), ParseError);
    CHECK_THROWS_AS(parse_problem_file("lift { vars = [s]; a = [0] }\n"), ParseError); // p missing
    CHECK_THROWS_AS(parse_problem_file("p = 3\nunknownkey = 1\n"), ParseError);
}

TEST_CASE("unknown task is rejected by the runner") {
    auto pf = parse_problem_file("p = 3\n");
    CHECK_THROWS(run_task(pf, "frobnicate"));
}

TEST_CASE("report text shape and exit codes") {
    auto pf = parse_problem_file("p = 3\nlift { vars = [s]; a = [0] }\n");
    auto rep = run_task(pf, "check");
    CHECK(rep.exit_code() == 0);
    CHECK(rep.text().find("format_version = 1") == 0);
    CHECK(rep.text().find("result = pass") != std::string::npos);
}
