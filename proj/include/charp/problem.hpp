#ifndef CHARP_PROBLEM_HPP
#define CHARP_PROBLEM_HPP

#include "charp/gluing.hpp"
#include "charp/nonlinear.hpp"
#include "charp/rees.hpp"

#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace charp {

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line, int col)
        : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + what),
          line(line), col(col) {}
    int line, col;
};

struct CoverBlock {
    std::vector<Chart> charts;
    LinearHiggs theta;
    bool has_theta = false;
    // explicit cocycle overrides g[<id>][<id>] = matrix (verification-harness input)
    std::vector<std::tuple<std::string, std::string, PolyMat>> overrides;
};

struct FontaineBlock {
    LinearConnection connection;
    FilteredModule filtration;
    std::vector<FrobLift> lifts; // one required; a second enables the Taylor-rule check
};

// Parsed problem file: header fields plus blocks.
struct ProblemFile {
    std::uint32_t p = 0;
    std::uint64_t seed = 0;
    int max_degree = 0; // 0 keeps the global cap
    int n_max = 8;
    int deg_bound = 0;  // 0 selects per-operation defaults
    std::string default_task;
    std::string expect; // CI metadata only: pass | fail | inconclusive

    std::vector<FrobLift> lifts;
    std::vector<LinearConnection> connections;
    std::vector<HiggsTotalSpace> higgs;
    std::vector<FoliatedTotalSpace> foliations;
    std::optional<CoverBlock> cover;
    std::optional<FontaineBlock> fontaine;
};

ProblemFile parse_problem_file(const std::string& text);
ProblemFile parse_problem_path(const std::string& path);

// Degree-one-in-fiber Higgs total space as matrix data (the linear realization
// the gluing module works with). Throws when the values are not linear.
LinearHiggs higgs_space_to_matrices(const HiggsTotalSpace& H);

} // namespace charp

#endif
