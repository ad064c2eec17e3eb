#ifndef CHARP_RUNNER_HPP
#define CHARP_RUNNER_HPP

#include "charp/problem.hpp"

#include <string>
#include <vector>

namespace charp {

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);

// Deterministic line-oriented report: key = value records. No timing data
// (byte-identical output across runs is a contract).
struct Report {
    std::vector<std::string> lines;
    int pass_count = 0, fail_count = 0, inconclusive_count = 0;

    void add(const std::string& key, const std::string& value);
    void verdict(const std::string& check, Verdict v, const std::string& detail = "");
    void check(const std::string& name, bool ok, const std::string& detail = "");

    Verdict overall() const;
    // 0 pass, 1 fail, 2 inconclusive
    int exit_code() const;
    std::string text() const;
};

struct RunOptions {
    std::uint64_t seed = 0;
    bool seed_overridden = false;
    int deg_bound = 0; // 0 keeps file/default value
};

// Valid task names, in suite execution order.
const std::vector<std::string>& task_names();

Report run_task(const ProblemFile& pf, const std::string& task, const RunOptions& opts = {});

} // namespace charp

#endif
