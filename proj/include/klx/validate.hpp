#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace klx {

struct CheckResult {
    std::string suite;
    std::string name;
    bool pass;
    double measured;
    double tol;
    std::string note;
};

using Checks = std::vector<CheckResult>;

// Suites: "lemma", "spectra", "smallball", "montecarlo", or "all".
Checks run_suite(const std::string& suite, std::uint64_t seed);

Checks run_suite_lemma(std::uint64_t seed);
Checks run_suite_spectra(std::uint64_t seed);
Checks run_suite_smallball(std::uint64_t seed);
Checks run_suite_montecarlo(std::uint64_t seed);

bool all_pass(const Checks& checks);

// Deterministic reports: identical inputs give byte-identical strings.
std::string render_report_text(const Checks& checks, const std::string& suite,
                               std::uint64_t seed);
std::string render_report_json(const Checks& checks, const std::string& suite,
                               std::uint64_t seed);

}  // namespace klx
