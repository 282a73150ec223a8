// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.
#include <chrono>
#include <cstdio>
#include <vector>

#include "lvexp/checks.hpp"

int main() {
    using namespace lvexp;
    using clock = std::chrono::steady_clock;
    struct Entry {
        const char* label;
        CheckResult (*fn)();
    };
    const std::vector<Entry> entries = {
        {"1 collapse identities", [] { return check_collapse(200); }},
        {"2 Ito reduction", [] { return check_reduction(100); }},
        {"3 closed form vs MC", [] { return check_closed_vs_mc(200000); }},
        {"4 remainder order", [] { return check_remainder_order(20, 4096); }},
        {"5 quadrature oracles", [] { return check_quadrature(400000); }},
        {"6 PCE quality", [] { return check_pce(50000); }},
        {"7 table reproduction", [] { return check_tables(); }},
        {"8 determinism", [] { return check_determinism(40000); }},
    };
    bool all_pass = true;
    for (const auto& e : entries) {
        auto t0 = clock::now();
        CheckResult r = e.fn();
        double secs = std::chrono::duration<double>(clock::now() - t0).count();
        std::printf("[%s] criterion %s (%.1fs): %s\n", r.pass ? "PASS" : "FAIL", e.label, secs,
                    r.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && r.pass;
    }
    std::printf("%s\n", all_pass ? "ACCEPTANCE: ALL CRITERIA PASSED" : "ACCEPTANCE: FAILURES");
    return all_pass ? 0 : 1;
}
