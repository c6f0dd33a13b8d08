// Acceptance gate: runs every criterion and prints one PASS/FAIL line each.
// Exits nonzero if any criterion fails.

#include <algorithm>
#include <cstdio>

#include "nsbc/acceptance.hpp"

int main() {
    const auto results = nsbc::run_acceptance();
    bool all_pass = true;
    for (const auto& r : results) {
        std::printf("%s criterion-%d: %s [%.0f ms] %s\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.wall_ms, r.details.c_str());
        all_pass &= r.pass;
    }
    std::printf("%s: %zu/%zu criteria passed\n", all_pass ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                static_cast<std::size_t>(
                    std::count_if(results.begin(), results.end(),
                                  [](const auto& r) { return r.pass; })),
                results.size());
    return all_pass ? 0 : 1;
}
