#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nsbc {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string details;
    double wall_ms = 0.0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20250809ULL;
};

// Runs the full acceptance matrix; one result per criterion, in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

} // namespace nsbc
