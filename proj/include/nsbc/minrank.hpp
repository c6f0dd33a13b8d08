#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nsbc/field.hpp"
#include "nsbc/pattern.hpp"

namespace nsbc {

// Elementary rank/solve steps. One unit is one inner-loop elimination or
// enumeration operation.
struct WorkBudget {
    std::uint64_t limit = 200'000'000ULL;
    std::uint64_t used = 0;
    bool exceeded = false;

    bool charge(std::uint64_t n) {
        used += n;
        if (used > limit) exceeded = true;
        return !exceeded;
    }
};

struct TriResult {
    int tri = 0;
    bool budget_exceeded = false; // best-found is reported when exceeded
};

// Largest D such that some row/column permutation of M exposes a D x D
// lower-triangular submatrix with stars on the diagonal. Depth-first branch
// and bound over (row, column) pair selections. Requires min(K,B) <= 10.
TriResult triangle_number_result(const Pattern& M, std::uint64_t node_limit = 50'000'000ULL);
int triangle_number(const Pattern& M);

// Certificate ordering for D selected rows/columns such that the permuted
// submatrix is lower triangular with stars on the diagonal. Deterministic
// (first found in lexicographic DFS order).
std::optional<std::pair<std::vector<int>, std::vector<int>>>
find_triangular_order(const Pattern& M, int D);

// Rank over F of a list of row vectors; charges one budget unit per
// elimination inner step.
int gf_rank(std::vector<std::vector<fe>> rows, const Field& F, WorkBudget& budget);

struct MinrankResult {
    int rank = -1; // certified min-rank when !budget_exceeded
    bool budget_exceeded = false;
    std::uint64_t work = 0;
};

// Minimum rank over all matrices in F^{K x B} whose zero cells match M's
// zeros exactly and star cells are nonzero. Searches candidate ranks
// ascending from the triangle number; for each rank r, iterates r-subsets of
// rows as a basis (values enumerated up to row scaling), requires linear
// independence, and solves every remaining row against the basis subject to
// the exact zero/nonzero pattern. The first feasible r is the answer.
MinrankResult minrank_exact(const Pattern& M, const Field& F, WorkBudget budget = {});

// Independent oracle: enumerates fitting matrices directly ((q-1)^s of them,
// or (q-1)^(s-K) when rows are normalized so their first star is 1; row
// scaling changes neither rank nor the fitting property) and ranks each.
MinrankResult minrank_bruteforce(const Pattern& M, const Field& F,
                                 bool normalize_rows = false, WorkBudget budget = {});

// K+1-r bound from the sparser direction: every column with >= r stars gives
// minrank <= K+1-r, every row with >= r stars gives minrank <= B+1-r; the
// tighter of the two is returned.
int nonzeros_upper_bound(const Pattern& M);

struct NsSumBounds {
    double lower_bits = 0.0; // tri(M) * log2 q
    double upper_bits = 0.0; // minrank(M, F) * log2 q, or the fallback bound
    bool tight = false;
    int tri = 0;
    int upper_rank = 0;        // min-rank when certified, else fallback
    bool minrank_certified = false;
};

NsSumBounds ns_sum_bounds(const Pattern& M, const Field& F, WorkBudget budget = {});

} // namespace nsbc
