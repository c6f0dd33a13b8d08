#include "nsbc/minrank.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace nsbc {

namespace {

struct TriSearch {
    const Pattern& M;
    int K, B, cap;
    std::uint64_t nodes = 0, node_limit;
    bool exceeded = false;
    int best = 0;
    std::vector<int> best_rows, best_cols;
    std::vector<int> rows, cols; // current chain

    TriSearch(const Pattern& m, std::uint64_t limit)
        : M(m), K(m.K()), B(m.B()), cap(std::min(m.K(), m.B())), node_limit(limit) {}

    // used row/col sets as bitmasks (K, B <= 10)
    void dfs(std::uint32_t used_r, std::uint32_t used_c) {
        if (++nodes > node_limit) {
            exceeded = true;
            return;
        }
        const int depth = static_cast<int>(rows.size());
        if (depth > best) {
            best = depth;
            best_rows = rows;
            best_cols = cols;
        }
        if (best == cap || exceeded) return;

        // candidate columns: unused and zero in every already-chosen row
        std::vector<int> cand;
        for (int c = 0; c < B; ++c) {
            if (used_c & (1u << c)) continue;
            bool zero_above = true;
            for (const int r : rows)
                if (M.star(r, c)) {
                    zero_above = false;
                    break;
                }
            if (zero_above) cand.push_back(c);
        }
        int free_rows = 0;
        for (int r = 0; r < K; ++r)
            if (!(used_r & (1u << r))) ++free_rows;
        if (depth + std::min<int>(free_rows, static_cast<int>(cand.size())) <= best) return;

        for (const int c : cand) {
            for (int r = 0; r < K; ++r) {
                if (used_r & (1u << r)) continue;
                if (!M.star(r, c)) continue;
                rows.push_back(r);
                cols.push_back(c);
                dfs(used_r | (1u << r), used_c | (1u << c));
                rows.pop_back();
                cols.pop_back();
                if (best == cap || exceeded) return;
            }
        }
    }
};

} // namespace

TriResult triangle_number_result(const Pattern& M, std::uint64_t node_limit) {
    if (std::min(M.K(), M.B()) > 10)
        throw std::invalid_argument("triangle_number: min(K,B) > 10 exceeds the search budget");
    TriSearch s(M, node_limit);
    s.dfs(0, 0);
    return {s.best, s.exceeded};
}

int triangle_number(const Pattern& M) {
    const auto r = triangle_number_result(M);
    if (r.budget_exceeded)
        throw std::runtime_error("triangle_number: node budget exceeded");
    return r.tri;
}

std::optional<std::pair<std::vector<int>, std::vector<int>>>
find_triangular_order(const Pattern& M, int D) {
    TriSearch s(M, 50'000'000ULL);
    s.cap = D; // stop at the first depth-D chain
    s.dfs(0, 0);
    if (s.best < D) return std::nullopt;
    return std::make_pair(std::vector<int>(s.best_rows.begin(), s.best_rows.begin() + D),
                          std::vector<int>(s.best_cols.begin(), s.best_cols.begin() + D));
}

int gf_rank(std::vector<std::vector<fe>> rows, const Field& F, WorkBudget& budget) {
    const std::size_t n = rows.empty() ? 0 : rows[0].size();
    int rank = 0;
    std::size_t pivot_col = 0;
    for (std::size_t r = 0; r < rows.size() && pivot_col < n; ++pivot_col) {
        std::size_t sel = r;
        while (sel < rows.size() && rows[sel][pivot_col] == 0) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[r], rows[sel]);
        const fe inv_p = F.inv(rows[r][pivot_col]);
        for (std::size_t i = r + 1; i < rows.size(); ++i) {
            if (rows[i][pivot_col] == 0) continue;
            const fe factor = F.mul(rows[i][pivot_col], inv_p);
            for (std::size_t j = pivot_col; j < n; ++j)
                rows[i][j] = F.sub(rows[i][j], F.mul(factor, rows[r][j]));
            budget.charge(n - pivot_col);
        }
        ++rank;
        ++r;
    }
    return rank;
}

namespace {

// Row-echelon accumulator for the incremental independence check during
// basis enumeration.
struct Echelon {
    std::vector<std::vector<fe>> rows; // reduced rows, each with a pivot
    std::vector<std::size_t> pivots;

    // returns false if v is in the span (reduction hits zero)
    bool add(std::vector<fe> v, const Field& F, WorkBudget& budget) {
        const std::size_t n = v.size();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const fe c = v[pivots[i]];
            if (c == 0) continue;
            const fe factor = F.div(c, rows[i][pivots[i]]);
            for (std::size_t j = 0; j < n; ++j)
                v[j] = F.sub(v[j], F.mul(factor, rows[i][j]));
            budget.charge(n);
        }
        std::size_t p = 0;
        while (p < n && v[p] == 0) ++p;
        if (p == n) return false;
        rows.push_back(std::move(v));
        pivots.push_back(p);
        return true;
    }
};

// Solves for coefficient vectors c with c . basis fitting target row t:
// zero cells impose homogeneous linear constraints; the nullspace of those
// constraints is walked and each candidate checked on the star cells.
bool row_fits_span(const std::vector<std::vector<fe>>& basis, const Pattern& M, int t,
                   const Field& F, WorkBudget& budget) {
    const int r = static_cast<int>(basis.size());
    const int B = M.B();

    // constraint matrix: one row per zero cell of target row
    std::vector<std::vector<fe>> A;
    for (int j = 0; j < B; ++j) {
        if (M.star(t, j)) continue;
        std::vector<fe> row(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i) row[i] = basis[i][j];
        A.push_back(std::move(row));
    }

    // nullspace basis of A over F^r by elimination
    std::vector<std::vector<fe>> mat = A;
    std::vector<int> pivot_of_col(static_cast<std::size_t>(r), -1);
    int rank = 0;
    for (int col = 0; col < r && rank < static_cast<int>(mat.size()); ++col) {
        int sel = -1;
        for (int i = rank; i < static_cast<int>(mat.size()); ++i)
            if (mat[i][col] != 0) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        std::swap(mat[rank], mat[sel]);
        const fe inv_p = F.inv(mat[rank][col]);
        for (int i = 0; i < static_cast<int>(mat.size()); ++i) {
            if (i == rank || mat[i][col] == 0) continue;
            const fe factor = F.mul(mat[i][col], inv_p);
            for (int j = col; j < r; ++j)
                mat[i][j] = F.sub(mat[i][j], F.mul(factor, mat[rank][j]));
            budget.charge(static_cast<std::uint64_t>(r - col));
        }
        pivot_of_col[col] = rank;
        ++rank;
    }
    std::vector<int> free_cols;
    for (int col = 0; col < r; ++col)
        if (pivot_of_col[col] < 0) free_cols.push_back(col);

    std::vector<std::vector<fe>> null_basis;
    for (const int fc : free_cols) {
        std::vector<fe> v(static_cast<std::size_t>(r), 0);
        v[fc] = 1;
        for (int col = 0; col < r; ++col) {
            const int pr = pivot_of_col[col];
            if (pr < 0) continue;
            // mat[pr] . v = 0  =>  v[col] = -(mat[pr][fc] * v[fc]) / mat[pr][col]
            v[col] = F.neg(F.div(F.mul(mat[pr][fc], v[fc]), mat[pr][col]));
        }
        null_basis.push_back(std::move(v));
    }

    const std::size_t dim = null_basis.size();
    const std::uint32_t q = F.q();
    std::uint64_t combos = 1;
    for (std::size_t i = 0; i < dim; ++i) combos *= q;

    std::vector<int> star_cols;
    for (int j = 0; j < B; ++j)
        if (M.star(t, j)) star_cols.push_back(j);

    std::vector<fe> coeff(static_cast<std::size_t>(r));
    for (std::uint64_t idx = 1; idx < combos; ++idx) { // idx 0 is c = 0, never fits
        if (!budget.charge(static_cast<std::uint64_t>(r) + star_cols.size())) return false;
        std::uint64_t tmp = idx;
        std::fill(coeff.begin(), coeff.end(), 0);
        for (std::size_t l = 0; l < dim; ++l) {
            const fe x = static_cast<fe>(tmp % q);
            tmp /= q;
            if (x == 0) continue;
            for (int i = 0; i < r; ++i)
                coeff[i] = F.add(coeff[i], F.mul(x, null_basis[l][i]));
        }
        bool ok = true;
        for (const int j : star_cols) {
            fe v = 0;
            for (int i = 0; i < r; ++i) v = F.add(v, F.mul(coeff[i], basis[i][j]));
            if (v == 0) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

struct BasisSearch {
    const Pattern& M;
    const Field& F;
    WorkBudget& budget;
    int r;
    std::vector<int> subset; // chosen row indices, ascending
    std::vector<std::vector<fe>> values; // assigned basis row vectors
    bool found = false;

    // Enumerates star values of subset row `level` up to the row/column
    // scaling freedom: scaling rows or columns of a fitting matrix by
    // nonzero constants preserves the fit, the rank, and which row subsets
    // are independent, so the first basis row can be pinned to all-ones on
    // its support (column scales) and every later basis row's first star to
    // 1 (row scales). Partial bases that go linearly dependent are pruned.
    void assign(int level, const Echelon& ech) {
        if (found || budget.exceeded) return;
        if (level == r) {
            found = check_other_rows();
            return;
        }
        const int t = subset[level];
        std::vector<int> stars;
        for (int j = 0; j < M.B(); ++j)
            if (M.star(t, j)) stars.push_back(j);
        const std::size_t nfree = level == 0 ? 0 : stars.size() - 1;
        const std::uint32_t qm1 = F.q() - 1;
        std::uint64_t combos = 1;
        for (std::size_t i = 0; i < nfree; ++i) combos *= qm1;

        std::vector<fe> row(static_cast<std::size_t>(M.B()), 0);
        for (std::uint64_t idx = 0; idx < combos; ++idx) {
            if (!budget.charge(stars.size())) return;
            std::fill(row.begin(), row.end(), 0);
            for (const int j : stars) row[j] = 1;
            std::uint64_t tmp = idx;
            for (std::size_t i = 0; i < nfree; ++i) {
                row[stars[i + 1]] = static_cast<fe>(1 + tmp % qm1);
                tmp /= qm1;
            }
            Echelon next = ech;
            if (!next.add(row, F, budget)) continue; // dependent, prune
            values.push_back(row);
            assign(level + 1, next);
            values.pop_back();
            if (found || budget.exceeded) return;
        }
    }

    bool check_other_rows() {
        for (int t = 0; t < M.K(); ++t) {
            if (std::find(subset.begin(), subset.end(), t) != subset.end()) continue;
            if (!row_fits_span(values, M, t, F, budget)) return false;
            if (budget.exceeded) return false;
        }
        return !budget.exceeded;
    }
};

void for_each_subset(int n, int r, const std::function<bool(const std::vector<int>&)>& fn) {
    std::vector<int> idx(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) idx[i] = i;
    while (true) {
        if (!fn(idx)) return;
        int i = r - 1;
        while (i >= 0 && idx[i] == n - r + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
}

} // namespace

MinrankResult minrank_exact(const Pattern& M, const Field& F, WorkBudget budget) {
    const int K = M.K(), B = M.B();
    const int tri = triangle_number(M);
    for (int r = std::max(tri, 1); r <= std::min(K, B); ++r) {
        bool found = false;
        for_each_subset(K, r, [&](const std::vector<int>& subset) {
            BasisSearch s{M, F, budget, r, subset, {}, false};
            s.assign(0, Echelon{});
            if (s.found) {
                found = true;
                return false;
            }
            return !budget.exceeded;
        });
        if (found) return {r, false, budget.used};
        if (budget.exceeded) return {-1, true, budget.used};
    }
    // a fitting matrix always exists (e.g. all stars = 1 has some rank), so
    // the loop must certify a rank at or before min(K,B)
    throw std::logic_error("minrank_exact: no rank certified");
}

MinrankResult minrank_bruteforce(const Pattern& M, const Field& F, bool normalize_rows,
                                 WorkBudget budget) {
    const int K = M.K(), B = M.B();
    const std::uint32_t qm1 = F.q() - 1;

    std::vector<std::pair<int, int>> free_stars; // (row, col) of enumerated cells
    std::vector<int> pinned_col(static_cast<std::size_t>(K), -1);
    for (int k = 0; k < K; ++k) {
        bool first = true;
        for (int b = 0; b < B; ++b) {
            if (!M.star(k, b)) continue;
            if (normalize_rows && first) {
                pinned_col[k] = b;
                first = false;
                continue;
            }
            first = false;
            free_stars.emplace_back(k, b);
        }
    }

    double log_total = static_cast<double>(free_stars.size()) * std::log2(double(qm1));
    if (log_total > 40)
        throw std::invalid_argument("minrank_bruteforce: enumeration larger than 2^40");
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < free_stars.size(); ++i) total *= qm1;

    std::vector<std::vector<fe>> G(static_cast<std::size_t>(K),
                                   std::vector<fe>(static_cast<std::size_t>(B), 0));
    for (int k = 0; k < K; ++k)
        if (pinned_col[k] >= 0) G[k][pinned_col[k]] = 1;

    int best = std::min(K, B);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        std::uint64_t tmp = idx;
        for (const auto& [row, col] : free_stars) {
            G[row][col] = static_cast<fe>(1 + tmp % qm1);
            tmp /= qm1;
        }
        best = std::min(best, gf_rank(G, F, budget));
        if (budget.exceeded) return {-1, true, budget.used};
        if (best == 1) break; // rank cannot go lower
    }
    return {best, false, budget.used};
}

int nonzeros_upper_bound(const Pattern& M) {
    int min_col = M.K(), min_row = M.B();
    for (int b = 0; b < M.B(); ++b) min_col = std::min(min_col, M.col_stars(b));
    for (int k = 0; k < M.K(); ++k) min_row = std::min(min_row, M.row_stars(k));
    const int by_cols = M.K() + 1 - min_col;
    const int by_rows = M.B() + 1 - min_row;
    return std::min(by_cols, by_rows);
}

NsSumBounds ns_sum_bounds(const Pattern& M, const Field& F, WorkBudget budget) {
    NsSumBounds out;
    out.tri = triangle_number(M);
    const double lq = std::log2(static_cast<double>(F.q()));
    out.lower_bits = out.tri * lq;
    const auto mr = minrank_exact(M, F, budget);
    if (mr.budget_exceeded) {
        out.upper_rank = std::min({nonzeros_upper_bound(M), std::min(M.K(), M.B())});
        out.minrank_certified = false;
    } else {
        out.upper_rank = mr.rank;
        out.minrank_certified = true;
    }
    out.upper_bits = out.upper_rank * lq;
    // tight only when both sides are computed and agree: at small q the
    // min-rank of a pattern with min(K,B) <= 6 can exceed its triangle
    // number (forced cancellations), so dimension alone certifies nothing
    out.tight = out.minrank_certified && out.upper_rank == out.tri;
    return out;
}

} // namespace nsbc
