#include "nsbc/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace nsbc {

namespace {

void finalize(TreeNetwork& T) {
    const int B = T.B;
    T.children.assign(static_cast<std::size_t>(B) + 1, {});
    for (int b = 1; b <= B; ++b) T.children[T.parent[b]].push_back(b);
    for (auto& c : T.children) std::sort(c.begin(), c.end());
    T.leaves.clear();
    for (int b = 1; b <= B; ++b)
        if (T.children[b].empty()) T.leaves.push_back(b);
    T.depth.assign(static_cast<std::size_t>(B) + 1, 0);
    // parents always carry smaller depth; compute by walking up
    for (int b = 1; b <= B; ++b) {
        int d = 0, cur = b;
        while (cur != 0) {
            cur = T.parent[cur];
            ++d;
            if (d > B) throw std::invalid_argument("TreeNetwork: parent links contain a cycle");
        }
        T.depth[b] = d;
    }
}

} // namespace

TreeNetwork TreeNetwork::from_parents(std::vector<int> parent_of_antenna,
                                      std::vector<int> rx_assoc) {
    TreeNetwork T;
    T.B = static_cast<int>(parent_of_antenna.size());
    T.K = static_cast<int>(rx_assoc.size());
    if (T.B < 1) throw std::invalid_argument("TreeNetwork: need at least one antenna");
    if (T.K < 1) throw std::invalid_argument("TreeNetwork: need at least one receiver");
    T.parent.assign(static_cast<std::size_t>(T.B) + 1, -1);
    for (int b = 1; b <= T.B; ++b) {
        const int p = parent_of_antenna[b - 1];
        if (p < 0 || p > T.B || p == b)
            throw std::invalid_argument("TreeNetwork: bad parent for antenna " +
                                        std::to_string(b));
        T.parent[b] = p;
    }
    T.rx_assoc = std::move(rx_assoc);
    for (const int a : T.rx_assoc)
        if (a < 1 || a > T.B)
            throw std::invalid_argument("TreeNetwork: receiver associated with unknown antenna");
    finalize(T);
    for (int b = 1; b <= T.B; ++b)
        if (T.receivers_of(b).empty())
            throw std::invalid_argument("TreeNetwork: antenna " + std::to_string(b) +
                                        " has no associated receiver");
    return T;
}

TreeNetwork TreeNetwork::path(int K) {
    std::vector<int> parent(static_cast<std::size_t>(K));
    std::vector<int> assoc(static_cast<std::size_t>(K));
    for (int b = 1; b <= K; ++b) {
        parent[b - 1] = b - 1;
        assoc[b - 1] = b;
    }
    return from_parents(std::move(parent), std::move(assoc));
}

TreeNetwork TreeNetwork::star(int K) {
    std::vector<int> parent(static_cast<std::size_t>(K), 0);
    std::vector<int> assoc(static_cast<std::size_t>(K));
    for (int b = 1; b <= K; ++b) assoc[b - 1] = b;
    return from_parents(std::move(parent), std::move(assoc));
}

std::vector<int> TreeNetwork::root_path(int b) const {
    std::vector<int> path;
    for (int cur = b; cur != 0; cur = parent[cur]) path.push_back(cur);
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<int> TreeNetwork::receivers_of(int b) const {
    std::vector<int> r;
    for (int k = 0; k < K; ++k)
        if (rx_assoc[k] == b) r.push_back(k);
    return r;
}

std::vector<int> TreeNetwork::dfs_order() const {
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(B));
    std::vector<int> stack(children[0].rbegin(), children[0].rend());
    while (!stack.empty()) {
        const int b = stack.back();
        stack.pop_back();
        order.push_back(b);
        for (auto it = children[b].rbegin(); it != children[b].rend(); ++it)
            stack.push_back(*it);
    }
    return order;
}

Pattern TreeNetwork::to_pattern() const {
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(K) * B, 0);
    for (int k = 0; k < K; ++k)
        for (const int b : root_path(rx_assoc[k]))
            cells[static_cast<std::size_t>(k) * B + (b - 1)] = 1;
    return Pattern(K, B, std::move(cells));
}

TreeParse tree_from_pattern(const Pattern& M) {
    const int K = M.K(), B = M.B();
    std::vector<std::vector<int>> col(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b) col[b] = M.col_support(b);

    auto subset = [](const std::vector<int>& a, const std::vector<int>& b) {
        return std::includes(b.begin(), b.end(), a.begin(), a.end());
    };

    for (int i = 0; i < B; ++i)
        for (int j = i + 1; j < B; ++j)
            if (col[i] == col[j])
                return {std::nullopt,
                        "antennas " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                            " have identical receiver sets; no unique associated antenna by depth"};

    // parent = minimal strict superset among column supports; root when none
    std::vector<int> parent(static_cast<std::size_t>(B), 0);
    for (int i = 0; i < B; ++i) {
        int best = 0;
        std::size_t best_size = static_cast<std::size_t>(K) + 1;
        for (int j = 0; j < B; ++j) {
            if (j == i || col[j].size() <= col[i].size()) continue;
            if (!subset(col[i], col[j])) continue;
            if (col[j].size() < best_size) {
                best_size = col[j].size();
                best = j + 1;
            }
        }
        parent[i] = best;
    }

    // ancestor supports must be totally ordered (a tree, not a DAG): every
    // strict superset of col[i] must contain the chosen parent's support
    for (int i = 0; i < B; ++i) {
        for (int j = 0; j < B; ++j) {
            if (j == i || col[j].size() <= col[i].size() || !subset(col[i], col[j])) continue;
            const int p = parent[i] - 1;
            if (p != j && !subset(col[p], col[j]))
                return {std::nullopt,
                        "antenna " + std::to_string(i + 1) +
                            " is heard under incomparable antennas " + std::to_string(p + 1) +
                            " and " + std::to_string(j + 1) +
                            "; its audible set is not a single root path"};
        }
    }

    TreeNetwork T;
    T.B = B;
    T.parent.assign(static_cast<std::size_t>(B) + 1, -1);
    for (int b = 1; b <= B; ++b) T.parent[b] = parent[b - 1];
    try {
        finalize(T);
    } catch (const std::exception& e) {
        return {std::nullopt, e.what()};
    }

    // receiver rows must be exact root paths ending at their deepest antenna
    T.K = K;
    T.rx_assoc.assign(static_cast<std::size_t>(K), 0);
    for (int k = 0; k < K; ++k) {
        const auto sup = M.row_support(k);
        int deepest = 0, deepest_depth = -1;
        for (const int b0 : sup) {
            if (T.depth[b0 + 1] > deepest_depth) {
                deepest_depth = T.depth[b0 + 1];
                deepest = b0 + 1;
            }
        }
        auto path = T.root_path(deepest);
        std::vector<int> sup1(sup.size());
        for (std::size_t i = 0; i < sup.size(); ++i) sup1[i] = sup[i] + 1;
        std::sort(path.begin(), path.end());
        if (path != sup1)
            return {std::nullopt,
                    "receiver " + std::to_string(k + 1) +
                        " does not hear exactly the root path of its deepest antenna " +
                        std::to_string(deepest)};
        T.rx_assoc[k] = deepest;
    }

    for (int b = 1; b <= B; ++b)
        if (T.receivers_of(b).empty())
            return {std::nullopt,
                    "antenna " + std::to_string(b) + " has no associated receiver"};

    return {std::move(T), ""};
}

double dof_at_antenna(const TreeNetwork& T, const DofTuple& d, int b) {
    double s = 0.0;
    for (int k = 0; k < T.K; ++k)
        if (T.rx_assoc[k] == b) s += d.d[k];
    return s;
}

namespace {
void check_dimension(const TreeNetwork& T, const DofTuple& d) {
    if (static_cast<int>(d.size()) != T.K)
        throw std::invalid_argument("DofTuple: dimension " + std::to_string(d.size()) +
                                    " does not match K = " + std::to_string(T.K));
    for (const double v : d.d)
        if (v < 0.0) throw std::invalid_argument("DofTuple: entries must be non-negative");
}
} // namespace

bool classical_region_contains(const TreeNetwork& T, const DofTuple& d) {
    check_dimension(T, d);
    for (const int leaf : T.leaves) {
        double s = 0.0;
        for (const int b : T.root_path(leaf)) s += dof_at_antenna(T, d, b);
        if (s > 1.0 + kRegionSlack) return false;
    }
    return true;
}

bool ns_region_contains(const TreeNetwork& T, const DofTuple& d) {
    check_dimension(T, d);
    for (int b = 1; b <= T.B; ++b)
        if (dof_at_antenna(T, d, b) > 1.0 + kRegionSlack) return false;
    return true;
}

bool fully_connected_region_contains(int K, const DofTuple& d) {
    if (static_cast<int>(d.size()) != K)
        throw std::invalid_argument("DofTuple: dimension does not match K");
    double s = 0.0;
    for (const double v : d.d) {
        if (v < 0.0) throw std::invalid_argument("DofTuple: entries must be non-negative");
        s += v;
    }
    return s <= 1.0 + kRegionSlack;
}

SumDof sum_dof(const TreeNetwork& T) {
    return {static_cast<double>(T.leaves.size()), static_cast<double>(T.B)};
}

TdmaSchedule tdma_schedule(const TreeNetwork& T, const DofTuple& d) {
    if (!classical_region_contains(T, d))
        throw std::invalid_argument(
            "tdma_schedule: DoF tuple violates the classical tree region");
    TdmaSchedule sched;
    // burn down the tree: an antenna starts when its parent finishes
    std::vector<double> start(static_cast<std::size_t>(T.B) + 1, 0.0);
    for (const int b : T.dfs_order()) {
        const int p = T.parent[b];
        start[b] = p == 0 ? 0.0 : start[p] + dof_at_antenna(T, d, p);
        sched.intervals[b] = {start[b], start[b] + dof_at_antenna(T, d, b)};
    }
    return sched;
}

} // namespace nsbc
