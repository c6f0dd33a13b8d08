#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsbc/pattern.hpp"

namespace nsbc {

// Rooted tree of transmit antennas. Antennas are numbered 1..B; node 0 is
// the imaginary root that only orients the graph. Each receiver hears
// exactly the root path down to its associated (deepest audible) antenna.
struct TreeNetwork {
    int B = 0;
    int K = 0;
    std::vector<int> parent;   // size B+1; parent[0] = -1, parent[b] in [0, B]
    std::vector<int> depth;    // size B+1; depth[0] = 0
    std::vector<int> rx_assoc; // size K; antenna (1-based) each receiver is associated with

    std::vector<std::vector<int>> children; // size B+1
    std::vector<int> leaves;                // antennas with no children, ascending

    static TreeNetwork from_parents(std::vector<int> parent_of_antenna,
                                    std::vector<int> rx_assoc);
    static TreeNetwork path(int K);
    static TreeNetwork star(int K);

    // Antennas on the path root -> b, excluding the root, ending at b.
    std::vector<int> root_path(int b) const;
    // Receivers associated with antenna b, ascending.
    std::vector<int> receivers_of(int b) const;
    // DFS preorder over antennas, children visited in ascending label order.
    std::vector<int> dfs_order() const;

    Pattern to_pattern() const;
};

struct TreeParse {
    std::optional<TreeNetwork> tree;
    std::string rejection; // violated-property witness when tree is empty
    bool ok() const { return tree.has_value(); }
};

// Reconstructs the antenna tree from column-support containment: Tx-j is an
// ancestor of Tx-i iff supp(col_i) is a strict subset of supp(col_j); the
// parent is the minimal strict superset. Equal supports on distinct antennas
// and rows that are not root-path prefixes are rejections, not errors.
TreeParse tree_from_pattern(const Pattern& M);

struct DofTuple {
    std::vector<double> d;
    std::size_t size() const { return d.size(); }
};

inline constexpr double kRegionSlack = 1e-12; // boundary points are members

// Sum of d over receivers associated with antenna b.
double dof_at_antenna(const TreeNetwork& T, const DofTuple& d, int b);

bool classical_region_contains(const TreeNetwork& T, const DofTuple& d);
bool ns_region_contains(const TreeNetwork& T, const DofTuple& d);
bool fully_connected_region_contains(int K, const DofTuple& d);

struct SumDof {
    double classical; // number of leaves
    double ns;        // number of antennas
};
SumDof sum_dof(const TreeNetwork& T);

// Closed interval of [0,1] per antenna; |interval(b)| = d_sum(b) and the
// intervals along every root-to-leaf path are consecutive.
struct TdmaSchedule {
    std::map<int, std::pair<double, double>> intervals; // antenna -> [start, end]
};

// Throws std::invalid_argument when d violates the classical region.
TdmaSchedule tdma_schedule(const TreeNetwork& T, const DofTuple& d);

} // namespace nsbc
