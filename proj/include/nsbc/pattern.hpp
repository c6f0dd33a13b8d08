#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nsbc {

// K x B connectivity pattern over {Zero, Star}. Star cells mark nonzero
// channel coefficients. Valid patterns have no all-zero row (every receiver
// reachable) and no all-zero column (every antenna used).
class Pattern {
public:
    Pattern(int K, int B, std::vector<std::uint8_t> cells);
    // rows like "*0*00", one string per receiver
    static Pattern from_rows(const std::vector<std::string>& rows);

    int K() const { return K_; }
    int B() const { return B_; }
    bool star(int k, int b) const { return cells_[static_cast<std::size_t>(k) * B_ + b] != 0; }

    int row_stars(int k) const;
    int col_stars(int b) const;
    int total_stars() const;

    // receivers connected to antenna b, ascending
    std::vector<int> col_support(int b) const;
    std::vector<int> row_support(int k) const;

    std::vector<std::string> rows() const;

    static Pattern fully_connected(int K, int B);
    // K x K, stars on and below the main diagonal (the vertical hierarchy)
    static Pattern lower_triangular(int K);
    static Pattern identity(int K);
    // the 7 x 7 Fano-plane pattern
    static Pattern fano();

    bool operator==(const Pattern& o) const {
        return K_ == o.K_ && B_ == o.B_ && cells_ == o.cells_;
    }

private:
    int K_;
    int B_;
    std::vector<std::uint8_t> cells_; // row-major, 1 = star
};

} // namespace nsbc
