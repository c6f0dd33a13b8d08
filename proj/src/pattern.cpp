#include "nsbc/pattern.hpp"

#include <stdexcept>

namespace nsbc {

Pattern::Pattern(int K, int B, std::vector<std::uint8_t> cells)
    : K_(K), B_(B), cells_(std::move(cells)) {
    if (K < 1 || B < 1) throw std::invalid_argument("Pattern: K and B must be >= 1");
    if (cells_.size() != static_cast<std::size_t>(K) * B)
        throw std::invalid_argument("Pattern: cell count does not match K*B");
    for (int k = 0; k < K_; ++k)
        if (row_stars(k) == 0)
            throw std::invalid_argument("Pattern: receiver " + std::to_string(k + 1) +
                                        " is connected to no antenna (all-zero row)");
    for (int b = 0; b < B_; ++b)
        if (col_stars(b) == 0)
            throw std::invalid_argument("Pattern: antenna " + std::to_string(b + 1) +
                                        " reaches no receiver (all-zero column)");
}

Pattern Pattern::from_rows(const std::vector<std::string>& rows) {
    if (rows.empty()) throw std::invalid_argument("Pattern: no rows");
    const int K = static_cast<int>(rows.size());
    const int B = static_cast<int>(rows[0].size());
    std::vector<std::uint8_t> cells;
    cells.reserve(static_cast<std::size_t>(K) * B);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != B)
            throw std::invalid_argument("Pattern: ragged rows");
        for (const char c : r) {
            if (c == '*')
                cells.push_back(1);
            else if (c == '0')
                cells.push_back(0);
            else
                throw std::invalid_argument(std::string("Pattern: bad cell character '") + c +
                                            "', expected '*' or '0'");
        }
    }
    return Pattern(K, B, std::move(cells));
}

int Pattern::row_stars(int k) const {
    int n = 0;
    for (int b = 0; b < B_; ++b) n += star(k, b) ? 1 : 0;
    return n;
}

int Pattern::col_stars(int b) const {
    int n = 0;
    for (int k = 0; k < K_; ++k) n += star(k, b) ? 1 : 0;
    return n;
}

int Pattern::total_stars() const {
    int n = 0;
    for (const auto c : cells_) n += c ? 1 : 0;
    return n;
}

std::vector<int> Pattern::col_support(int b) const {
    std::vector<int> s;
    for (int k = 0; k < K_; ++k)
        if (star(k, b)) s.push_back(k);
    return s;
}

std::vector<int> Pattern::row_support(int k) const {
    std::vector<int> s;
    for (int b = 0; b < B_; ++b)
        if (star(k, b)) s.push_back(b);
    return s;
}

std::vector<std::string> Pattern::rows() const {
    std::vector<std::string> out(static_cast<std::size_t>(K_));
    for (int k = 0; k < K_; ++k) {
        out[k].resize(static_cast<std::size_t>(B_));
        for (int b = 0; b < B_; ++b) out[k][b] = star(k, b) ? '*' : '0';
    }
    return out;
}

Pattern Pattern::fully_connected(int K, int B) {
    return Pattern(K, B, std::vector<std::uint8_t>(static_cast<std::size_t>(K) * B, 1));
}

Pattern Pattern::lower_triangular(int K) {
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(K) * K, 0);
    for (int k = 0; k < K; ++k)
        for (int b = 0; b <= k; ++b) cells[static_cast<std::size_t>(k) * K + b] = 1;
    return Pattern(K, K, std::move(cells));
}

Pattern Pattern::identity(int K) {
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(K) * K, 0);
    for (int k = 0; k < K; ++k) cells[static_cast<std::size_t>(k) * K + k] = 1;
    return Pattern(K, K, std::move(cells));
}

Pattern Pattern::fano() {
    return from_rows({
        "*000***",
        "0*0*0**",
        "00***0*",
        "0**0**0",
        "*0**0*0",
        "**0**00",
        "***000*",
    });
}

} // namespace nsbc
