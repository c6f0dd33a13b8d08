#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nsbc/rng.hpp"

namespace nsbc {

// Field element value, an integer in [0, q) encoding the coefficients of a
// degree-(m-1) polynomial over GF(p) in base p. q <= 2^16 throughout.
using fe = std::uint16_t;

// Exact arithmetic over GF(q), q = p^m. Immutable after construction and
// shareable across threads; all operations are pure.
//
// Multiplication and inversion go through log/antilog tables (built once per
// field from a fixed primitive element), addition through a q x q table for
// q <= 256 and digitwise base-p arithmetic otherwise. The reduction
// polynomial is the lexicographically smallest monic irreducible of degree m
// over GF(p), found by exhaustive trial division, so element encodings are
// identical across runs and platforms.
class Field {
public:
    static Field make(int p, int m);
    // Accepts q = p^m, e.g. from_order(9) == make(3, 2).
    static Field from_order(std::uint32_t q);
    // Accepts the config spelling "GF(9)".
    static Field parse(std::string_view name);

    int p() const { return p_; }
    int m() const { return m_; }
    std::uint32_t q() const { return q_; }
    std::string name() const { return "GF(" + std::to_string(q_) + ")"; }

    // Monic reduction polynomial, coefficients [c0, c1, ..., c_{m-1}, 1].
    // Empty for prime fields (m == 1).
    const std::vector<int>& reduction_poly() const { return reduction_; }

    fe add(fe a, fe b) const {
        if (p_ == 2) return static_cast<fe>(a ^ b);
        if (add_table_.empty()) return add_slow(a, b);
        return add_table_[static_cast<std::size_t>(a) * q_ + b];
    }
    fe neg(fe a) const { return neg_table_[a]; }
    fe sub(fe a, fe b) const { return add(a, neg(b)); }

    fe mul(fe a, fe b) const {
        if (a == 0 || b == 0) return 0;
        std::uint32_t s = log_[a] + log_[b];
        if (s >= q_ - 1) s -= q_ - 1;
        return exp_[s];
    }
    // Throws std::domain_error on zero argument.
    fe inv(fe a) const;
    fe div(fe a, fe b) const;

    fe pow(fe a, std::uint64_t e) const;

    bool contains(std::uint32_t v) const { return v < q_; }

    fe uniform(SeededRng& rng) const { return static_cast<fe>(rng.uniform_below(q_)); }
    // Uniform over the q-1 nonzero elements.
    fe uniform_nonzero(SeededRng& rng) const {
        return static_cast<fe>(1 + rng.uniform_below(q_ - 1));
    }

    bool operator==(const Field& o) const { return p_ == o.p_ && m_ == o.m_; }
    bool operator!=(const Field& o) const { return !(*this == o); }

private:
    Field() = default;
    void build_tables();
    fe add_slow(fe a, fe b) const;

    int p_ = 0;
    int m_ = 0;
    std::uint32_t q_ = 0;
    std::vector<int> reduction_;
    std::vector<fe> exp_;       // exp_[i] = g^i, i in [0, q-1)
    std::vector<std::uint16_t> log_; // log_[a] for a != 0
    std::vector<fe> neg_table_;
    std::vector<fe> add_table_; // q*q entries when q <= 256, else empty
};

// Checked element carrying its field; the ergonomic surface for callers that
// want mismatch detection (CLI, bindings). Hot loops use Field methods on fe.
struct FieldElement {
    fe value = 0;
    const Field* field = nullptr;

    FieldElement() = default;
    FieldElement(fe v, const Field& f);

    FieldElement operator+(const FieldElement& o) const;
    FieldElement operator-(const FieldElement& o) const;
    FieldElement operator*(const FieldElement& o) const;
    FieldElement operator/(const FieldElement& o) const;
    FieldElement operator-() const;
    FieldElement inverse() const;
    bool operator==(const FieldElement& o) const;
};

bool is_prime(std::uint64_t n);

} // namespace nsbc
