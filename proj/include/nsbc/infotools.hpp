#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nsbc/rational.hpp"

namespace nsbc {

struct Variable {
    std::string name;
    int cardinality;
};

// Fully enumerated joint distribution over named finite-alphabet variables.
// Probabilities stay rational end-to-end; logarithms are applied once when a
// bit value is reported.
class JointPmf {
public:
    explicit JointPmf(std::vector<Variable> vars);

    const std::vector<Variable>& variables() const { return vars_; }
    int index_of(const std::string& name) const; // throws on unknown variable

    void add(const std::vector<int>& assignment, const Rat& p);
    Rat total() const;
    std::size_t atom_count() const { return atoms_.size(); }

    // marginal over a subset of variable indices, keyed by packed assignment
    std::map<std::uint64_t, Rat> marginal(const std::vector<int>& subset) const;

    // Shannon entropy H(vars | given) in bits
    double entropy_bits(const std::vector<std::string>& vars,
                        const std::vector<std::string>& given = {}) const;
    // I(A ; B | given) in bits
    double mutual_information_bits(const std::vector<std::string>& A,
                                   const std::vector<std::string>& B,
                                   const std::vector<std::string>& given = {}) const;

private:
    std::vector<int> resolve(const std::vector<std::string>& names) const;
    double subset_entropy(std::vector<int> subset) const;

    std::vector<Variable> vars_;
    std::vector<std::uint64_t> radix_; // packing multipliers
    std::map<std::uint64_t, Rat> atoms_;
};

// Exact joint of (sources, derived variables) by full enumeration: sources
// carry explicit laws, derived variables are pure functions of earlier
// variables. The carrier for channel/scheme certificates.
class PmfBuilder {
public:
    // independent source with an explicit law (summing to 1)
    PmfBuilder& source(const std::string& name, std::vector<Rat> law);
    PmfBuilder& uniform(const std::string& name, int cardinality);
    // uniform over {1, .., cardinality-1}
    PmfBuilder& uniform_nonzero(const std::string& name, int cardinality);
    // derived = fn(values of deps), value in [0, cardinality)
    PmfBuilder& derived(const std::string& name, int cardinality,
                        std::vector<std::string> deps,
                        std::function<int(const std::vector<int>&)> fn);

    JointPmf build() const;

private:
    struct Node {
        Variable var;
        bool is_source;
        std::vector<Rat> law;
        std::vector<std::string> deps;
        std::function<int(const std::vector<int>&)> fn;
    };
    std::vector<Node> nodes_;
};

} // namespace nsbc
