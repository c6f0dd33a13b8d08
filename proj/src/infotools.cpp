#include "nsbc/infotools.hpp"

#include <algorithm>
#include <stdexcept>

namespace nsbc {

namespace {
constexpr std::uint64_t kProductBudget = 10'000'000;
}

JointPmf::JointPmf(std::vector<Variable> vars) : vars_(std::move(vars)) {
    if (vars_.empty()) throw std::invalid_argument("JointPmf: no variables");
    radix_.resize(vars_.size());
    std::uint64_t mult = 1;
    for (std::size_t i = vars_.size(); i-- > 0;) {
        if (vars_[i].cardinality < 1)
            throw std::invalid_argument("JointPmf: empty alphabet for " + vars_[i].name);
        radix_[i] = mult;
        if (mult > kProductBudget)
            throw std::invalid_argument("JointPmf: product space exceeds enumeration budget");
        mult *= static_cast<std::uint64_t>(vars_[i].cardinality);
    }
    if (mult > kProductBudget)
        throw std::invalid_argument("JointPmf: product space exceeds enumeration budget");
}

int JointPmf::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return static_cast<int>(i);
    throw std::invalid_argument("JointPmf: unknown variable '" + name + "'");
}

void JointPmf::add(const std::vector<int>& assignment, const Rat& p) {
    if (assignment.size() != vars_.size())
        throw std::invalid_argument("JointPmf: assignment length mismatch");
    if (p < Rat(0)) throw std::invalid_argument("JointPmf: negative probability");
    if (p == Rat(0)) return;
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (assignment[i] < 0 || assignment[i] >= vars_[i].cardinality)
            throw std::invalid_argument("JointPmf: value out of range for " + vars_[i].name);
        key += radix_[i] * static_cast<std::uint64_t>(assignment[i]);
    }
    atoms_[key] += p;
}

Rat JointPmf::total() const {
    Rat t(0);
    for (const auto& [k, p] : atoms_) t += p;
    return t;
}

std::map<std::uint64_t, Rat> JointPmf::marginal(const std::vector<int>& subset) const {
    std::map<std::uint64_t, Rat> m;
    for (const auto& [key, p] : atoms_) {
        std::uint64_t mkey = 0;
        for (const int i : subset) {
            const auto v = (key / radix_[i]) % static_cast<std::uint64_t>(vars_[i].cardinality);
            mkey = mkey * static_cast<std::uint64_t>(vars_[i].cardinality) + v;
        }
        m[mkey] += p;
    }
    return m;
}

std::vector<int> JointPmf::resolve(const std::vector<std::string>& names) const {
    std::vector<int> idx;
    idx.reserve(names.size());
    for (const auto& n : names) idx.push_back(index_of(n));
    return idx;
}

double JointPmf::subset_entropy(std::vector<int> subset) const {
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    if (subset.empty()) return 0.0;
    const auto m = marginal(subset);
    double h = 0.0;
    for (const auto& [k, p] : m)
        if (p > Rat(0)) h -= to_double(p) * log2_rat(p);
    return h;
}

double JointPmf::entropy_bits(const std::vector<std::string>& vars,
                              const std::vector<std::string>& given) const {
    auto v = resolve(vars);
    const auto g = resolve(given);
    for (const int gi : g)
        if (std::find(v.begin(), v.end(), gi) != v.end())
            throw std::invalid_argument("entropy: variable appears on both sides");
    auto joint = v;
    joint.insert(joint.end(), g.begin(), g.end());
    return subset_entropy(joint) - subset_entropy(g);
}

double JointPmf::mutual_information_bits(const std::vector<std::string>& A,
                                         const std::vector<std::string>& B,
                                         const std::vector<std::string>& given) const {
    const auto a = resolve(A), b = resolve(B), c = resolve(given);
    auto ac = a;
    ac.insert(ac.end(), c.begin(), c.end());
    auto bc = b;
    bc.insert(bc.end(), c.begin(), c.end());
    auto abc = a;
    abc.insert(abc.end(), b.begin(), b.end());
    abc.insert(abc.end(), c.begin(), c.end());
    return subset_entropy(ac) + subset_entropy(bc) - subset_entropy(abc) - subset_entropy(c);
}

PmfBuilder& PmfBuilder::source(const std::string& name, std::vector<Rat> law) {
    Rat t(0);
    for (const auto& p : law) {
        if (p < Rat(0)) throw std::invalid_argument("PmfBuilder: negative probability");
        t += p;
    }
    if (t != Rat(1))
        throw std::invalid_argument("PmfBuilder: law for '" + name + "' sums to " +
                                    format_rat(t));
    nodes_.push_back({{name, static_cast<int>(law.size())}, true, std::move(law), {}, {}});
    return *this;
}

PmfBuilder& PmfBuilder::uniform(const std::string& name, int cardinality) {
    return source(name, std::vector<Rat>(static_cast<std::size_t>(cardinality),
                                         Rat(1, cardinality)));
}

PmfBuilder& PmfBuilder::uniform_nonzero(const std::string& name, int cardinality) {
    std::vector<Rat> law(static_cast<std::size_t>(cardinality), Rat(0));
    for (int v = 1; v < cardinality; ++v) law[v] = Rat(1, cardinality - 1);
    return source(name, std::move(law));
}

PmfBuilder& PmfBuilder::derived(const std::string& name, int cardinality,
                                std::vector<std::string> deps,
                                std::function<int(const std::vector<int>&)> fn) {
    nodes_.push_back({{name, cardinality}, false, {}, std::move(deps), std::move(fn)});
    return *this;
}

JointPmf PmfBuilder::build() const {
    std::vector<Variable> vars;
    vars.reserve(nodes_.size());
    for (const auto& n : nodes_) vars.push_back(n.var);
    JointPmf pmf(std::move(vars));

    // resolve dependency indices once
    auto find_var = [&](const std::string& name) {
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].var.name == name) return static_cast<int>(i);
        throw std::invalid_argument("PmfBuilder: unknown dependency '" + name + "'");
    };
    std::vector<std::vector<int>> dep_idx(nodes_.size());
    std::vector<int> sources;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].is_source) {
            sources.push_back(static_cast<int>(i));
            continue;
        }
        for (const auto& d : nodes_[i].deps) {
            const int j = find_var(d);
            if (j >= static_cast<int>(i))
                throw std::invalid_argument("PmfBuilder: '" + nodes_[i].var.name +
                                            "' depends on a later variable");
            dep_idx[i].push_back(j);
        }
    }

    std::uint64_t combos = 1;
    for (const int s : sources) {
        combos *= static_cast<std::uint64_t>(nodes_[s].var.cardinality);
        if (combos > kProductBudget)
            throw std::invalid_argument("PmfBuilder: source enumeration exceeds budget");
    }

    std::vector<int> value(nodes_.size(), 0);
    std::vector<int> dep_vals;
    for (std::uint64_t c = 0; c < combos; ++c) {
        Rat w(1);
        std::uint64_t t = c;
        for (const int s : sources) {
            const int card = nodes_[s].var.cardinality;
            value[s] = static_cast<int>(t % static_cast<std::uint64_t>(card));
            t /= static_cast<std::uint64_t>(card);
            w *= nodes_[s].law[value[s]];
            if (w == Rat(0)) break;
        }
        if (w == Rat(0)) continue;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].is_source) continue;
            dep_vals.clear();
            for (const int j : dep_idx[i]) dep_vals.push_back(value[j]);
            value[i] = nodes_[i].fn(dep_vals);
        }
        pmf.add(value, w);
    }
    return pmf;
}

} // namespace nsbc
