#include "nsbc/json_io.hpp"

#include <stdexcept>

namespace nsbc {

json pattern_to_json(const Pattern& M) {
    return json{{"K", M.K()}, {"B", M.B()}, {"rows", M.rows()}};
}

Pattern pattern_from_json(const json& j) {
    if (!j.contains("rows")) throw std::invalid_argument("pattern json: missing 'rows'");
    const auto rows = j.at("rows").get<std::vector<std::string>>();
    Pattern M = Pattern::from_rows(rows);
    if (j.contains("K") && j.at("K").get<int>() != M.K())
        throw std::invalid_argument("pattern json: K does not match row count");
    if (j.contains("B") && j.at("B").get<int>() != M.B())
        throw std::invalid_argument("pattern json: B does not match row width");
    return M;
}

json tree_to_json(const TreeNetwork& T) {
    std::vector<int> parent(T.parent.begin() + 1, T.parent.end());
    json j{{"B", T.B}, {"K", T.K}, {"parent", parent}, {"rx_assoc", T.rx_assoc}};
    std::vector<int> depth(T.depth.begin() + 1, T.depth.end());
    j["depth"] = depth;
    j["leaves"] = T.leaves;
    return j;
}

TreeNetwork tree_from_json(const json& j) {
    if (j.contains("parent")) {
        auto parent = j.at("parent").get<std::vector<int>>();
        auto assoc = j.at("rx_assoc").get<std::vector<int>>();
        return TreeNetwork::from_parents(std::move(parent), std::move(assoc));
    }
    if (j.contains("rows")) {
        const auto parsed = tree_from_pattern(pattern_from_json(j));
        if (!parsed.ok())
            throw std::invalid_argument("tree json: pattern is not a tree network: " +
                                        parsed.rejection);
        return *parsed.tree;
    }
    throw std::invalid_argument("tree json: expected 'parent'/'rx_assoc' or a pattern");
}

json schedule_to_json(const TdmaSchedule& s) {
    json j = json::object();
    for (const auto& [b, iv] : s.intervals) j[std::to_string(b)] = {iv.first, iv.second};
    return j;
}

json record_to_json(const ExperimentRecord& r) {
    return json{{"schema", r.schema_version},
                {"library_version", r.library_version},
                {"config_hash", r.config_hash},
                {"scheme", r.scheme},
                {"field", r.field},
                {"trials", r.trials},
                {"seed", r.seed},
                {"error_counts", r.error_counts},
                {"rate_bits", r.rate_bits},
                {"record_hash", r.record_hash}};
}

TabularBox tabular_box_from_json(const json& j) {
    const auto in_sizes = j.at("input_sizes").get<std::vector<int>>();
    const auto out_sizes = j.at("output_sizes").get<std::vector<int>>();
    std::size_t in_count = 1, out_count = 1;
    for (const int s : in_sizes) in_count *= static_cast<std::size_t>(s);
    for (const int s : out_sizes) out_count *= static_cast<std::size_t>(s);
    std::vector<Rat> pmf(in_count * out_count, Rat(0));

    std::vector<int> radix_in(in_sizes.size()), radix_out(out_sizes.size());
    for (const auto& e : j.at("entries")) {
        const auto in = e.at("in").get<std::vector<int>>();
        const auto out = e.at("out").get<std::vector<int>>();
        if (in.size() != in_sizes.size() || out.size() != out_sizes.size())
            throw std::invalid_argument("box json: entry arity mismatch");
        std::size_t ii = 0, oi = 0;
        for (std::size_t i = 0; i < in.size(); ++i)
            ii = ii * static_cast<std::size_t>(in_sizes[i]) + static_cast<std::size_t>(in[i]);
        for (std::size_t i = 0; i < out.size(); ++i)
            oi = oi * static_cast<std::size_t>(out_sizes[i]) + static_cast<std::size_t>(out[i]);
        pmf[ii * out_count + oi] = parse_rat(e.at("p").get<std::string>());
    }
    return TabularBox(in_sizes, out_sizes, std::move(pmf));
}

ChannelConfig channel_config_from_json(const json& j) {
    ChannelConfig c;
    if (j.contains("model")) c.model = j.at("model").get<std::string>();
    if (c.model != "fq" && c.model != "gaussian")
        throw std::invalid_argument("channel config: model must be 'fq' or 'gaussian'");
    if (j.contains("field")) c.field = j.at("field").get<std::string>();
    if (j.contains("pattern"))
        c.pattern = pattern_from_json(j.at("pattern"));
    else
        throw std::invalid_argument("channel config: missing 'pattern'");
    if (j.contains("c")) c.c = j.at("c").get<double>();
    return c;
}

json channel_config_to_json(const ChannelConfig& c) {
    return json{{"model", c.model},
                {"field", c.field},
                {"pattern", pattern_to_json(c.pattern)},
                {"c", c.c}};
}

json tabular_box_to_json(const TabularBox& b) {
    json entries = json::array();
    for (const auto& e : b.nonzeros()) {
        entries.push_back(json{{"in", b.unpack_input(e.in)},
                               {"out", b.unpack_output(e.out)},
                               {"p", format_rat(e.p)}});
    }
    return json{{"input_sizes", b.input_sizes()},
                {"output_sizes", b.output_sizes()},
                {"entries", entries}};
}

} // namespace nsbc
