#pragma once

#include <json.hpp>

#include "nsbc/harness.hpp"
#include "nsbc/nsbox.hpp"
#include "nsbc/pattern.hpp"
#include "nsbc/tree.hpp"

namespace nsbc {

using json = nlohmann::json;

// {"K":7,"B":5,"rows":["*0*00", ...]}
json pattern_to_json(const Pattern& M);
Pattern pattern_from_json(const json& j);

// {"B":6,"K":6,"parent":[0,1,2,2,1,5],"rx_assoc":[1,2,3,4,5,6]}
// parent[i] is the parent antenna of Tx-(i+1), 0 meaning the root.
json tree_to_json(const TreeNetwork& T);
TreeNetwork tree_from_json(const json& j);

// schedule as {"1":[start,end], ...}
json schedule_to_json(const TdmaSchedule& s);

json record_to_json(const ExperimentRecord& r);

// {"input_sizes":[3,1],"output_sizes":[1,3],
//  "entries":[{"in":[0,0],"out":[0,0],"p":"1/3"}, ...]}
// omitted entries are zero
TabularBox tabular_box_from_json(const json& j);
json tabular_box_to_json(const TabularBox& b);

// {"model":"fq"|"gaussian","field":"GF(5)","pattern":{...},"c":2.0}
struct ChannelConfig {
    std::string model = "fq";
    std::string field = "GF(5)";
    Pattern pattern = Pattern::fully_connected(1, 1);
    double c = 2.0;
};
ChannelConfig channel_config_from_json(const json& j);
json channel_config_to_json(const ChannelConfig& c);

} // namespace nsbc
