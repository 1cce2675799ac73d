#include "wein/model.hpp"

#include <vector>

namespace wein {

namespace {

struct LayerSpec {
    const char* name;
    int k;  // kernel extent
    int s;  // layer stride
};

// Backbone layer chain in network order.
constexpr LayerSpec kChain[] = {
    {"conv1_1", 3, 1}, {"conv1_2", 3, 1}, {"pool1", 2, 2},
    {"conv2_1", 3, 1}, {"conv2_2", 3, 1}, {"pool2", 2, 2},
    {"conv3_1", 3, 1}, {"conv3_2", 3, 1}, {"conv3_3", 3, 1}, {"pool3", 2, 2},
    {"conv4_1", 3, 1}, {"conv4_2", 3, 1}, {"conv4_3", 3, 1},
};

}  // namespace

std::vector<std::pair<std::string, std::pair<int, int>>> receptive_field_table() {
    std::vector<std::pair<std::string, std::pair<int, int>>> rows;
    int rf = 1, stride = 1;
    for (const LayerSpec& layer : kChain) {
        rf += (layer.k - 1) * stride;
        stride *= layer.s;
        rows.emplace_back(layer.name, std::make_pair(rf, stride));
    }
    return rows;
}

std::pair<int, int> receptive_field(const std::string& layer_name) {
    for (const auto& [name, rs] : receptive_field_table())
        if (name == layer_name) return rs;
    throw std::invalid_argument("receptive_field: unknown layer '" + layer_name + "'");
}

}  // namespace wein
