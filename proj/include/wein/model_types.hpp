#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wein/ops.hpp"
#include "wein/tensor.hpp"

namespace wein {

// Four conv stages with the conv counts fixed at [2,2,3,3]. Desk-scale widths
// train on a CPU in minutes; the paper-scale preset uses VGG16 widths.
struct NetworkConfig {
    static constexpr std::array<int, 4> stage_conv_counts{2, 2, 3, 3};

    std::array<int, 4> stage_widths{8, 16, 32, 64};
    int side_depth = 21;
    int input_channels = 1;
    int input_h = 128, input_w = 128;  // declared size; any h,w = 0 mod 8 works

    static NetworkConfig desk_scale() { return NetworkConfig{}; }

    static NetworkConfig paper_scale() {
        NetworkConfig c;
        c.stage_widths = {64, 128, 256, 512};
        return c;
    }

    void validate() const {
        for (int w : stage_widths)
            if (w <= 0) throw std::invalid_argument("NetworkConfig: stage widths must be positive");
        if (side_depth < 1) throw std::invalid_argument("NetworkConfig: side_depth must be >= 1");
        if (input_channels < 1)
            throw std::invalid_argument("NetworkConfig: input_channels must be >= 1");
        if (input_h % 8 != 0 || input_w % 8 != 0)
            throw std::invalid_argument("NetworkConfig: input size must be divisible by 8");
    }

    int total_convs() const { return 2 + 2 + 3 + 3; }

    bool operator==(const NetworkConfig& o) const {
        return stage_widths == o.stage_widths && side_depth == o.side_depth &&
               input_channels == o.input_channels && input_h == o.input_h && input_w == o.input_w;
    }
};

// All learnable kernels in a fixed order: 10 backbone 3x3 convs, their 10
// side 1x1 convs (width -> side_depth), 4 collapse 1x1 convs (side_depth -> 1)
// and the fusion 1x1 conv (4 -> 1). Momentum buffers live inside the kernels.
template <typename T>
struct ModelParamsT {
    NetworkConfig config;
    std::vector<ConvKernelT<T>> backbone;  // 10
    std::vector<ConvKernelT<T>> side;      // 10
    std::vector<ConvKernelT<T>> collapse;  // 4
    ConvKernelT<T> fuse;                   // 1

    std::vector<ConvKernelT<T>*> all_kernels() {
        std::vector<ConvKernelT<T>*> ks;
        for (auto& k : backbone) ks.push_back(&k);
        for (auto& k : side) ks.push_back(&k);
        for (auto& k : collapse) ks.push_back(&k);
        ks.push_back(&fuse);
        return ks;
    }
    std::vector<const ConvKernelT<T>*> all_kernels() const {
        std::vector<const ConvKernelT<T>*> ks;
        for (auto& k : backbone) ks.push_back(&k);
        for (auto& k : side) ks.push_back(&k);
        for (auto& k : collapse) ks.push_back(&k);
        ks.push_back(&fuse);
        return ks;
    }

    void zero_grads() {
        for (auto* k : all_kernels()) k->zero_grads();
    }
};

using ModelParams = ModelParamsT<float>;

/// Full-resolution pre-sigmoid and sigmoid maps for the four stages plus the
/// learned fusion of all side logits.
template <typename T>
struct SideOutputSetT {
    std::array<TensorT<T>, 4> side_logits;
    std::array<TensorT<T>, 4> side_probs;
    TensorT<T> fused_logit;
    TensorT<T> fused_prob;
};

using SideOutputSet = SideOutputSetT<float>;

}  // namespace wein
