#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "wein/model_types.hpp"
#include "wein/ops.hpp"
#include "wein/rng.hpp"
#include "wein/tensor.hpp"

namespace wein {

/// Deterministic initialization: backbone/side/collapse weights ~ N(0, 2/fan_in)
/// from a SplitMix64 stream, biases zero; fusion weights exactly 0.25, bias 0.
template <typename T>
ModelParamsT<T> init_params(const NetworkConfig& cfg, uint64_t seed) {
    cfg.validate();
    ModelParamsT<T> p;
    p.config = cfg;
    SplitMix64 rng(seed);
    auto he_fill = [&rng](ConvKernelT<T>& k) {
        const double stddev = std::sqrt(2.0 / (k.in_c * k.kh * k.kw));
        for (auto& v : k.w) v = static_cast<T>(stddev * rng.normal());
    };
    int in_c = cfg.input_channels;
    for (int s = 0; s < 4; ++s) {
        const int width = cfg.stage_widths[s];
        for (int j = 0; j < NetworkConfig::stage_conv_counts[s]; ++j) {
            p.backbone.emplace_back(width, in_c, 3, 3);
            he_fill(p.backbone.back());
            in_c = width;
            p.side.emplace_back(cfg.side_depth, width, 1, 1);
            he_fill(p.side.back());
        }
        p.collapse.emplace_back(1, cfg.side_depth, 1, 1);
        he_fill(p.collapse.back());
    }
    p.fuse = ConvKernelT<T>(1, 4, 1, 1);
    for (auto& v : p.fuse.w) v = static_cast<T>(0.25);
    return p;
}

/// Learnable parameter count (weights + biases) as a function of the config.
inline int64_t param_count(const NetworkConfig& cfg) {
    int64_t total = 0;
    int in_c = cfg.input_channels;
    for (int s = 0; s < 4; ++s) {
        const int width = cfg.stage_widths[s];
        for (int j = 0; j < NetworkConfig::stage_conv_counts[s]; ++j) {
            total += static_cast<int64_t>(width) * in_c * 9 + width;          // backbone 3x3
            total += static_cast<int64_t>(cfg.side_depth) * width + cfg.side_depth;  // side 1x1
            in_c = width;
        }
        total += cfg.side_depth + 1;  // collapse 1x1 -> 1
    }
    total += 4 + 1;  // fusion
    return total;
}

/// Receptive field and cumulative stride of a named layer, per the recurrences
/// rf_out = rf_in + (k-1)*stride_in and stride_out = stride_in * s.
std::pair<int, int> receptive_field(const std::string& layer_name);

/// All (layer, rf, stride) rows in network order.
std::vector<std::pair<std::string, std::pair<int, int>>> receptive_field_table();

// The WEIN network. forward() keeps every activation needed by backward();
// backward() takes gradients wrt the five probability maps and accumulates
// parameter gradients, so one instance serves one worker at a time.
template <typename T>
class WeinNetT {
public:
    explicit WeinNetT(ModelParamsT<T> params) : p_(std::move(params)) {
        p_.config.validate();
        if (static_cast<int>(p_.backbone.size()) != p_.config.total_convs() ||
            p_.side.size() != p_.backbone.size() || p_.collapse.size() != 4)
            throw std::invalid_argument("WeinNetT: parameter set does not match config");
    }

    ModelParamsT<T>& params() { return p_; }
    const ModelParamsT<T>& params() const { return p_; }

    void zero_grads() { p_.zero_grads(); }

    SideOutputSetT<T> forward(const TensorT<T>& image) {
        if (image.c != p_.config.input_channels)
            throw std::invalid_argument("forward: image channels " + std::to_string(image.c) +
                                        " do not match config");
        if (image.n < 1 || image.h % 8 != 0 || image.w % 8 != 0)
            throw std::invalid_argument("forward: image size " + image.shape_str() +
                                        " must be divisible by 8");
        conv_in_.assign(p_.backbone.size(), {});
        act_.assign(p_.backbone.size(), {});
        SideOutputSetT<T> out;

        TensorT<T> x = image;
        int k = 0;
        std::array<TensorT<T>, 4> stage_sides;  // per-stage side logits before fusion
        for (int s = 0; s < 4; ++s) {
            if (s > 0) {
                x = maxpool2(x, pool_arg_[s - 1]);
            }
            const int first = k;
            for (int j = 0; j < NetworkConfig::stage_conv_counts[s]; ++j, ++k) {
                conv_in_[k] = x;
                x = relu(conv2d(x, p_.backbone[k], 1, 1));
                act_[k] = x;
            }
            std::vector<TensorT<T>> side_maps;
            for (int kk = first; kk < k; ++kk)
                side_maps.push_back(conv2d(act_[kk], p_.side[kk], 1, 0));
            std::vector<const TensorT<T>*> ptrs;
            for (auto& m : side_maps) ptrs.push_back(&m);
            stage_sum_[s] = eltwise_add(ptrs);
            TensorT<T> collapsed = conv2d(stage_sum_[s], p_.collapse[s], 1, 0);
            out.side_logits[s] = s == 0 ? std::move(collapsed)
                                        : upsample_bilinear(collapsed, 1 << s);
            out.side_probs[s] = sigmoid(out.side_logits[s]);
        }

        // fusion over the concatenated side logits
        concat_ = TensorT<T>(image.n, 4, image.h, image.w);
        for (int s = 0; s < 4; ++s)
            for (int n = 0; n < image.n; ++n)
                std::copy(out.side_logits[s].plane(n, 0),
                          out.side_logits[s].plane(n, 0) + image.h * image.w,
                          concat_.plane(n, s));
        out.fused_logit = conv2d(concat_, p_.fuse, 1, 0);
        out.fused_prob = sigmoid(out.fused_logit);

        out_ = out;
        have_forward_ = true;
        return out;
    }

    void backward(const std::array<TensorT<T>, 4>& dside_probs, const TensorT<T>& dfused_prob) {
        if (!have_forward_)
            throw std::logic_error("backward: called before forward");

        // probs -> logits
        std::array<TensorT<T>, 4> dside_logit;
        for (int s = 0; s < 4; ++s)
            dside_logit[s] = sigmoid_backward(dside_probs[s], out_.side_probs[s]);
        TensorT<T> dfused_logit = sigmoid_backward(dfused_prob, out_.fused_prob);

        // fusion conv spreads gradient back onto all four side logits
        TensorT<T> dconcat = conv2d_backward(dfused_logit, concat_, p_.fuse, 1, 0);
        const int hw = dconcat.h * dconcat.w;
        for (int s = 0; s < 4; ++s)
            for (int n = 0; n < dconcat.n; ++n) {
                const T* src = dconcat.plane(n, s);
                T* dst = dside_logit[s].plane(n, 0);
                for (int i = 0; i < hw; ++i) dst[i] += src[i];
            }

        // side branches -> gradients wrt the backbone activations
        std::vector<TensorT<T>> dact(act_.size());
        int k = 0;
        for (int s = 0; s < 4; ++s) {
            TensorT<T> g = std::move(dside_logit[s]);
            if (s > 0)
                g = upsample_bilinear_backward(g, 1 << s, stage_sum_[s].h, stage_sum_[s].w);
            TensorT<T> dsum = conv2d_backward(g, stage_sum_[s], p_.collapse[s], 1, 0);
            for (int j = 0; j < NetworkConfig::stage_conv_counts[s]; ++j, ++k) {
                // eltwise backward: every side conv sees the same dsum
                TensorT<T> da = conv2d_backward(dsum, act_[k], p_.side[k], 1, 0);
                if (dact[k].size() == 0)
                    dact[k] = std::move(da);
                else
                    for (size_t i = 0; i < da.data.size(); ++i) dact[k].data[i] += da.data[i];
            }
        }

        // backbone chain, last stage first
        TensorT<T> carry;  // grad wrt the current stage's input
        for (int s = 3; s >= 0; --s) {
            const int first = stage_first_conv(s);
            const int last = first + NetworkConfig::stage_conv_counts[s] - 1;
            for (int kk = last; kk >= first; --kk) {
                TensorT<T> gact = std::move(dact[kk]);
                if (kk == last) {
                    if (s < 3) {
                        // gradient arriving through the next stage's pooling layer
                        TensorT<T> dpool =
                            maxpool2_backward(carry, pool_arg_[s], act_[kk].h, act_[kk].w);
                        for (size_t i = 0; i < gact.data.size(); ++i) gact.data[i] += dpool.data[i];
                    }
                } else {
                    // gradient from the next conv in this stage
                    for (size_t i = 0; i < gact.data.size(); ++i) gact.data[i] += carry.data[i];
                }
                TensorT<T> gu = relu_backward(gact, act_[kk]);
                carry = conv2d_backward(gu, conv_in_[kk], p_.backbone[kk], 1, 1);
            }
        }
        // carry now holds the gradient wrt the input image; discarded.
    }

private:
    static int stage_first_conv(int s) {
        int first = 0;
        for (int t = 0; t < s; ++t) first += NetworkConfig::stage_conv_counts[t];
        return first;
    }

    ModelParamsT<T> p_;
    bool have_forward_ = false;
    std::vector<TensorT<T>> conv_in_;             // input of each backbone conv
    std::vector<TensorT<T>> act_;                 // post-ReLU output of each backbone conv
    std::array<std::vector<int32_t>, 3> pool_arg_;
    std::array<TensorT<T>, 4> stage_sum_;         // eltwise sums (collapse inputs)
    TensorT<T> concat_;                           // fusion input
    SideOutputSetT<T> out_;
};

using WeinNet = WeinNetT<float>;

}  // namespace wein
