#pragma once

#include <array>
#include <cmath>
#include <string>

#include "wein/image.hpp"
#include "wein/model_types.hpp"
#include "wein/tensor.hpp"

namespace wein {

struct LossConfig {
    enum class Star { none, smooth_l1 };

    double r = 1.9;          // balance hyperparameter for non-edge cost
    bool use_iou = true;
    Star star = Star::none;
    double epsilon = 1e-6;   // probability clamp and soft-union guard
};

struct MapLoss {
    double bce = 0.0, iou = 0.0, star = 0.0, total = 0.0;
};

/// Per-map losses for the four side maps ([0..3]) and the fused map ([4]),
/// plus the grand total over all five.
struct LossBreakdown {
    std::array<MapLoss, 5> maps{};
    double total = 0.0;
};

namespace detail {
inline void require_binary(const Mask& gt, const char* where) {
    for (uint8_t v : gt.pix)
        if (v > 1) throw std::invalid_argument(std::string(where) + ": mask is not binary");
}
template <typename T>
inline void require_single_map(const TensorT<T>& t, const Mask& gt, const char* where) {
    if (t.n != 1 || t.c != 1 || t.h != gt.h || t.w != gt.w)
        throw std::invalid_argument(std::string(where) + ": prob map " + t.shape_str() +
                                    " does not match ground truth " + std::to_string(gt.h) +
                                    "x" + std::to_string(gt.w));
}
}  // namespace detail

/// Fraction of non-edge pixels: |Y-| / (|Y+| + |Y-|).
inline double beta_balance(const Mask& gt) {
    detail::require_binary(gt, "beta_balance");
    const double pos = static_cast<double>(gt.count());
    const double total = static_cast<double>(gt.pix.size());
    return (total - pos) / total;
}

// Class-weighted binary cross entropy, summed over pixels:
//   loss = -sum_i [ w_edge * log p_i        if gt_i = 1
//                   w_nonedge * log(1-p_i)  if gt_i = 0 ]
// Probabilities are clamped to [eps, 1-eps] before the log.
template <typename T>
double weighted_bce(const TensorT<T>& prob, const Mask& gt, double w_edge, double w_nonedge,
                    double eps, TensorT<T>* grad) {
    detail::require_binary(gt, "weighted_bce");
    detail::require_single_map(prob, gt, "weighted_bce");
    if (grad) *grad = TensorT<T>(1, 1, gt.h, gt.w);
    double loss = 0.0;
    for (size_t i = 0; i < prob.data.size(); ++i) {
        double p = static_cast<double>(prob.data[i]);
        p = std::min(std::max(p, eps), 1.0 - eps);
        if (gt.pix[i]) {
            loss -= w_edge * std::log(p);
            if (grad) grad->data[i] = static_cast<T>(-w_edge / p);
        } else {
            loss -= w_nonedge * std::log(1.0 - p);
            if (grad) grad->data[i] = static_cast<T>(w_nonedge / (1.0 - p));
        }
    }
    return loss;
}

// Class-balanced BCE with the edge weight beta and non-edge weight r*(1-beta).
// An all-non-edge image degenerates to beta = 1, which would zero the negative
// cost entirely; those images fall back to weight r for the negatives.
template <typename T>
double balanced_bce(const TensorT<T>& prob, const Mask& gt, double r, double eps,
                    TensorT<T>* grad) {
    const double beta = beta_balance(gt);
    const bool no_edges = gt.count() == 0;
    const double w_nonedge = no_edges ? r : r * (1.0 - beta);
    return weighted_bce(prob, gt, beta, w_nonedge, eps, grad);
}

// Image-level ratio loss pushing |Y+| / (soft union) toward 1, where the soft
// union is the summed probability mass. Returns 0 (and no gradient) when the
// ground truth has no edge pixels.
template <typename T>
double iou_loss(const TensorT<T>& prob, const Mask& gt, double eps, TensorT<T>* grad) {
    detail::require_binary(gt, "iou_loss");
    detail::require_single_map(prob, gt, "iou_loss");
    if (grad) *grad = TensorT<T>(1, 1, gt.h, gt.w);
    const double pos = static_cast<double>(gt.count());
    if (pos < 1.0) return 0.0;
    double soft_union = 0.0;
    for (size_t i = 0; i < prob.data.size(); ++i) soft_union += static_cast<double>(prob.data[i]);
    const double denom = soft_union + eps;
    const double ratio = pos / denom;
    const double loss = (1.0 - ratio) * (1.0 - ratio);
    if (grad) {
        const T g = static_cast<T>(2.0 * (1.0 - ratio) * pos / (denom * denom));
        grad->fill(g);
    }
    return loss;
}

/// SmoothL1 between probability map and ground truth, summed over pixels.
template <typename T>
double smooth_l1(const TensorT<T>& prob, const Mask& gt, TensorT<T>* grad) {
    detail::require_binary(gt, "smooth_l1");
    detail::require_single_map(prob, gt, "smooth_l1");
    if (grad) *grad = TensorT<T>(1, 1, gt.h, gt.w);
    double loss = 0.0;
    for (size_t i = 0; i < prob.data.size(); ++i) {
        const double d = static_cast<double>(prob.data[i]) - static_cast<double>(gt.pix[i]);
        const double a = std::abs(d);
        if (a < 1.0) {
            loss += 0.5 * d * d;
            if (grad) grad->data[i] = static_cast<T>(d);
        } else {
            loss += a - 0.5;
            if (grad) grad->data[i] = static_cast<T>(d > 0 ? 1.0 : -1.0);
        }
    }
    return loss;
}

/// Gradients of the total loss wrt the five probability maps.
template <typename T>
struct LossGradsT {
    std::array<TensorT<T>, 4> side;
    TensorT<T> fused;
};

using LossGrads = LossGradsT<float>;

// Sum of per-map losses over the four side maps plus the fused map. The BCE
// term is per-pixel; the iou and star terms enter once per map.
template <typename T>
LossBreakdown total_loss(const SideOutputSetT<T>& out, const Mask& gt, const LossConfig& cfg,
                         LossGradsT<T>* grads) {
    LossBreakdown bd;
    for (int m = 0; m < 5; ++m) {
        const TensorT<T>& prob = m < 4 ? out.side_probs[m] : out.fused_prob;
        TensorT<T>* g = nullptr;
        if (grads) g = m < 4 ? &grads->side[m] : &grads->fused;
        TensorT<T> g_term;
        MapLoss ml;
        ml.bce = balanced_bce(prob, gt, cfg.r, cfg.epsilon, g);
        if (cfg.use_iou) {
            ml.iou = iou_loss(prob, gt, cfg.epsilon, g ? &g_term : nullptr);
            if (g)
                for (size_t i = 0; i < g->data.size(); ++i) g->data[i] += g_term.data[i];
        }
        if (cfg.star == LossConfig::Star::smooth_l1) {
            ml.star = smooth_l1(prob, gt, g ? &g_term : nullptr);
            if (g)
                for (size_t i = 0; i < g->data.size(); ++i) g->data[i] += g_term.data[i];
        }
        ml.total = ml.bce + ml.iou + ml.star;
        bd.maps[m] = ml;
        bd.total += ml.total;
    }
    return bd;
}

/// Arithmetic mean of the four side probability maps and the fused map.
template <typename T>
TensorT<T> predict_average(const SideOutputSetT<T>& out) {
    TensorT<T> avg(out.fused_prob.n, out.fused_prob.c, out.fused_prob.h, out.fused_prob.w);
    for (int m = 0; m < 4; ++m) {
        if (!out.side_probs[m].same_shape(avg))
            throw std::invalid_argument("predict_average: side map shape mismatch");
        for (size_t i = 0; i < avg.data.size(); ++i) avg.data[i] += out.side_probs[m].data[i];
    }
    for (size_t i = 0; i < avg.data.size(); ++i)
        avg.data[i] = (avg.data[i] + out.fused_prob.data[i]) / T(5);
    return avg;
}

}  // namespace wein
