#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "wein/rng.hpp"
#include "wein/tensor.hpp"

namespace wein {

// Convolution weights plus their gradient and momentum buffers. Gradients
// accumulate across backward calls until zero_grads(); momentum buffers
// belong to the SGD update and travel with the kernel into checkpoints.
template <typename T>
struct ConvKernelT {
    int out_c = 0, in_c = 0, kh = 0, kw = 0;
    std::vector<T> w, b;    // weights [out_c][in_c][kh][kw], bias [out_c]
    std::vector<T> gw, gb;  // accumulated gradients
    std::vector<T> vw, vb;  // SGD momentum state

    ConvKernelT() = default;
    ConvKernelT(int out_c_, int in_c_, int kh_, int kw_)
        : out_c(out_c_), in_c(in_c_), kh(kh_), kw(kw_) {
        if (!((kh_ == 1 && kw_ == 1) || (kh_ == 3 && kw_ == 3)))
            throw std::invalid_argument("ConvKernelT: kernel must be 1x1 or 3x3");
        if (out_c_ <= 0 || in_c_ <= 0)
            throw std::invalid_argument("ConvKernelT: channel counts must be positive");
        size_t nw = static_cast<size_t>(out_c_) * in_c_ * kh_ * kw_;
        w.assign(nw, T(0));
        gw.assign(nw, T(0));
        vw.assign(nw, T(0));
        b.assign(out_c_, T(0));
        gb.assign(out_c_, T(0));
        vb.assign(out_c_, T(0));
    }

    void zero_grads() {
        std::fill(gw.begin(), gw.end(), T(0));
        std::fill(gb.begin(), gb.end(), T(0));
    }

    const T* tap(int o, int i) const {
        return w.data() + (static_cast<size_t>(o) * in_c + i) * kh * kw;
    }
    T* grad_tap(int o, int i) {
        return gw.data() + (static_cast<size_t>(o) * in_c + i) * kh * kw;
    }
};

using ConvKernel = ConvKernelT<float>;

// ---------------------------------------------------------------------------
// conv2d

// out[n,o,y,x] = b[o] + sum_{i,dy,dx} in[n,i,y*s+dy-p, x*s+dx-p] * w[o,i,dy,dx]
// with zero padding. Accumulation order per output element is (i, dy, dx)
// ascending, so a 64-bit run matches the naive nested-loop oracle bit for bit.
template <typename T>
TensorT<T> conv2d(const TensorT<T>& in, const ConvKernelT<T>& k, int stride, int padding) {
    if (in.c != k.in_c)
        throw std::invalid_argument("conv2d: input channels " + std::to_string(in.c) +
                                    " do not match kernel in_c " + std::to_string(k.in_c));
    if (stride < 1) throw std::invalid_argument("conv2d: stride must be >= 1");
    if (padding < 0) throw std::invalid_argument("conv2d: padding must be >= 0");
    const int oh = (in.h + 2 * padding - k.kh) / stride + 1;
    const int ow = (in.w + 2 * padding - k.kw) / stride + 1;
    if (oh <= 0 || ow <= 0)
        throw std::invalid_argument("conv2d: kernel larger than padded input " + in.shape_str());

    TensorT<T> out(in.n, k.out_c, oh, ow);
    for (int n = 0; n < in.n; ++n) {
        for (int o = 0; o < k.out_c; ++o) {
            T* op = out.plane(n, o);
            const T bias = k.b[o];
            for (int idx = 0; idx < oh * ow; ++idx) op[idx] = bias;
            for (int i = 0; i < k.in_c; ++i) {
                const T* ip = in.plane(n, i);
                const T* kp = k.tap(o, i);
                for (int dy = 0; dy < k.kh; ++dy) {
                    for (int dx = 0; dx < k.kw; ++dx) {
                        const T wv = kp[dy * k.kw + dx];
                        for (int oy = 0; oy < oh; ++oy) {
                            const int iy = oy * stride + dy - padding;
                            if (iy < 0 || iy >= in.h) continue;
                            // valid ox range: 0 <= ox*stride + dx - padding < in.w
                            int ox0 = 0;
                            while (ox0 * stride + dx - padding < 0) ++ox0;
                            int ox1 = ow;  // exclusive
                            while (ox1 > ox0 && (ox1 - 1) * stride + dx - padding >= in.w) --ox1;
                            T* orow = op + static_cast<size_t>(oy) * ow;
                            const T* irow = ip + static_cast<size_t>(iy) * in.w + (dx - padding);
                            if (stride == 1) {
                                for (int ox = ox0; ox < ox1; ++ox) orow[ox] += wv * irow[ox];
                            } else {
                                for (int ox = ox0; ox < ox1; ++ox)
                                    orow[ox] += wv * ip[static_cast<size_t>(iy) * in.w + ox * stride + dx - padding];
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

/// Exact gradients of conv2d. Returns grad wrt the input; weight and bias
/// gradients accumulate (+=) into the kernel's buffers.
template <typename T>
TensorT<T> conv2d_backward(const TensorT<T>& grad_out, const TensorT<T>& saved_in,
                           ConvKernelT<T>& k, int stride, int padding) {
    if (saved_in.c != k.in_c)
        throw std::invalid_argument("conv2d_backward: saved input channels mismatch kernel");
    const int oh = (saved_in.h + 2 * padding - k.kh) / stride + 1;
    const int ow = (saved_in.w + 2 * padding - k.kw) / stride + 1;
    if (grad_out.n != saved_in.n || grad_out.c != k.out_c || grad_out.h != oh || grad_out.w != ow)
        throw std::invalid_argument("conv2d_backward: grad_out shape " + grad_out.shape_str() +
                                    " does not match forward output");

    TensorT<T> grad_in(saved_in.n, saved_in.c, saved_in.h, saved_in.w);
    for (int n = 0; n < saved_in.n; ++n) {
        for (int o = 0; o < k.out_c; ++o) {
            const T* gp = grad_out.plane(n, o);
            // bias gradient: plain sum over the plane
            T gb = T(0);
            for (int idx = 0; idx < oh * ow; ++idx) gb += gp[idx];
            k.gb[o] += gb;
            for (int i = 0; i < k.in_c; ++i) {
                T* gip = grad_in.plane(n, i);
                const T* ip = saved_in.plane(n, i);
                const T* kp = k.tap(o, i);
                T* gkp = k.grad_tap(o, i);
                for (int dy = 0; dy < k.kh; ++dy) {
                    for (int dx = 0; dx < k.kw; ++dx) {
                        const T wv = kp[dy * k.kw + dx];
                        T gw = T(0);
                        for (int oy = 0; oy < oh; ++oy) {
                            const int iy = oy * stride + dy - padding;
                            if (iy < 0 || iy >= saved_in.h) continue;
                            int ox0 = 0;
                            while (ox0 * stride + dx - padding < 0) ++ox0;
                            int ox1 = ow;
                            while (ox1 > ox0 && (ox1 - 1) * stride + dx - padding >= saved_in.w) --ox1;
                            const T* grow = gp + static_cast<size_t>(oy) * ow;
                            const size_t ibase = static_cast<size_t>(iy) * saved_in.w + (dx - padding);
                            if (stride == 1) {
                                const T* irow = ip + ibase;
                                T* girow = gip + ibase;
                                for (int ox = ox0; ox < ox1; ++ox) {
                                    gw += grow[ox] * irow[ox];
                                    girow[ox] += wv * grow[ox];
                                }
                            } else {
                                for (int ox = ox0; ox < ox1; ++ox) {
                                    const size_t ii = static_cast<size_t>(iy) * saved_in.w + ox * stride + dx - padding;
                                    gw += grow[ox] * ip[ii];
                                    gip[ii] += wv * grow[ox];
                                }
                            }
                        }
                        gkp[dy * k.kw + dx] += gw;
                    }
                }
            }
        }
    }
    return grad_in;
}

// ---------------------------------------------------------------------------
// elementwise activations

template <typename T>
TensorT<T> relu(const TensorT<T>& in) {
    TensorT<T> out(in.n, in.c, in.h, in.w);
    for (size_t i = 0; i < in.data.size(); ++i) out.data[i] = in.data[i] > T(0) ? in.data[i] : T(0);
    return out;
}

/// Passes gradient where the saved forward output is positive.
template <typename T>
TensorT<T> relu_backward(const TensorT<T>& grad_out, const TensorT<T>& saved_out) {
    if (!grad_out.same_shape(saved_out))
        throw std::invalid_argument("relu_backward: shape mismatch");
    TensorT<T> gin(grad_out.n, grad_out.c, grad_out.h, grad_out.w);
    for (size_t i = 0; i < gin.data.size(); ++i)
        gin.data[i] = saved_out.data[i] > T(0) ? grad_out.data[i] : T(0);
    return gin;
}

template <typename T>
TensorT<T> sigmoid(const TensorT<T>& in) {
    TensorT<T> out(in.n, in.c, in.h, in.w);
    for (size_t i = 0; i < in.data.size(); ++i)
        out.data[i] = T(1) / (T(1) + std::exp(-in.data[i]));
    return out;
}

template <typename T>
TensorT<T> sigmoid_backward(const TensorT<T>& grad_out, const TensorT<T>& saved_out) {
    if (!grad_out.same_shape(saved_out))
        throw std::invalid_argument("sigmoid_backward: shape mismatch");
    TensorT<T> gin(grad_out.n, grad_out.c, grad_out.h, grad_out.w);
    for (size_t i = 0; i < gin.data.size(); ++i) {
        const T y = saved_out.data[i];
        gin.data[i] = grad_out.data[i] * y * (T(1) - y);
    }
    return gin;
}

// ---------------------------------------------------------------------------
// 2x2 max pooling, stride 2

// Argmax indices address the input plane (iy * w + ix); ties break to the
// first element in row-major window order.
template <typename T>
TensorT<T> maxpool2(const TensorT<T>& in, std::vector<int32_t>& argmax) {
    if (in.h % 2 != 0 || in.w % 2 != 0)
        throw std::invalid_argument("maxpool2: spatial size " + in.shape_str() + " must be even");
    const int oh = in.h / 2, ow = in.w / 2;
    TensorT<T> out(in.n, in.c, oh, ow);
    argmax.assign(out.size(), 0);
    size_t oi = 0;
    for (int n = 0; n < in.n; ++n) {
        for (int c = 0; c < in.c; ++c) {
            const T* ip = in.plane(n, c);
            T* op = out.plane(n, c);
            for (int oy = 0; oy < oh; ++oy) {
                for (int ox = 0; ox < ow; ++ox) {
                    const int iy = oy * 2, ix = ox * 2;
                    int best = iy * in.w + ix;
                    T bv = ip[best];
                    const int cand[3] = {iy * in.w + ix + 1, (iy + 1) * in.w + ix,
                                         (iy + 1) * in.w + ix + 1};
                    for (int t = 0; t < 3; ++t)
                        if (ip[cand[t]] > bv) { bv = ip[cand[t]]; best = cand[t]; }
                    op[oy * ow + ox] = bv;
                    argmax[oi++] = best;
                }
            }
        }
    }
    return out;
}

template <typename T>
TensorT<T> maxpool2_backward(const TensorT<T>& grad_out, const std::vector<int32_t>& argmax,
                             int in_h, int in_w) {
    if (argmax.size() != grad_out.size())
        throw std::invalid_argument("maxpool2_backward: argmax size mismatch");
    TensorT<T> gin(grad_out.n, grad_out.c, in_h, in_w);
    size_t oi = 0;
    for (int n = 0; n < grad_out.n; ++n) {
        for (int c = 0; c < grad_out.c; ++c) {
            const T* gp = grad_out.plane(n, c);
            T* gip = gin.plane(n, c);
            const int cnt = grad_out.h * grad_out.w;
            for (int idx = 0; idx < cnt; ++idx) gip[argmax[oi + idx]] += gp[idx];
            oi += cnt;
        }
    }
    return gin;
}

// ---------------------------------------------------------------------------
// fixed bilinear upsampling (transposed convolution, non-learned kernel)

inline bool upsample_factor_ok(int f) { return f == 2 || f == 4 || f == 8; }

/// 1D bilinear kernel of size 2f - (f % 2); rows of the 2D kernel by outer product.
template <typename T>
std::vector<T> bilinear_taps(int f) {
    if (!upsample_factor_ok(f))
        throw std::invalid_argument("upsample_bilinear: factor must be 2, 4 or 8");
    const int k = 2 * f - (f % 2);
    const double center = (k - 1) / 2.0;
    std::vector<T> taps(k);
    for (int i = 0; i < k; ++i)
        taps[i] = static_cast<T>(1.0 - std::abs(i - center) / static_cast<double>(f));
    return taps;
}

// Scatter form: each input pixel spreads its tent onto the output, which is
// then center-cropped from f*(h-1)+k down to exactly f*h per side.
template <typename T>
TensorT<T> upsample_bilinear(const TensorT<T>& in, int f) {
    const std::vector<T> taps = bilinear_taps<T>(f);
    const int k = static_cast<int>(taps.size());
    const int crop = (k - f) / 2;
    const int oh = f * in.h, ow = f * in.w;
    TensorT<T> out(in.n, in.c, oh, ow);
    for (int n = 0; n < in.n; ++n) {
        for (int c = 0; c < in.c; ++c) {
            const T* ip = in.plane(n, c);
            T* op = out.plane(n, c);
            for (int iy = 0; iy < in.h; ++iy) {
                for (int ix = 0; ix < in.w; ++ix) {
                    const T v = ip[iy * in.w + ix];
                    if (v == T(0)) continue;
                    for (int dy = 0; dy < k; ++dy) {
                        const int oy = f * iy + dy - crop;
                        if (oy < 0 || oy >= oh) continue;
                        const T vy = v * taps[dy];
                        T* orow = op + static_cast<size_t>(oy) * ow;
                        for (int dx = 0; dx < k; ++dx) {
                            const int ox = f * ix + dx - crop;
                            if (ox < 0 || ox >= ow) continue;
                            orow[ox] += vy * taps[dx];
                        }
                    }
                }
            }
        }
    }
    return out;
}

/// Adjoint of upsample_bilinear (gather with the same taps).
template <typename T>
TensorT<T> upsample_bilinear_backward(const TensorT<T>& grad_out, int f, int in_h, int in_w) {
    const std::vector<T> taps = bilinear_taps<T>(f);
    const int k = static_cast<int>(taps.size());
    const int crop = (k - f) / 2;
    if (grad_out.h != f * in_h || grad_out.w != f * in_w)
        throw std::invalid_argument("upsample_bilinear_backward: grad_out " + grad_out.shape_str() +
                                    " does not match factor " + std::to_string(f));
    TensorT<T> gin(grad_out.n, grad_out.c, in_h, in_w);
    for (int n = 0; n < grad_out.n; ++n) {
        for (int c = 0; c < grad_out.c; ++c) {
            const T* gp = grad_out.plane(n, c);
            T* gip = gin.plane(n, c);
            for (int iy = 0; iy < in_h; ++iy) {
                for (int ix = 0; ix < in_w; ++ix) {
                    T acc = T(0);
                    for (int dy = 0; dy < k; ++dy) {
                        const int oy = f * iy + dy - crop;
                        if (oy < 0 || oy >= grad_out.h) continue;
                        const T* grow = gp + static_cast<size_t>(oy) * grad_out.w;
                        T rowacc = T(0);
                        for (int dx = 0; dx < k; ++dx) {
                            const int ox = f * ix + dx - crop;
                            if (ox < 0 || ox >= grad_out.w) continue;
                            rowacc += taps[dx] * grow[ox];
                        }
                        acc += taps[dy] * rowacc;
                    }
                    gip[iy * in_w + ix] = acc;
                }
            }
        }
    }
    return gin;
}

// ---------------------------------------------------------------------------
// elementwise sum

template <typename T>
TensorT<T> eltwise_add(const std::vector<const TensorT<T>*>& inputs) {
    if (inputs.empty()) throw std::invalid_argument("eltwise_add: no inputs");
    const TensorT<T>& first = *inputs[0];
    TensorT<T> out(first.n, first.c, first.h, first.w);
    for (const TensorT<T>* t : inputs) {
        if (!t->same_shape(first))
            throw std::invalid_argument("eltwise_add: shape mismatch " + t->shape_str() +
                                        " vs " + first.shape_str());
        for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += t->data[i];
    }
    return out;
}

/// Backward of eltwise_add: every input receives grad_out unchanged.
template <typename T>
std::vector<TensorT<T>> eltwise_add_backward(const TensorT<T>& grad_out, int n_inputs) {
    return std::vector<TensorT<T>>(n_inputs, grad_out);
}

}  // namespace wein
