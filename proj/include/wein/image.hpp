#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wein/tensor.hpp"

namespace wein {

/// Single-channel real image, values nominally in [0, 1].
struct Image {
    int h = 0, w = 0;
    std::vector<float> pix;

    Image() = default;
    Image(int h_, int w_) : h(h_), w(w_), pix(static_cast<size_t>(h_) * w_, 0.0f) {}

    float& at(int y, int x) { return pix[static_cast<size_t>(y) * w + x]; }
    float at(int y, int x) const { return pix[static_cast<size_t>(y) * w + x]; }
    bool same_shape(const Image& o) const { return h == o.h && w == o.w; }
};

/// Binary mask; pixels are 0 or 1.
struct Mask {
    int h = 0, w = 0;
    std::vector<uint8_t> pix;

    Mask() = default;
    Mask(int h_, int w_) : h(h_), w(w_), pix(static_cast<size_t>(h_) * w_, 0) {}

    uint8_t& at(int y, int x) { return pix[static_cast<size_t>(y) * w + x]; }
    uint8_t at(int y, int x) const { return pix[static_cast<size_t>(y) * w + x]; }
    bool same_shape(const Mask& o) const { return h == o.h && w == o.w; }

    int64_t count() const {
        int64_t c = 0;
        for (uint8_t v : pix) c += v;
        return c;
    }
};

inline Image mask_to_image(const Mask& m) {
    Image out(m.h, m.w);
    for (size_t i = 0; i < m.pix.size(); ++i) out.pix[i] = m.pix[i] ? 1.0f : 0.0f;
    return out;
}

/// Interprets a (1,1,h,w) tensor as an image.
template <typename T>
Image tensor_to_image(const TensorT<T>& t) {
    if (t.n != 1 || t.c != 1)
        throw std::invalid_argument("tensor_to_image: expected (1,1,h,w), got " + t.shape_str());
    Image out(t.h, t.w);
    for (size_t i = 0; i < out.pix.size(); ++i) out.pix[i] = static_cast<float>(t.data[i]);
    return out;
}

template <typename T>
TensorT<T> image_to_tensor(const Image& img) {
    TensorT<T> t(1, 1, img.h, img.w);
    for (size_t i = 0; i < img.pix.size(); ++i) t.data[i] = static_cast<T>(img.pix[i]);
    return t;
}

inline Mask threshold_image(const Image& img, float threshold) {
    Mask m(img.h, img.w);
    for (size_t i = 0; i < img.pix.size(); ++i) m.pix[i] = img.pix[i] > threshold ? 1 : 0;
    return m;
}

}  // namespace wein
