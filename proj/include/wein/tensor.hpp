#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wein {

// Dense NCHW feature map. Row-major, contiguous. float carries the normal
// 32-bit path; double instantiations back the finite-difference checks.
template <typename T>
struct TensorT {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<T> data;

    TensorT() = default;
    TensorT(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_),
          data(static_cast<size_t>(n_) * c_ * h_ * w_, T(0)) {
        if (n_ < 0 || c_ < 0 || h_ < 0 || w_ < 0)
            throw std::invalid_argument("TensorT: negative dimension");
    }

    size_t size() const { return data.size(); }

    T& at(int in, int ic, int iy, int ix) {
        return data[((static_cast<size_t>(in) * c + ic) * h + iy) * w + ix];
    }
    const T& at(int in, int ic, int iy, int ix) const {
        return data[((static_cast<size_t>(in) * c + ic) * h + iy) * w + ix];
    }

    /// Pointer to the (in, ic) spatial plane of h*w values.
    T* plane(int in, int ic) {
        return data.data() + (static_cast<size_t>(in) * c + ic) * h * w;
    }
    const T* plane(int in, int ic) const {
        return data.data() + (static_cast<size_t>(in) * c + ic) * h * w;
    }

    bool same_shape(const TensorT& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }

    std::string shape_str() const {
        return "(" + std::to_string(n) + "," + std::to_string(c) + "," +
               std::to_string(h) + "," + std::to_string(w) + ")";
    }

    void zero() { std::fill(data.begin(), data.end(), T(0)); }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }

    bool all_finite() const {
        for (T v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

template <typename T, typename U>
TensorT<T> tensor_cast(const TensorT<U>& x) {
    TensorT<T> out(x.n, x.c, x.h, x.w);
    for (size_t i = 0; i < x.data.size(); ++i) out.data[i] = static_cast<T>(x.data[i]);
    return out;
}

}  // namespace wein
