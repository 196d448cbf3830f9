#include "vqalab/signal/fft.hpp"

#include <cmath>

#include "vqalab/common.hpp"

namespace vqalab::signal {

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

ComplexVec fft(const ComplexVec& x, FftDirection direction) {
    std::size_t n = x.size();
    if (!is_power_of_two(n)) throw ShapeError("fft: length must be a power of two");
    ComplexVec a = x;

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    double sign = direction == FftDirection::forward ? -1.0 : 1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                std::complex<double> u = a[i + j];
                std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }

    if (direction == FftDirection::inverse)
        for (auto& v : a) v /= static_cast<double>(n);
    return a;
}

namespace {

ComplexVec to_complex(const std::vector<double>& x) {
    ComplexVec c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) c[i] = {x[i], 0.0};
    return c;
}

std::vector<double> spectrum_product_to_real(ComplexVec fa, const ComplexVec& fb, bool conj_b) {
    for (std::size_t i = 0; i < fa.size(); ++i)
        fa[i] *= conj_b ? std::conj(fb[i]) : fb[i];
    ComplexVec out = fft(fa, FftDirection::inverse);
    std::vector<double> r(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) r[i] = out[i].real();
    return r;
}

void require_conv_lengths(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ShapeError("circular convolution: length mismatch");
    if (!is_power_of_two(a.size()))
        throw ShapeError("circular convolution: length must be a power of two");
}

}  // namespace

std::vector<double> circular_convolve(const std::vector<double>& a,
                                      const std::vector<double>& b) {
    require_conv_lengths(a, b);
    return spectrum_product_to_real(fft(to_complex(a), FftDirection::forward),
                                    fft(to_complex(b), FftDirection::forward), false);
}

std::vector<double> circular_correlate(const std::vector<double>& g,
                                       const std::vector<double>& b) {
    require_conv_lengths(g, b);
    return spectrum_product_to_real(fft(to_complex(g), FftDirection::forward),
                                    fft(to_complex(b), FftDirection::forward), true);
}

}  // namespace vqalab::signal
