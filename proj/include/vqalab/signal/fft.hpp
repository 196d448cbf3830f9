#pragma once

#include <complex>
#include <vector>

namespace vqalab::signal {

using ComplexVec = std::vector<std::complex<double>>;

enum class FftDirection { forward, inverse };

// Radix-2 iterative FFT. Length must be a power of two; the inverse is
// normalized so that fft(fft(x, fwd), inv) == x.
ComplexVec fft(const ComplexVec& x, FftDirection direction);

// result[k] = sum_j a[j] * b[(k - j) mod n], via the convolution theorem.
// Both inputs must share one power-of-two length.
std::vector<double> circular_convolve(const std::vector<double>& a,
                                      const std::vector<double>& b);

// Adjoint of circular convolution in its first argument:
// result[j] = sum_k g[k] * b[(k - j) mod n] (circular cross-correlation).
std::vector<double> circular_correlate(const std::vector<double>& g,
                                       const std::vector<double>& b);

bool is_power_of_two(std::size_t n);

}  // namespace vqalab::signal
