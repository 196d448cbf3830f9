#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vqalab/common.hpp"
#include "vqalab/nn/rng.hpp"
#include "vqalab/signal/fft.hpp"
#include "vqalab/signal/sketch.hpp"

using namespace vqalab;
using signal::ComplexVec;
using signal::FftDirection;

namespace {

ComplexVec random_complex(std::size_t n, nn::Rng& rng) {
    ComplexVec x(n);
    for (auto& v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    return x;
}

ComplexVec naive_dft(const ComplexVec& x) {
    std::size_t n = x.size();
    ComplexVec out(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
            double ang = -2.0 * std::numbers::pi * static_cast<double>(k * j) /
                         static_cast<double>(n);
            out[k] += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
    return out;
}

}  // namespace

TEST_CASE("fft of the unit impulse is flat") {
    ComplexVec x = {1, 0, 0, 0};
    ComplexVec y = signal::fft(x, FftDirection::forward);
    for (const auto& v : y) {
        CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(v.imag()) < 1e-12);
    }
}

TEST_CASE("fft roundtrip at n=64 recovers the input") {
    nn::Rng rng(101);
    ComplexVec x = random_complex(64, rng);
    ComplexVec y = signal::fft(signal::fft(x, FftDirection::forward), FftDirection::inverse);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - x[i]) < 1e-12);
}

TEST_CASE("fft matches the naive dft at n=16") {
    nn::Rng rng(102);
    ComplexVec x = random_complex(16, rng);
    ComplexVec fast = signal::fft(x, FftDirection::forward);
    ComplexVec slow = naive_dft(x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(fast[i] - slow[i]) < 1e-9);
}

TEST_CASE("convolution with the unit impulse is the identity") {
    std::vector<double> a = {0.5, -1.25, 3.0, 0.125, 2.0, -0.5, 1.0, 7.0};
    std::vector<double> delta(8, 0.0);
    delta[0] = 1.0;
    std::vector<double> out = signal::circular_convolve(a, delta);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(out[i] == doctest::Approx(a[i]).epsilon(1e-12));
}

TEST_CASE("[1,1] convolved with [1,1] is [2,2]") {
    std::vector<double> out = signal::circular_convolve({1, 1}, {1, 1});
    CHECK(out[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("fft convolution matches the direct circular sum at n=32") {
    nn::Rng rng(103);
    std::vector<double> a(32), b(32);
    for (double& v : a) v = rng.uniform(-2, 2);
    for (double& v : b) v = rng.uniform(-2, 2);
    std::vector<double> fast = signal::circular_convolve(a, b);
    for (std::size_t k = 0; k < 32; ++k) {
        double s = 0;
        for (std::size_t j = 0; j < 32; ++j) s += a[j] * b[(k + 32 - j) % 32];
        CHECK(fast[k] == doctest::Approx(s).epsilon(1e-9));
    }
}

TEST_CASE("non-power-of-two lengths are rejected") {
    CHECK_THROWS_AS(signal::fft(ComplexVec(6), FftDirection::forward), ShapeError);
    CHECK_THROWS_AS(signal::circular_convolve(std::vector<double>(3, 1.0),
                                              std::vector<double>(3, 1.0)),
                    ShapeError);
}

TEST_CASE("count sketch hand example: one entry lands signed in its bucket") {
    signal::SketchPlan plan;
    plan.input_dim = 1;
    plan.sketch_dim = 4;
    plan.index = {2};
    plan.sign = {-1.0};
    std::vector<double> out = signal::count_sketch({3.0}, plan);
    CHECK(out == std::vector<double>({0.0, 0.0, -3.0, 0.0}));
}

TEST_CASE("sketch of the zero vector is zero") {
    signal::SketchPlan plan = signal::SketchPlan::create(10, 8, 5);
    for (double v : signal::count_sketch(std::vector<double>(10, 0.0), plan)) CHECK(v == 0.0);
}

TEST_CASE("sketching is linear") {
    nn::Rng rng(104);
    signal::SketchPlan plan = signal::SketchPlan::create(12, 16, 6);
    std::vector<double> x(12), y(12), z(12);
    for (std::size_t i = 0; i < 12; ++i) {
        x[i] = rng.uniform(-1, 1);
        y[i] = rng.uniform(-1, 1);
        z[i] = 2.0 * x[i] + 3.0 * y[i];
    }
    std::vector<double> sx = signal::count_sketch(x, plan);
    std::vector<double> sy = signal::count_sketch(y, plan);
    std::vector<double> sz = signal::count_sketch(z, plan);
    for (std::size_t i = 0; i < 16; ++i)
        CHECK(sz[i] == doctest::Approx(2.0 * sx[i] + 3.0 * sy[i]).epsilon(1e-12));
}

TEST_CASE("sketched inner products are unbiased over many plans") {
    auto run = [](std::size_t d, std::size_t d_s, std::uint64_t seed0) {
        nn::Rng rng(105);
        const std::size_t trials = 500;
        std::vector<double> x(d), y(d);
        for (double& v : x) v = rng.uniform(-1, 1);
        for (double& v : y) v = rng.uniform(-1, 1);
        double exact = 0;
        for (std::size_t i = 0; i < d; ++i) exact += x[i] * y[i];

        std::vector<double> samples(trials);
        double mean = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            signal::SketchPlan plan = signal::SketchPlan::create(d, d_s, seed0 + t);
            std::vector<double> sx = signal::count_sketch(x, plan);
            std::vector<double> sy = signal::count_sketch(y, plan);
            double dot = 0;
            for (std::size_t i = 0; i < d_s; ++i) dot += sx[i] * sy[i];
            samples[t] = dot;
            mean += dot;
        }
        mean /= trials;
        double var = 0;
        for (double s : samples) var += (s - mean) * (s - mean);
        var /= (trials - 1);
        double se = std::sqrt(var / trials);
        // Floor covers the collision-free regime where the estimate is exact
        // and the spread is pure roundoff.
        CHECK(std::abs(mean - exact) <= 3.0 * se + 1e-12);
    };
    run(16, 64, 1000);  // more buckets than inputs: estimate is exact
    run(96, 32, 2000);  // collisions: genuinely stochastic estimate
}

TEST_CASE("product plan turns outer-product sketches into convolutions") {
    nn::Rng rng(106);
    for (auto [dx, dy, ds] : std::initializer_list<std::array<std::size_t, 3>>{
             {4, 4, 8}, {8, 6, 16}, {32, 32, 32}, {5, 7, 8}}) {
        signal::SketchPlan pa = signal::SketchPlan::create(dx, ds, 7 + dx);
        signal::SketchPlan pb = signal::SketchPlan::create(dy, ds, 17 + dy);
        std::vector<double> x(dx), y(dy);
        for (double& v : x) v = rng.uniform(-1, 1);
        for (double& v : y) v = rng.uniform(-1, 1);
        std::vector<double> outer(dx * dy);
        for (std::size_t i = 0; i < dx; ++i)
            for (std::size_t j = 0; j < dy; ++j) outer[i * dy + j] = x[i] * y[j];
        std::vector<double> left =
            signal::count_sketch(outer, signal::product_plan(pa, pb));
        std::vector<double> right = signal::circular_convolve(signal::count_sketch(x, pa),
                                                              signal::count_sketch(y, pb));
        for (std::size_t i = 0; i < ds; ++i)
            CHECK(left[i] == doctest::Approx(right[i]).epsilon(1e-9));
    }
}

TEST_CASE("forward fft preserves energy up to the length factor") {
    nn::Rng rng(107);
    ComplexVec x = random_complex(32, rng);
    ComplexVec y = signal::fft(x, FftDirection::forward);
    double ex = 0, ey = 0;
    for (const auto& v : x) ex += std::norm(v);
    for (const auto& v : y) ey += std::norm(v);
    CHECK(ey == doctest::Approx(32.0 * ex).epsilon(1e-9));
}
