#pragma once

#include <cstddef>
#include <vector>

#include "vqalab/common.hpp"

namespace vqalab::nn {

// Row-major dense array of doubles. Rank 1 (vector) and rank 2 (matrix) cover
// everything this project needs.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape);
    Tensor(std::vector<std::size_t> shape, std::vector<double> values);

    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<std::size_t> shape, double v);
    static Tensor vec(std::vector<double> values);
    static Tensor scalar(double v) { return vec({v}); }
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return values_.size(); }

    // Matrix view: rank-1 tensors count as a single row.
    std::size_t rows() const { return rank() <= 1 ? 1 : shape_[0]; }
    std::size_t cols() const { return shape_.empty() ? 0 : shape_.back(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }

    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;
    void add_inplace(const Tensor& other);  // shape-checked accumulate

private:
    std::vector<std::size_t> shape_;
    std::vector<double> values_;
};

std::size_t shape_size(const std::vector<std::size_t>& shape);

// Throws NumericalError naming `what` if any entry is NaN/Inf.
void check_finite(const Tensor& t, const char* what);

}  // namespace vqalab::nn
