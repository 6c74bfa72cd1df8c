/*
 * Copyright 2026 The archsel Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ARCHSEL_CORE_TENSOR_HPP
#define ARCHSEL_CORE_TENSOR_HPP

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "archsel/core/errors.hpp"

namespace archsel {

/// Shaped, row-major dense array backed by an Eigen column vector.
/// Index order is C-style: the last dimension varies fastest.
template <typename Scalar>
class TensorT {
public:
    using Storage = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

    TensorT() = default;

    explicit TensorT(std::vector<int> shape)
        : shape_(std::move(shape)), data_(Storage::Zero(checked_size(shape_))) {}

    TensorT(std::vector<int> shape, Storage data) : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != checked_size(shape_))
            throw ShapeMismatchError("tensor data length " + std::to_string(data_.size()) +
                                     " does not match shape " + shape_string(shape_));
    }

    static TensorT zeros(std::vector<int> shape) { return TensorT(std::move(shape)); }

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
    Eigen::Index size() const { return data_.size(); }

    Scalar* data() { return data_.data(); }
    const Scalar* data() const { return data_.data(); }
    Storage& raw() { return data_; }
    const Storage& raw() const { return data_; }

    Scalar& operator[](Eigen::Index i) { return data_[i]; }
    Scalar operator[](Eigen::Index i) const { return data_[i]; }

    /// Flat offset of (a, b) in a rank-2 tensor, and friends. No bounds checks.
    Eigen::Index idx2(int a, int b) const { return static_cast<Eigen::Index>(a) * dim(1) + b; }
    Eigen::Index idx3(int a, int b, int c) const {
        return (static_cast<Eigen::Index>(a) * dim(1) + b) * dim(2) + c;
    }
    Eigen::Index idx4(int a, int b, int c, int d) const {
        return ((static_cast<Eigen::Index>(a) * dim(1) + b) * dim(2) + c) * dim(3) + d;
    }

    void set_zero() { data_.setZero(); }
    void fill(Scalar v) { data_.setConstant(v); }

    bool same_shape(const TensorT& other) const { return shape_ == other.shape_; }
    bool all_finite() const { return data_.isFinite().all(); }

    /// Same data, new shape (sizes must agree). Returns a copy.
    TensorT reshaped(std::vector<int> new_shape) const {
        if (checked_size(new_shape) != data_.size())
            throw ShapeMismatchError("reshape to " + shape_string(new_shape) + " changes element count");
        return TensorT(std::move(new_shape), data_);
    }

    static std::string shape_string(const std::vector<int>& s) {
        std::string out = "[";
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(s[i]);
        }
        return out + "]";
    }

private:
    static Eigen::Index checked_size(const std::vector<int>& shape) {
        Eigen::Index n = 1;
        for (int d : shape) {
            if (d <= 0) throw ShapeMismatchError("non-positive dimension in shape " + shape_string(shape));
            n *= d;
        }
        return n;
    }

    std::vector<int> shape_;
    Storage data_;
};

using Tensor = TensorT<double>;

} // namespace archsel

#endif
