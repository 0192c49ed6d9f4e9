#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace tsbm {

// Dense row-major arrays. The last index is contiguous, so row() hands out a
// pointer suitable for tight per-interval loops.

template <typename T>
class Array2 {
public:
    Array2() = default;
    Array2(int rows, int cols, T init = T{})
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, init) {
        assert(rows >= 0 && cols >= 0);
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    T& operator()(int i, int j) {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<size_t>(i) * cols_ + j];
    }
    const T& operator()(int i, int j) const {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<size_t>(i) * cols_ + j];
    }

    T* row(int i) { return data_.data() + static_cast<size_t>(i) * cols_; }
    const T* row(int i) const { return data_.data() + static_cast<size_t>(i) * cols_; }

    void fill(T v) { data_.assign(data_.size(), v); }
    size_t size() const { return data_.size(); }
    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

template <typename T>
class Array3 {
public:
    Array3() = default;
    Array3(int n0, int n1, int n2, T init = T{})
        : n0_(n0), n1_(n1), n2_(n2),
          data_(static_cast<size_t>(n0) * n1 * n2, init) {
        assert(n0 >= 0 && n1 >= 0 && n2 >= 0);
    }

    int dim0() const { return n0_; }
    int dim1() const { return n1_; }
    int dim2() const { return n2_; }

    T& operator()(int i, int j, int k) {
        assert(i >= 0 && i < n0_ && j >= 0 && j < n1_ && k >= 0 && k < n2_);
        return data_[(static_cast<size_t>(i) * n1_ + j) * n2_ + k];
    }
    const T& operator()(int i, int j, int k) const {
        assert(i >= 0 && i < n0_ && j >= 0 && j < n1_ && k >= 0 && k < n2_);
        return data_[(static_cast<size_t>(i) * n1_ + j) * n2_ + k];
    }

    // Pointer to the contiguous slice (i, j, 0..n2).
    T* row(int i, int j) {
        assert(i >= 0 && i < n0_ && j >= 0 && j < n1_);
        return data_.data() + (static_cast<size_t>(i) * n1_ + j) * n2_;
    }
    const T* row(int i, int j) const {
        assert(i >= 0 && i < n0_ && j >= 0 && j < n1_);
        return data_.data() + (static_cast<size_t>(i) * n1_ + j) * n2_;
    }

    void fill(T v) { data_.assign(data_.size(), v); }
    size_t size() const { return data_.size(); }
    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

private:
    int n0_ = 0, n1_ = 0, n2_ = 0;
    std::vector<T> data_;
};

}  // namespace tsbm
