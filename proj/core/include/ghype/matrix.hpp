#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace ghype {

/// Dense square matrix, row-major.
template <typename T>
class Matrix {
public:
    using value_type = T;

    Matrix() = default;
    explicit Matrix(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}
    Matrix(std::size_t n, std::vector<T> data) : n_(n), data_(std::move(data)) {
        assert(data_.size() == n_ * n_);
    }

    std::size_t size() const noexcept { return n_; }

    T& operator()(std::size_t i, std::size_t j) noexcept {
        assert(i < n_ && j < n_);
        return data_[i * n_ + j];
    }
    const T& operator()(std::size_t i, std::size_t j) const noexcept {
        assert(i < n_ && j < n_);
        return data_[i * n_ + j];
    }

    std::span<const T> data() const noexcept { return data_; }
    std::span<T> data() noexcept { return data_; }

    std::span<const T> row(std::size_t i) const noexcept {
        return std::span<const T>(data_).subspan(i * n_, n_);
    }

    bool is_symmetric() const noexcept {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }

    Matrix transposed() const {
        Matrix t(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<T> data_;
};

} // namespace ghype
