#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "wishmom/errors.hpp"

namespace wishmom {

// Dense row-major matrix of doubles. The 0x0 matrix is legal and represents
// the empty matrix (determinant 1 by convention).
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::initializer_list<std::initializer_list<double>> rows) {
        rows_ = rows.size();
        cols_ = rows_ > 0 ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            if (row.size() != cols_) {
                throw InvalidInputError("Matrix: ragged initializer (rows of unequal length)");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(const std::vector<double>& diag) {
        Matrix m(diag.size(), diag.size());
        for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const noexcept { return data_; }

    bool all_finite() const noexcept {
        for (double v : data_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    double max_abs() const noexcept {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    double trace() const {
        if (!is_square()) throw InvalidInputError("trace: matrix must be square");
        double t = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    void swap_rows(std::size_t a, std::size_t b) {
        for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
    }

    Matrix operator+(const Matrix& rhs) const {
        require_same_shape(rhs, "operator+");
        Matrix out(rows_, cols_);
        for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] + rhs.data_[k];
        return out;
    }

    Matrix operator-(const Matrix& rhs) const {
        require_same_shape(rhs, "operator-");
        Matrix out(rows_, cols_);
        for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] - rhs.data_[k];
        return out;
    }

    Matrix operator*(double s) const {
        Matrix out(rows_, cols_);
        for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] * s;
        return out;
    }

    Matrix operator*(const Matrix& rhs) const {
        if (cols_ != rhs.rows_) {
            throw InvalidInputError("operator*: inner dimensions do not match");
        }
        Matrix out(rows_, rhs.cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t k = 0; k < cols_; ++k) {
                const double a = (*this)(i, k);
                if (a == 0.0) continue;
                for (std::size_t j = 0; j < rhs.cols_; ++j) {
                    out(i, j) += a * rhs(k, j);
                }
            }
        }
        return out;
    }

    // Largest absolute entrywise difference; shapes must match.
    double max_abs_diff(const Matrix& rhs) const {
        require_same_shape(rhs, "max_abs_diff");
        double m = 0.0;
        for (std::size_t k = 0; k < data_.size(); ++k) {
            m = std::max(m, std::abs(data_[k] - rhs.data_[k]));
        }
        return m;
    }

    // In-place averaging with the transpose. Square matrices only.
    void symmetrize() {
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = i + 1; j < cols_; ++j) {
                const double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
                (*this)(i, j) = v;
                (*this)(j, i) = v;
            }
        }
    }

private:
    void require_same_shape(const Matrix& rhs, const char* op) const {
        if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
            throw InvalidInputError(std::string(op) + ": shape mismatch");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator*(double s, const Matrix& m) { return m * s; }

}  // namespace wishmom
