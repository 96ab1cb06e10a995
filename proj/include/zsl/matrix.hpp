#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace zsl {

// Dense row-major matrix of doubles. The single carrier for features,
// attributes, activations, parameters and gradients.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    // 1 x cols copy of one row.
    Matrix row_copy(std::size_t r) const;

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    std::string shape_str() const;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Throws ShapeError unless a.cols == b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& m, double scalar);
Matrix& operator+=(Matrix& a, const Matrix& b);

Matrix hadamard(const Matrix& a, const Matrix& b);

// m + row broadcast across every row of m; row must be 1 x m.cols.
Matrix add_row_broadcast(const Matrix& m, const Matrix& row);

// 1 x cols vector of column sums.
Matrix col_sums(const Matrix& m);

double sum_squares(const Matrix& m);

bool all_finite(const Matrix& m);

} // namespace zsl
