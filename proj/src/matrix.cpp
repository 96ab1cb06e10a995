#include "zsl/matrix.hpp"

#include <cmath>
#include <cstddef>

#include "zsl/error.hpp"

namespace zsl {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_)
            throw ShapeError("matrix literal has ragged rows");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::row_copy(std::size_t r) const {
    Matrix out(1, cols_);
    const double* src = row(r);
    for (std::size_t c = 0; c < cols_; ++c) out(0, c) = src[c];
    return out;
}

std::string Matrix::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw ShapeError("matmul: inner dimensions differ (" + a.shape_str() +
                         " vs " + b.shape_str() + ")");
    Matrix out(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* out_row = out.row(i);
        const double* a_row = a.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double a_ik = a_row[k];
            if (a_ik == 0.0) continue;
            const double* b_row = b.row(k);
            for (std::size_t j = 0; j < n; ++j) out_row[j] += a_ik * b_row[j];
        }
    }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
    return out;
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (!a.same_shape(b))
        throw ShapeError(std::string(op) + ": shapes differ (" + a.shape_str() +
                         " vs " + b.shape_str() + ")");
}

} // namespace

Matrix operator+(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "sub");
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= b.data()[i];
    return out;
}

Matrix operator*(const Matrix& m, double scalar) {
    Matrix out = m;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= scalar;
    return out;
}

Matrix& operator+=(Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] += b.data()[i];
    return a;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= b.data()[i];
    return out;
}

Matrix add_row_broadcast(const Matrix& m, const Matrix& row) {
    if (row.rows() != 1 || row.cols() != m.cols())
        throw ShapeError("broadcast: row is " + row.shape_str() + ", need 1x" +
                         std::to_string(m.cols()));
    Matrix out = m;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double* dst = out.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) dst[j] += row(0, j);
    }
    return out;
}

Matrix col_sums(const Matrix& m) {
    Matrix out(1, m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* src = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) out(0, j) += src[j];
    }
    return out;
}

double sum_squares(const Matrix& m) {
    double total = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) total += m.data()[i] * m.data()[i];
    return total;
}

bool all_finite(const Matrix& m) {
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!std::isfinite(m.data()[i])) return false;
    return true;
}

} // namespace zsl
