#include "lrss2d/matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "lrss2d/errors.hpp"

namespace lrss2d {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_)
            throw ShapeError("Matrix: ragged initializer list");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::random_normal(std::size_t rows, std::size_t cols, Rng& rng, double scale) {
    Matrix m(rows, cols);
    for (double& x : m.data_) x = scale * rng.normal();
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            t(c, r) = (*this)(r, c);
    return t;
}

std::string Matrix::shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_string() +
                         " vs " + b.shape_string());
}

}  // namespace

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "operator+");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "operator-");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

bool Matrix::all_finite() const {
    for (double x : data_)
        if (!std::isfinite(x)) return false;
    return true;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw ShapeError("mat_mul: dimension mismatch " + a.shape_string() + " * " +
                         b.shape_string());
    Matrix out(a.rows(), b.cols());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    const double* pa = a.raw();
    const double* pb = b.raw();
    double* po = out.raw();
    // i-k-j order keeps both streams sequential at row-major layout.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double aik = pa[i * k + kk];
            if (aik == 0.0) continue;
            const double* brow = pb + kk * m;
            double* orow = po + i * m;
            for (std::size_t j = 0; j < m; ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

namespace {

double max_abs(const Matrix& m) {
    double v = 0.0;
    for (double x : m.data()) v = std::max(v, std::abs(x));
    return v;
}

}  // namespace

Matrix mat_exp(const Matrix& a) {
    if (a.rows() != a.cols())
        throw ShapeError("mat_exp: matrix must be square, got " + a.shape_string());
    const std::size_t n = a.rows();

    // Scale A down until its max-norm is <= 0.5, run the Taylor series to
    // machine precision, then square the result back up.
    int squarings = 0;
    double norm = max_abs(a);
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    Matrix scaled = a;
    scaled *= std::ldexp(1.0, -squarings);

    Matrix result = Matrix::identity(n);
    Matrix term = Matrix::identity(n);
    for (int k = 1; k <= 40; ++k) {
        term = mat_mul(term, scaled);
        term *= 1.0 / static_cast<double>(k);
        result += term;
        if (max_abs(term) <= 1e-16 * std::max(1.0, max_abs(result))) break;
    }
    for (int s = 0; s < squarings; ++s) result = mat_mul(result, result);

    if (!result.all_finite())
        throw NumericalError("mat_exp: non-finite result (input norm " +
                             std::to_string(max_abs(a)) + ")");
    return result;
}

double frobenius_norm(const Matrix& a) {
    double sum = 0.0;
    for (double x : a.data()) sum += x * x;
    return std::sqrt(sum);
}

double mse(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "mse");
    if (a.size() == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.size());
}

}  // namespace lrss2d
