#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "lrss2d/rng.hpp"

namespace lrss2d {

// Dense real matrix, row-major, 64-bit entries. The substrate for every
// system parameter in the library (transitions, input/output vectors,
// factors, mixers, projections).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix identity(std::size_t n);
    // Entries i.i.d. normal(0, scale^2), drawn row-major from rng.
    static Matrix random_normal(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }
    // Row-major pointer access for hot loops.
    const double* raw() const { return data_.data(); }
    double* raw() { return data_.data(); }

    Matrix transpose() const;
    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

    bool all_finite() const;
    bool operator==(const Matrix& other) const = default;

    std::string shape_string() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);

// Standard product; throws ShapeError naming both shapes on mismatch.
Matrix mat_mul(const Matrix& a, const Matrix& b);
inline Matrix operator*(const Matrix& a, const Matrix& b) { return mat_mul(a, b); }

// Matrix exponential by scaling-and-squaring with a truncated Taylor series;
// the series is extended until the tail is negligible at double precision.
// Throws ShapeError for non-square input.
Matrix mat_exp(const Matrix& a);

// sqrt of the sum of squared entries.
double frobenius_norm(const Matrix& a);

// Mean of squared element differences; throws ShapeError on shape mismatch.
double mse(const Matrix& a, const Matrix& b);

}  // namespace lrss2d
