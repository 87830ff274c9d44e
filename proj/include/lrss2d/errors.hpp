#pragma once

#include <stdexcept>
#include <string>

namespace lrss2d {

// Operand shapes do not conform (matrix products, element-wise ops, ...).
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// A scalar or structural argument is out of its documented range.
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// An iterative routine failed to converge or produced non-finite values.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Gradient descent diverged (loss became NaN/Inf).
class TrainingError : public std::runtime_error {
public:
    explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

// File or stream operation failed.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A latency measurement could not resolve any nonzero sample.
class MeasurementError : public std::runtime_error {
public:
    explicit MeasurementError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lrss2d
