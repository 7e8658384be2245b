#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tempshift {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}
    Matrix(std::size_t r, std::size_t c, std::vector<double> values)
        : rows(r), cols(c), data(std::move(values)) {
        if (data.size() != rows * cols)
            throw std::invalid_argument("Matrix: value count does not match shape");
    }

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row_ptr(std::size_t i) { return data.data() + i * cols; }
    const double* row_ptr(std::size_t i) const { return data.data() + i * cols; }

    bool empty() const { return rows == 0 || cols == 0; }

    void require_shape(std::size_t r, std::size_t c, const std::string& what) const {
        if (rows != r || cols != c) {
            throw std::invalid_argument(what + ": expected " + std::to_string(r) + "x" +
                                        std::to_string(c) + ", got " + std::to_string(rows) +
                                        "x" + std::to_string(cols));
        }
    }
};

} // namespace tempshift
