#pragma once

#include <cstdint>
#include <vector>

#include "tempshift/matrix.hpp"

namespace tempshift::kernels {

/// Execution backend for the numeric kernels. The parallel backend assigns
/// each output element to exactly one thread and keeps the reduction inside
/// that thread serial, so serial and parallel results are bit-identical for
/// any thread count.
enum class Exec { Serial, Parallel };

/// Process-wide backend selection, defaults to Parallel (falls back to the
/// serial loops when built without OpenMP).
Exec& exec_mode();

namespace serial {

/// Y = X * W^T + b, with X (n x in), W (out x in), b (out).
void linear_forward(const Matrix& X, const Matrix& W, const std::vector<double>& b, Matrix& Y);

/// dW = dY^T * X, db = column sums of dY.
void linear_backward_params(const Matrix& dY, const Matrix& X, Matrix& dW,
                            std::vector<double>& db);

/// dX = dY * W.
void linear_backward_input(const Matrix& dY, const Matrix& W, Matrix& dX);

/// Squared Euclidean distance between every pair of rows of M.
/// out is resized to n x n; out(i,i) = 0.
void pairwise_sqdist(const Matrix& M, Matrix& out);

/// Population mean and standard deviation of each column of X over `rows`.
void column_mean_std(const Matrix& X, const std::vector<std::size_t>& rows,
                     std::vector<double>& means, std::vector<double>& stds);

} // namespace serial

namespace parallel {

void linear_forward(const Matrix& X, const Matrix& W, const std::vector<double>& b, Matrix& Y);
void linear_backward_params(const Matrix& dY, const Matrix& X, Matrix& dW,
                            std::vector<double>& db);
void linear_backward_input(const Matrix& dY, const Matrix& W, Matrix& dX);
void pairwise_sqdist(const Matrix& M, Matrix& out);
void column_mean_std(const Matrix& X, const std::vector<std::size_t>& rows,
                     std::vector<double>& means, std::vector<double>& stds);

} // namespace parallel

// Dispatching entry points used by the rest of the library.
void linear_forward(const Matrix& X, const Matrix& W, const std::vector<double>& b, Matrix& Y);
void linear_backward_params(const Matrix& dY, const Matrix& X, Matrix& dW,
                            std::vector<double>& db);
void linear_backward_input(const Matrix& dY, const Matrix& W, Matrix& dX);
void pairwise_sqdist(const Matrix& M, Matrix& out);
void column_mean_std(const Matrix& X, const std::vector<std::size_t>& rows,
                     std::vector<double>& means, std::vector<double>& stds);

} // namespace tempshift::kernels
