#include "tempshift/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace tempshift::kernels {

Exec& exec_mode() {
    static Exec mode = Exec::Parallel;
    return mode;
}

namespace {

void check_forward_shapes(const Matrix& X, const Matrix& W, const std::vector<double>& b) {
    if (X.cols != W.cols)
        throw std::invalid_argument("linear_forward: X cols != W cols");
    if (b.size() != W.rows)
        throw std::invalid_argument("linear_forward: bias size != W rows");
}

void check_backward_shapes(const Matrix& dY, const Matrix& X, const Matrix& W, bool have_w) {
    if (have_w && dY.cols != W.rows)
        throw std::invalid_argument("linear_backward: dY cols != W rows");
    if (!have_w && dY.rows != X.rows)
        throw std::invalid_argument("linear_backward: dY rows != X rows");
}

inline double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
}

inline double sqdist(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

} // namespace

namespace serial {

void linear_forward(const Matrix& X, const Matrix& W, const std::vector<double>& b, Matrix& Y) {
    check_forward_shapes(X, W, b);
    Y = Matrix(X.rows, W.rows);
    for (std::size_t i = 0; i < X.rows; ++i) {
        const double* xi = X.row_ptr(i);
        double* yi = Y.row_ptr(i);
        for (std::size_t o = 0; o < W.rows; ++o)
            yi[o] = dot(xi, W.row_ptr(o), X.cols) + b[o];
    }
}

void linear_backward_params(const Matrix& dY, const Matrix& X, Matrix& dW,
                            std::vector<double>& db) {
    check_backward_shapes(dY, X, Matrix(), false);
    dW = Matrix(dY.cols, X.cols);
    db.assign(dY.cols, 0.0);
    for (std::size_t o = 0; o < dY.cols; ++o) {
        double* dwo = dW.row_ptr(o);
        double dbo = 0.0;
        for (std::size_t i = 0; i < X.rows; ++i) {
            const double g = dY(i, o);
            const double* xi = X.row_ptr(i);
            for (std::size_t k = 0; k < X.cols; ++k) dwo[k] += g * xi[k];
            dbo += g;
        }
        db[o] = dbo;
    }
}

void linear_backward_input(const Matrix& dY, const Matrix& W, Matrix& dX) {
    check_backward_shapes(dY, Matrix(), W, true);
    dX = Matrix(dY.rows, W.cols);
    for (std::size_t i = 0; i < dY.rows; ++i) {
        const double* gi = dY.row_ptr(i);
        double* di = dX.row_ptr(i);
        for (std::size_t o = 0; o < W.rows; ++o) {
            const double g = gi[o];
            const double* wo = W.row_ptr(o);
            for (std::size_t k = 0; k < W.cols; ++k) di[k] += g * wo[k];
        }
    }
}

void pairwise_sqdist(const Matrix& M, Matrix& out) {
    out = Matrix(M.rows, M.rows);
    for (std::size_t i = 0; i < M.rows; ++i) {
        for (std::size_t j = i + 1; j < M.rows; ++j) {
            const double d = sqdist(M.row_ptr(i), M.row_ptr(j), M.cols);
            out(i, j) = d;
            out(j, i) = d;
        }
    }
}

void column_mean_std(const Matrix& X, const std::vector<std::size_t>& rows,
                     std::vector<double>& means, std::vector<double>& stds) {
    if (rows.empty()) throw std::invalid_argument("column_mean_std: empty row set");
    means.assign(X.cols, 0.0);
    stds.assign(X.cols, 0.0);
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (std::size_t j = 0; j < X.cols; ++j) {
        double m = 0.0;
        for (std::size_t r : rows) m += X(r, j);
        m *= inv_n;
        double v = 0.0;
        for (std::size_t r : rows) {
            const double d = X(r, j) - m;
            v += d * d;
        }
        means[j] = m;
        stds[j] = std::sqrt(v * inv_n);
    }
}

} // namespace serial

namespace parallel {

// Each parallel loop below distributes whole output elements (a row of Y, a
// row of dW, a pair (i,j), a column) across threads; the per-element
// reduction stays serial, so results match the serial backend bit for bit.

void linear_forward(const Matrix& X, const Matrix& W, const std::vector<double>& b, Matrix& Y) {
    check_forward_shapes(X, W, b);
    Y = Matrix(X.rows, W.rows);
    const std::int64_t n = static_cast<std::int64_t>(X.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double* xi = X.row_ptr(static_cast<std::size_t>(i));
        double* yi = Y.row_ptr(static_cast<std::size_t>(i));
        for (std::size_t o = 0; o < W.rows; ++o)
            yi[o] = dot(xi, W.row_ptr(o), X.cols) + b[o];
    }
}

void linear_backward_params(const Matrix& dY, const Matrix& X, Matrix& dW,
                            std::vector<double>& db) {
    check_backward_shapes(dY, X, Matrix(), false);
    dW = Matrix(dY.cols, X.cols);
    db.assign(dY.cols, 0.0);
    const std::int64_t nout = static_cast<std::int64_t>(dY.cols);
#pragma omp parallel for schedule(static)
    for (std::int64_t o = 0; o < nout; ++o) {
        double* dwo = dW.row_ptr(static_cast<std::size_t>(o));
        double dbo = 0.0;
        for (std::size_t i = 0; i < X.rows; ++i) {
            const double g = dY(i, static_cast<std::size_t>(o));
            const double* xi = X.row_ptr(i);
            for (std::size_t k = 0; k < X.cols; ++k) dwo[k] += g * xi[k];
            dbo += g;
        }
        db[static_cast<std::size_t>(o)] = dbo;
    }
}

void linear_backward_input(const Matrix& dY, const Matrix& W, Matrix& dX) {
    check_backward_shapes(dY, Matrix(), W, true);
    dX = Matrix(dY.rows, W.cols);
    const std::int64_t n = static_cast<std::int64_t>(dY.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double* gi = dY.row_ptr(static_cast<std::size_t>(i));
        double* di = dX.row_ptr(static_cast<std::size_t>(i));
        for (std::size_t o = 0; o < W.rows; ++o) {
            const double g = gi[o];
            const double* wo = W.row_ptr(o);
            for (std::size_t k = 0; k < W.cols; ++k) di[k] += g * wo[k];
        }
    }
}

void pairwise_sqdist(const Matrix& M, Matrix& out) {
    out = Matrix(M.rows, M.rows);
    const std::int64_t n = static_cast<std::int64_t>(M.rows);
    // Dynamic schedule balances the shrinking inner range; each pair is still
    // written by exactly one thread.
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        const std::size_t si = static_cast<std::size_t>(i);
        for (std::size_t j = si + 1; j < M.rows; ++j) {
            const double d = sqdist(M.row_ptr(si), M.row_ptr(j), M.cols);
            out(si, j) = d;
            out(j, si) = d;
        }
    }
}

void column_mean_std(const Matrix& X, const std::vector<std::size_t>& rows,
                     std::vector<double>& means, std::vector<double>& stds) {
    if (rows.empty()) throw std::invalid_argument("column_mean_std: empty row set");
    means.assign(X.cols, 0.0);
    stds.assign(X.cols, 0.0);
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    const std::int64_t ncols = static_cast<std::int64_t>(X.cols);
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < ncols; ++j) {
        const std::size_t col = static_cast<std::size_t>(j);
        double m = 0.0;
        for (std::size_t r : rows) m += X(r, col);
        m *= inv_n;
        double v = 0.0;
        for (std::size_t r : rows) {
            const double d = X(r, col) - m;
            v += d * d;
        }
        means[col] = m;
        stds[col] = std::sqrt(v * inv_n);
    }
}

} // namespace parallel

#define TEMPSHIFT_DISPATCH(fn, ...)                \
    do {                                           \
        if (exec_mode() == Exec::Serial)           \
            serial::fn(__VA_ARGS__);               \
        else                                       \
            parallel::fn(__VA_ARGS__);             \
    } while (0)

void linear_forward(const Matrix& X, const Matrix& W, const std::vector<double>& b, Matrix& Y) {
    TEMPSHIFT_DISPATCH(linear_forward, X, W, b, Y);
}

void linear_backward_params(const Matrix& dY, const Matrix& X, Matrix& dW,
                            std::vector<double>& db) {
    TEMPSHIFT_DISPATCH(linear_backward_params, dY, X, dW, db);
}

void linear_backward_input(const Matrix& dY, const Matrix& W, Matrix& dX) {
    TEMPSHIFT_DISPATCH(linear_backward_input, dY, W, dX);
}

void pairwise_sqdist(const Matrix& M, Matrix& out) {
    TEMPSHIFT_DISPATCH(pairwise_sqdist, M, out);
}

void column_mean_std(const Matrix& X, const std::vector<std::size_t>& rows,
                     std::vector<double>& means, std::vector<double>& stds) {
    TEMPSHIFT_DISPATCH(column_mean_std, X, rows, means, stds);
}

#undef TEMPSHIFT_DISPATCH

} // namespace tempshift::kernels
