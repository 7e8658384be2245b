// Times the serial reference kernels against the OpenMP backend and checks
// that both produce bit-identical results on the benchmark inputs.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "tempshift/kernels.hpp"
#include "tempshift/rng.hpp"

using namespace tempshift;
using kernels::Exec;

namespace {

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
    Matrix M(r, c);
    for (double& v : M.data) v = rng.normal();
    return M;
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

void report(const std::string& name, double serial_s, double parallel_s,
            bool identical) {
    std::printf("%-24s serial %9.4f ms   parallel %9.4f ms   speedup %5.2fx   %s\n",
                name.c_str(), serial_s * 1e3, parallel_s * 1e3,
                serial_s / parallel_s, identical ? "bit-identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    std::size_t n = 4096, d_in = 256, d_out = 256;
    int reps = 5;
    if (argc > 1) n = static_cast<std::size_t>(std::stoul(argv[1]));
    if (argc > 2) d_in = d_out = static_cast<std::size_t>(std::stoul(argv[2]));
    if (argc > 3) reps = std::stoi(argv[3]);
    std::printf("kernel benchmark: n=%zu, d_in=%zu, d_out=%zu, best of %d\n\n", n,
                d_in, d_out, reps);

    Rng rng(12345);
    const Matrix X = random_matrix(rng, n, d_in);
    const Matrix W = random_matrix(rng, d_out, d_in);
    std::vector<double> b(d_out);
    for (double& v : b) v = rng.normal();
    const Matrix dY = random_matrix(rng, n, d_out);

    {
        Matrix Ys, Yp;
        const double ts = time_best_of(reps, [&] { kernels::serial::linear_forward(X, W, b, Ys); });
        const double tp = time_best_of(reps, [&] { kernels::parallel::linear_forward(X, W, b, Yp); });
        report("linear_forward", ts, tp, Ys.data == Yp.data);
    }
    {
        Matrix dWs, dWp;
        std::vector<double> dbs, dbp;
        const double ts = time_best_of(
            reps, [&] { kernels::serial::linear_backward_params(dY, X, dWs, dbs); });
        const double tp = time_best_of(
            reps, [&] { kernels::parallel::linear_backward_params(dY, X, dWp, dbp); });
        report("linear_backward_params", ts, tp, dWs.data == dWp.data && dbs == dbp);
    }
    {
        Matrix dXs, dXp;
        const double ts = time_best_of(
            reps, [&] { kernels::serial::linear_backward_input(dY, W, dXs); });
        const double tp = time_best_of(
            reps, [&] { kernels::parallel::linear_backward_input(dY, W, dXp); });
        report("linear_backward_input", ts, tp, dXs.data == dXp.data);
    }
    {
        const Matrix P = random_matrix(rng, std::min<std::size_t>(n, 1024), d_in);
        Matrix Ds, Dp;
        const double ts =
            time_best_of(reps, [&] { kernels::serial::pairwise_sqdist(P, Ds); });
        const double tp =
            time_best_of(reps, [&] { kernels::parallel::pairwise_sqdist(P, Dp); });
        report("pairwise_sqdist", ts, tp, Ds.data == Dp.data);
    }
    {
        std::vector<std::size_t> rows(X.rows);
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        std::vector<double> ms, ss, mp, sp;
        const double ts = time_best_of(
            reps, [&] { kernels::serial::column_mean_std(X, rows, ms, ss); });
        const double tp = time_best_of(
            reps, [&] { kernels::parallel::column_mean_std(X, rows, mp, sp); });
        report("column_mean_std", ts, tp, ms == mp && ss == sp);
    }
    return 0;
}
