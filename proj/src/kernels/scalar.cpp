#include "tsys/kernels.hpp"

namespace tsys::kernels {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

MinMax minmax_scalar(const double* x, std::size_t n) {
    MinMax r;
    if (n == 0) return r;
    r.min = r.max = x[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (x[i] < r.min) {
            r.min = x[i];
            r.argmin = i;
        }
        if (x[i] > r.max) {
            r.max = x[i];
            r.argmax = i;
        }
    }
    return r;
}

void horner_scalar(const double* c, std::size_t ncoef, const double* x, double* out, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = ncoef; k-- > 0;) acc = acc * x[j] + c[k];
        out[j] = acc;
    }
}

void gemv_t_scalar(const double* A, std::size_t rows, std::size_t cols, const double* y, double* out) {
    for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
    for (std::size_t i = 0; i < rows; ++i) axpy_scalar(y[i], A + i * cols, out, cols);
}

}  // namespace

const Table& scalar_table() noexcept {
    static const Table t{"scalar", dot_scalar, axpy_scalar, minmax_scalar, horner_scalar, gemv_t_scalar};
    return t;
}

}  // namespace tsys::kernels
