#pragma once

#include <cstddef>
#include <string_view>

namespace tsys::kernels {

struct MinMax {
    double min = 0.0;
    double max = 0.0;
    std::size_t argmin = 0;
    std::size_t argmax = 0;
};

/// One implementation of the grid inner loops. All arrays are dense doubles.
struct Table {
    const char* name;
    double (*dot)(const double* x, const double* y, std::size_t n);
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    MinMax (*minmax)(const double* x, std::size_t n);
    /// out[j] = sum_k c[k] * x[j]^k, coefficients ascending.
    void (*horner)(const double* c, std::size_t ncoef, const double* x, double* out, std::size_t n);
    /// out[j] = sum_i A[i*cols + j] * y[i] for a row-major rows x cols matrix.
    void (*gemv_t)(const double* A, std::size_t rows, std::size_t cols, const double* y, double* out);
};

[[nodiscard]] const Table& scalar_table() noexcept;
/// nullptr when the AVX2 variant is not compiled in or the CPU lacks AVX2/FMA.
[[nodiscard]] const Table* avx2_table() noexcept;

/// Selected once: best supported variant, overridable with TSYS_SIMD=scalar|avx2.
[[nodiscard]] const Table& active() noexcept;

inline double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) { active().axpy(a, x, y, n); }
inline MinMax minmax(const double* x, std::size_t n) { return active().minmax(x, n); }
inline void horner(const double* c, std::size_t ncoef, const double* x, double* out, std::size_t n) {
    active().horner(c, ncoef, x, out, n);
}
inline void gemv_t(const double* A, std::size_t rows, std::size_t cols, const double* y, double* out) {
    active().gemv_t(A, rows, cols, y, out);
}

}  // namespace tsys::kernels
