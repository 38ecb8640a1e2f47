#include <immintrin.h>

#include "tsys/kernels.hpp"

namespace tsys::kernels {

namespace {

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

// Lane-wise running extrema with index tracking; ties resolve to the lowest index
// so the result matches the scalar sweep exactly.
MinMax minmax_avx2(const double* x, std::size_t n) {
    MinMax r;
    if (n == 0) return r;
    if (n < 8) {
        r.min = r.max = x[0];
        for (std::size_t i = 1; i < n; ++i) {
            if (x[i] < r.min) { r.min = x[i]; r.argmin = i; }
            if (x[i] > r.max) { r.max = x[i]; r.argmax = i; }
        }
        return r;
    }
    __m256d vmin = _mm256_loadu_pd(x);
    __m256d vmax = vmin;
    __m256d imin = _mm256_setr_pd(0, 1, 2, 3);
    __m256d imax = imin;
    __m256d idx = imin;
    const __m256d four = _mm256_set1_pd(4.0);
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) {
        idx = _mm256_add_pd(idx, four);
        const __m256d v = _mm256_loadu_pd(x + i);
        const __m256d lt = _mm256_cmp_pd(v, vmin, _CMP_LT_OQ);
        const __m256d gt = _mm256_cmp_pd(v, vmax, _CMP_GT_OQ);
        vmin = _mm256_blendv_pd(vmin, v, lt);
        imin = _mm256_blendv_pd(imin, idx, lt);
        vmax = _mm256_blendv_pd(vmax, v, gt);
        imax = _mm256_blendv_pd(imax, idx, gt);
    }
    alignas(32) double mn[4], mx[4], jn[4], jx[4];
    _mm256_store_pd(mn, vmin);
    _mm256_store_pd(mx, vmax);
    _mm256_store_pd(jn, imin);
    _mm256_store_pd(jx, imax);
    r.min = mn[0];
    r.argmin = static_cast<std::size_t>(jn[0]);
    r.max = mx[0];
    r.argmax = static_cast<std::size_t>(jx[0]);
    for (int l = 1; l < 4; ++l) {
        const auto jl = static_cast<std::size_t>(jn[l]);
        if (mn[l] < r.min || (mn[l] == r.min && jl < r.argmin)) { r.min = mn[l]; r.argmin = jl; }
        const auto kl = static_cast<std::size_t>(jx[l]);
        if (mx[l] > r.max || (mx[l] == r.max && kl < r.argmax)) { r.max = mx[l]; r.argmax = kl; }
    }
    for (; i < n; ++i) {
        if (x[i] < r.min) { r.min = x[i]; r.argmin = i; }
        if (x[i] > r.max) { r.max = x[i]; r.argmax = i; }
    }
    return r;
}

void horner_avx2(const double* c, std::size_t ncoef, const double* x, double* out, std::size_t n) {
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d vx = _mm256_loadu_pd(x + j);
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t k = ncoef; k-- > 0;) acc = _mm256_fmadd_pd(acc, vx, _mm256_set1_pd(c[k]));
        _mm256_storeu_pd(out + j, acc);
    }
    for (; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = ncoef; k-- > 0;) acc = acc * x[j] + c[k];
        out[j] = acc;
    }
}

void gemv_t_avx2(const double* A, std::size_t rows, std::size_t cols, const double* y, double* out) {
    for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
    for (std::size_t i = 0; i < rows; ++i) axpy_avx2(y[i], A + i * cols, out, cols);
}

}  // namespace

const Table& avx2_table_impl() noexcept {
    static const Table t{"avx2", dot_avx2, axpy_avx2, minmax_avx2, horner_avx2, gemv_t_avx2};
    return t;
}

}  // namespace tsys::kernels
