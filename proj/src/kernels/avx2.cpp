// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace subdiff::kernels {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
        a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
        a2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), a2);
        a3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), a3);
    }
    for (; i + 4 <= n; i += 4)
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    double s = hsum(_mm256_add_pd(_mm256_add_pd(a0, a1), _mm256_add_pd(a2, a3)));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(y + i + 4,
                         _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
    }
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void jacobi_update_avx2(double omega, const double* inv_diag, const double* rhs,
                        const double* bx, double* x, std::size_t n) {
    const __m256d vw = _mm256_set1_pd(omega);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_sub_pd(_mm256_loadu_pd(rhs + i), _mm256_loadu_pd(bx + i));
        const __m256d s = _mm256_mul_pd(vw, _mm256_loadu_pd(inv_diag + i));
        _mm256_storeu_pd(x + i, _mm256_fmadd_pd(s, r, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) x[i] += omega * inv_diag[i] * (rhs[i] - bx[i]);
}

// Four outputs, eight lanes of d, all k: eight independent accumulators.
inline void conv_4x8(const double* const* hist, std::size_t nhist, const double* wbase,
                     double* const* out, std::size_t d) {
    __m256d a00 = _mm256_loadu_pd(out[0] + d), a01 = _mm256_loadu_pd(out[0] + d + 4);
    __m256d a10 = _mm256_loadu_pd(out[1] + d), a11 = _mm256_loadu_pd(out[1] + d + 4);
    __m256d a20 = _mm256_loadu_pd(out[2] + d), a21 = _mm256_loadu_pd(out[2] + d + 4);
    __m256d a30 = _mm256_loadu_pd(out[3] + d), a31 = _mm256_loadu_pd(out[3] + d + 4);
    for (std::size_t k = 0; k < nhist; ++k) {
        const double* h = hist[k] + d;
        const __m256d h0 = _mm256_loadu_pd(h);
        const __m256d h1 = _mm256_loadu_pd(h + 4);
        const double* c = wbase - k;  // c[i] = w[lag0 + i + nhist - 1 - k]
        __m256d c0 = _mm256_broadcast_sd(c);
        a00 = _mm256_fmadd_pd(c0, h0, a00);
        a01 = _mm256_fmadd_pd(c0, h1, a01);
        c0 = _mm256_broadcast_sd(c + 1);
        a10 = _mm256_fmadd_pd(c0, h0, a10);
        a11 = _mm256_fmadd_pd(c0, h1, a11);
        c0 = _mm256_broadcast_sd(c + 2);
        a20 = _mm256_fmadd_pd(c0, h0, a20);
        a21 = _mm256_fmadd_pd(c0, h1, a21);
        c0 = _mm256_broadcast_sd(c + 3);
        a30 = _mm256_fmadd_pd(c0, h0, a30);
        a31 = _mm256_fmadd_pd(c0, h1, a31);
    }
    _mm256_storeu_pd(out[0] + d, a00), _mm256_storeu_pd(out[0] + d + 4, a01);
    _mm256_storeu_pd(out[1] + d, a10), _mm256_storeu_pd(out[1] + d + 4, a11);
    _mm256_storeu_pd(out[2] + d, a20), _mm256_storeu_pd(out[2] + d + 4, a21);
    _mm256_storeu_pd(out[3] + d, a30), _mm256_storeu_pd(out[3] + d + 4, a31);
}

inline void conv_1x8(const double* const* hist, std::size_t nhist, const double* wbase,
                     double* o, std::size_t d) {
    __m256d a0 = _mm256_loadu_pd(o + d), a1 = _mm256_loadu_pd(o + d + 4);
    for (std::size_t k = 0; k < nhist; ++k) {
        const double* h = hist[k] + d;
        const __m256d c = _mm256_broadcast_sd(wbase - k);
        a0 = _mm256_fmadd_pd(c, _mm256_loadu_pd(h), a0);
        a1 = _mm256_fmadd_pd(c, _mm256_loadu_pd(h + 4), a1);
    }
    _mm256_storeu_pd(o + d, a0);
    _mm256_storeu_pd(o + d + 4, a1);
}

void conv_block_avx2(const double* const* hist, std::size_t nhist, const double* w,
                     std::size_t lag0, double* const* out, std::size_t nout, std::size_t dim) {
    if (nhist == 0 || nout == 0) return;
    const std::size_t dvec = dim - dim % 8;
    const double* wtop = w + lag0 + nhist - 1;
    std::size_t i = 0;
    for (; i + 4 <= nout; i += 4)
        for (std::size_t d = 0; d < dvec; d += 8) conv_4x8(hist, nhist, wtop + i, out + i, d);
    for (; i < nout; ++i)
        for (std::size_t d = 0; d < dvec; d += 8) conv_1x8(hist, nhist, wtop + i, out[i], d);
    if (dvec == dim) return;
    for (std::size_t j = 0; j < nout; ++j) {
        double* o = out[j];
        for (std::size_t k = 0; k < nhist; ++k) {
            const double c = *(wtop + j - k);
            const double* h = hist[k];
            for (std::size_t d = dvec; d < dim; ++d) o[d] += c * h[d];
        }
    }
}

}  // namespace

namespace detail {

const KernelSet& avx2_set() noexcept {
    static const KernelSet set{"avx2", dot_avx2, axpy_avx2, jacobi_update_avx2, conv_block_avx2};
    return set;
}

}  // namespace detail
}  // namespace subdiff::kernels
