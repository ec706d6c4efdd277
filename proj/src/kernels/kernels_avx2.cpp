#include "variants.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <cmath>
#include <immintrin.h>

// AVX2/FMA variants. Each kernel performs exactly the operation sequence
// of the scalar reference, four lanes at a time, so outputs (and clamp
// counts) are bit-identical. matvec_sym walks column blocks of the
// symmetric matrix: lane r accumulates fma(a[j*n + r], x[j], acc) over
// sequential j, which by symmetry is the same value sequence as the
// scalar row reduction.

namespace episim::kernels {
namespace {

void matvec_sym_avx2(const double* a, std::size_t n, const double* x, double* s)
{
    std::size_t r = 0;
    for (; r + 4 <= n; r += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < n; ++j) {
            const __m256d col = _mm256_loadu_pd(a + j * n + r);
            acc = _mm256_fmadd_pd(col, _mm256_set1_pd(x[j]), acc);
        }
        _mm256_storeu_pd(s + r, acc);
    }
    for (; r < n; ++r) {
        const double* row = a + r * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            acc = std::fma(row[j], x[j], acc);
        s[r] = acc;
    }
}

void sis_drift_avx2(std::size_t n, double beta, double delta,
                    const double* x, const double* s, double* f)
{
    const __m256d vbeta = _mm256_set1_pd(beta);
    const __m256d vdelta = _mm256_set1_pd(delta);
    const __m256d vone = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xi = _mm256_loadu_pd(x + i);
        const __m256d si = _mm256_loadu_pd(s + i);
        const __m256d t0 = _mm256_mul_pd(vbeta, si);
        const __m256d t1 = _mm256_sub_pd(vone, xi);
        const __m256d t2 = _mm256_mul_pd(t0, t1);
        const __m256d t3 = _mm256_mul_pd(vdelta, xi);
        _mm256_storeu_pd(f + i, _mm256_sub_pd(t2, t3));
    }
    for (; i < n; ++i) {
        const double t0 = beta * s[i];
        const double t1 = 1.0 - x[i];
        const double t2 = t0 * t1;
        const double t3 = delta * x[i];
        f[i] = t2 - t3;
    }
}

void diffusion_linear_avx2(std::size_t n, const double* m,
                           const double* x, const double* s, double* g)
{
    const __m256d vone = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xi = _mm256_loadu_pd(x + i);
        const __m256d sig = _mm256_mul_pd(_mm256_loadu_pd(m + i), xi);
        const __m256d t1 = _mm256_sub_pd(vone, xi);
        const __m256d u1 = _mm256_mul_pd(sig, _mm256_loadu_pd(s + i));
        _mm256_storeu_pd(g + i, _mm256_mul_pd(u1, t1));
    }
    for (; i < n; ++i) {
        const double sig = m[i] * x[i];
        const double t1 = 1.0 - x[i];
        const double u1 = sig * s[i];
        g[i] = u1 * t1;
    }
}

void diffusion_logistic_avx2(std::size_t n, const double* m,
                             const double* x, const double* s, double* g)
{
    const __m256d vone = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xi = _mm256_loadu_pd(x + i);
        const __m256d v0 = _mm256_mul_pd(_mm256_loadu_pd(m + i), xi);
        const __m256d t1 = _mm256_sub_pd(vone, xi);
        const __m256d sig = _mm256_mul_pd(v0, t1);
        const __m256d u1 = _mm256_mul_pd(sig, _mm256_loadu_pd(s + i));
        _mm256_storeu_pd(g + i, _mm256_mul_pd(u1, t1));
    }
    for (; i < n; ++i) {
        const double v0 = m[i] * x[i];
        const double t1 = 1.0 - x[i];
        const double sig = v0 * t1;
        const double u1 = sig * s[i];
        g[i] = u1 * t1;
    }
}

EmUpdateStats em_update_avx2(std::size_t n, double dt, const double* x,
                             const double* f, const double* g,
                             const double* dw, double* out)
{
    EmUpdateStats stats;
    const __m256d vdt = _mm256_set1_pd(dt);
    const __m256d vzero = _mm256_setzero_pd();
    const __m256d vone = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d w0 = _mm256_mul_pd(_mm256_loadu_pd(f + i), vdt);
        const __m256d w1 = _mm256_mul_pd(_mm256_loadu_pd(g + i), _mm256_loadu_pd(dw + i));
        __m256d y = _mm256_add_pd(_mm256_add_pd(_mm256_loadu_pd(x + i), w0), w1);

        // y - y is 0 for finite lanes, NaN for Inf/NaN lanes.
        const __m256d d = _mm256_sub_pd(y, y);
        if (_mm256_movemask_pd(_mm256_cmp_pd(d, d, _CMP_ORD_Q)) != 0xF)
            stats.finite = false;

        const __m256d ltz = _mm256_cmp_pd(y, vzero, _CMP_LT_OQ);
        const __m256d gto = _mm256_cmp_pd(y, vone, _CMP_GT_OQ);
        stats.clamps += static_cast<std::uint64_t>(__builtin_popcount(
            static_cast<unsigned>(_mm256_movemask_pd(ltz))));
        stats.clamps += static_cast<std::uint64_t>(__builtin_popcount(
            static_cast<unsigned>(_mm256_movemask_pd(gto))));
        y = _mm256_blendv_pd(y, vzero, ltz);
        y = _mm256_blendv_pd(y, vone, gto);
        _mm256_storeu_pd(out + i, y);
    }
    for (; i < n; ++i) {
        const double w0 = f[i] * dt;
        const double w1 = g[i] * dw[i];
        double y = (x[i] + w0) + w1;
        if (!std::isfinite(y))
            stats.finite = false;
        if (y < 0.0) {
            y = 0.0;
            ++stats.clamps;
        } else if (y > 1.0) {
            y = 1.0;
            ++stats.clamps;
        }
        out[i] = y;
    }
    return stats;
}

} // namespace

const Ops* avx2_variant()
{
    static const Ops ops{
        "avx2",
        matvec_sym_avx2,
        sis_drift_avx2,
        diffusion_linear_avx2,
        diffusion_logistic_avx2,
        em_update_avx2,
    };
    return &ops;
}

} // namespace episim::kernels

#else // non-x86 build

namespace episim::kernels {

const Ops* avx2_variant()
{
    return nullptr;
}

} // namespace episim::kernels

#endif
