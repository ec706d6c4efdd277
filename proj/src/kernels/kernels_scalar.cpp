#include "episim/kernels.hpp"

#include <cmath>

// Reference kernels. These define the arithmetic contract the SIMD
// variants must reproduce bit-for-bit: per-element operation order as
// written here, sequential j inside each row reduction.

namespace episim::kernels {
namespace {

void matvec_sym_scalar(const double* a, std::size_t n, const double* x, double* s)
{
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = a + r * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            acc = std::fma(row[j], x[j], acc);
        s[r] = acc;
    }
}

void sis_drift_scalar(std::size_t n, double beta, double delta,
                      const double* x, const double* s, double* f)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double t0 = beta * s[i];
        const double t1 = 1.0 - x[i];
        const double t2 = t0 * t1;
        const double t3 = delta * x[i];
        f[i] = t2 - t3;
    }
}

void diffusion_linear_scalar(std::size_t n, const double* m,
                             const double* x, const double* s, double* g)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double sig = m[i] * x[i];
        const double t1 = 1.0 - x[i];
        const double u1 = sig * s[i];
        g[i] = u1 * t1;
    }
}

void diffusion_logistic_scalar(std::size_t n, const double* m,
                               const double* x, const double* s, double* g)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double v0 = m[i] * x[i];
        const double t1 = 1.0 - x[i];
        const double sig = v0 * t1;
        const double u1 = sig * s[i];
        g[i] = u1 * t1;
    }
}

EmUpdateStats em_update_scalar(std::size_t n, double dt, const double* x,
                               const double* f, const double* g,
                               const double* dw, double* out)
{
    EmUpdateStats stats;
    for (std::size_t i = 0; i < n; ++i) {
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

const Ops& scalar()
{
    static const Ops ops{
        "scalar",
        matvec_sym_scalar,
        sis_drift_scalar,
        diffusion_linear_scalar,
        diffusion_logistic_scalar,
        em_update_scalar,
    };
    return ops;
}

} // namespace episim::kernels
