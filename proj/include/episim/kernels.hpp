#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace episim::kernels {

// Result of one Euler-Maruyama state update.
struct EmUpdateStats {
    std::uint64_t clamps = 0; // components clamped back into [0,1]
    bool finite = true;       // false if any pre-clamp value was NaN/Inf
};

// Hot inner-loop kernels. Every entry has a scalar reference
// implementation and may have SIMD variants; all variants of a kernel
// produce bit-identical outputs for identical inputs. The SIMD matvec
// relies on the matrix being symmetric (it walks columns as rows), which
// ContactGraph guarantees.
//
// The arithmetic is pinned: fixed evaluation order, fused multiply-add
// only inside matvec_sym (std::fma in the scalar kernel, vfmadd in the
// AVX2 one), and the whole project builds with -ffp-contract=off so the
// compiler cannot introduce contractions of its own.
struct Ops {
    std::string_view name;

    // s = A x for a dense row-major symmetric n-by-n matrix a.
    void (*matvec_sym)(const double* a, std::size_t n, const double* x, double* s);

    // f_i = beta * s_i * (1 - x_i) - delta * x_i
    void (*sis_drift)(std::size_t n, double beta, double delta,
                      const double* x, const double* s, double* f);

    // g_i = (m_i * x_i) * s_i * (1 - x_i)
    void (*diffusion_linear)(std::size_t n, const double* m,
                             const double* x, const double* s, double* g);

    // g_i = (m_i * x_i * (1 - x_i)) * s_i * (1 - x_i)
    void (*diffusion_logistic)(std::size_t n, const double* m,
                               const double* x, const double* s, double* g);

    // out_i = clamp(x_i + f_i * dt + g_i * dw_i, 0, 1), counting clamps.
    // dw carries increments with variance dt (already scaled).
    EmUpdateStats (*em_update)(std::size_t n, double dt, const double* x,
                               const double* f, const double* g,
                               const double* dw, double* out);
};

// Scalar reference kernels; always available.
const Ops& scalar();

// Kernels selected for this process: the best variant the CPU supports,
// unless overridden by EPISIM_KERNELS=scalar|avx2 or set_active().
const Ops& active();

// Variants usable on this CPU (scalar first).
std::vector<const Ops*> available();

// Force a variant by name; returns false if unknown or unsupported here.
bool set_active(std::string_view name);

} // namespace episim::kernels
