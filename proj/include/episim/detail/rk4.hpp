#pragma once

#include <cstddef>
#include <vector>

namespace episim::detail {

// Workspace for the classical 4th-order one-step scheme on a vector
// state; reused across steps to avoid per-step allocation.
struct Rk4Workspace {
    std::vector<double> k1, k2, k3, k4, tmp;

    explicit Rk4Workspace(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
};

// One classical RK4 step: y <- y + dt/6 (k1 + 2 k2 + 2 k3 + k4).
// deriv(const double* y, double* dy) evaluates the vector field.
template <class Deriv>
void rk4_step(Deriv&& deriv, std::vector<double>& y, double dt, Rk4Workspace& w)
{
    const std::size_t n = y.size();

    deriv(y.data(), w.k1.data());
    for (std::size_t i = 0; i < n; ++i)
        w.tmp[i] = y[i] + 0.5 * dt * w.k1[i];

    deriv(w.tmp.data(), w.k2.data());
    for (std::size_t i = 0; i < n; ++i)
        w.tmp[i] = y[i] + 0.5 * dt * w.k2[i];

    deriv(w.tmp.data(), w.k3.data());
    for (std::size_t i = 0; i < n; ++i)
        w.tmp[i] = y[i] + dt * w.k3[i];

    deriv(w.tmp.data(), w.k4.data());
    for (std::size_t i = 0; i < n; ++i)
        y[i] += dt / 6.0 * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
}

} // namespace episim::detail
