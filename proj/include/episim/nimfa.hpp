#pragma once

#include <cstddef>

#include "episim/graph.hpp"
#include "episim/model.hpp"

namespace episim {

// Infection pressure s_i = sum_j a_ij x_j.
StateVector infection_pressure(const ContactGraph& g, const StateVector& x);

// Mean-field vector field f_i = beta * s_i * (1 - x_i) - delta * x_i.
StateVector nimfa_drift(const ContactGraph& g, const ModelParams& p,
                        const StateVector& x);

// Fixed-grid classical 4th-order integration of the mean-field system.
// States are clamped into [0,1] only against round-off of at most 1e-12;
// larger excursions raise numerical_error (reduce dt). Saves the state
// every save_every steps plus the final one.
Trajectory integrate_nimfa(const ContactGraph& g, const ModelParams& p,
                           const StateVector& x0, double t_end,
                           double dt = 1e-3, std::size_t save_every = 10);

// Mean-field epidemic threshold 1 / lambda1.
double nimfa_threshold(const SpectralData& s);

struct EquilibriumResult {
    StateVector x;
    bool below_threshold = false; // tau <= 1/lambda1: only the zero state remains
    std::size_t iterations = 0;
    double residual = 0.0;
};

// Maximal fixed point of x_i = beta s_i / (delta + beta s_i), found by
// damped fixed-point iteration (damping 0.7) from the all-ones state.
// Below the threshold this returns the zero vector with a flag instead
// of failing.
EquilibriumResult endemic_equilibrium(const ContactGraph& g, const ModelParams& p,
                                      double tol = 1e-12,
                                      std::size_t max_iter = 200000);

} // namespace episim
