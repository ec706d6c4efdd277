#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "episim/graph.hpp"
#include "episim/model.hpp"

namespace episim {

// Exact SIS state: one {0,1} indicator per node.
struct BinaryState {
    std::vector<std::uint8_t> infected;
};

enum class EventKind { infect, recover };

struct SisEvent {
    double time = 0.0;
    std::size_t node = 0;
    EventKind kind = EventKind::infect;
};

// Per-node marginal infection probabilities on a time grid, with 95%
// normal-approximation confidence half-widths (zero for forward-equation
// results, which are deterministic).
struct MarginalCurve {
    std::vector<double> times;
    std::vector<StateVector> probs;
    std::vector<StateVector> ci_halfwidth;
};

// Event-driven (direct-method) simulation of the exact chain: recovery
// at rate delta per infected node, infection at rate beta per
// susceptible-infected edge. The all-susceptible state is absorbing.
std::vector<SisEvent> gillespie_path(const ContactGraph& g, const ModelParams& p,
                                     const BinaryState& x0, double t_end,
                                     std::uint64_t seed);

// Monte Carlo estimate of E[X_i(t)] over independent event-driven paths
// sampled on the caller's grid (states held constant between events).
MarginalCurve exact_marginals_mc(const ContactGraph& g, const ModelParams& p,
                                 const BinaryState& x0,
                                 const std::vector<double>& times,
                                 std::size_t paths, std::uint64_t seed);

// Forward Kolmogorov equations of the full 2^N-state chain (bitmask
// state indexing, node i <-> bit i), integrated with the classical
// 4th-order scheme and marginalized per node. Hard limit N <= 12.
MarginalCurve exact_marginals_ode(const ContactGraph& g, const ModelParams& p,
                                  const BinaryState& x0,
                                  const std::vector<double>& times);

struct BoundReport {
    double min_gap = 0.0; // min over (i, t) of x_i^meanfield(t) - P(X_i(t)=1)
    std::size_t node = 0;
    double time = 0.0;
};

// Integrates the mean-field system and the exact forward equations on
// the same grid from the same binary initial condition and reports the
// worst-case gap; a nonnegative result (up to integrator tolerance)
// confirms that the mean-field curve dominates the exact marginals.
BoundReport nimfa_bound_report(const ContactGraph& g, const ModelParams& p,
                               const BinaryState& x0,
                               const std::vector<double>& times);

} // namespace episim
