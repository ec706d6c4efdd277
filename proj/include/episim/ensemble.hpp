#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "episim/sde.hpp"

namespace episim {

// Aggregate statistics over an ensemble of stochastic paths that share
// one time grid. Per-node quantiles and norm quantiles use the
// nearest-rank rule on the saved grid points.
struct EnsembleStats {
    std::vector<double> times;
    std::vector<StateVector> mean;          // [time][node]
    std::vector<StateVector> q05, q50, q95; // [time][node]
    std::vector<double> norm_mean;          // mean euclidean norm |X(t)|
    std::vector<double> norm_q05, norm_q50, norm_q95;
    std::size_t paths = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t clamp_events = 0;  // summed over member paths
    std::uint64_t steps_per_path = 0;
};

// Runs `paths` independent stochastic paths; path k uses seed
// derive_path_seed(master_seed, k), so results do not depend on the
// worker count (workers = 0 picks the hardware concurrency).
std::vector<SdePath> simulate_paths(const ContactGraph& g, const ModelParams& p,
                                    const StateVector& x0, double t_end,
                                    double dt, std::size_t save_every,
                                    std::size_t paths, std::uint64_t master_seed,
                                    std::size_t workers = 0);

EnsembleStats aggregate(std::span<const SdePath> paths, std::uint64_t master_seed);

EnsembleStats run_ensemble(const ContactGraph& g, const ModelParams& p,
                           const StateVector& x0, double t_end, double dt,
                           std::size_t save_every, std::size_t paths,
                           std::uint64_t master_seed, std::size_t workers = 0);

// First saved time t* such that max_i x_i(t) < tol at every saved grid
// point in [t*, t* + hold]; nullopt when no such time exists within the
// horizon. hold must fit inside the saved horizon.
std::optional<double> extinction_time(const SdePath& path, double tol, double hold);

// Empirical surrogate for the persistence level: the fraction of paths
// whose norm stays at or above chi at every saved grid point of the
// window. 1 - frac estimates the epsilon of the persistence definition.
struct PermanenceEstimate {
    double chi = 0.0;
    double t_a = 0.0;
    double t_b = 0.0;
    double frac = 0.0;
    std::size_t paths = 0;
};

PermanenceEstimate permanence_estimate(std::span<const SdePath> paths, double chi,
                                       double t_a, double t_b);

} // namespace episim
