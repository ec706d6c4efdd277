#include "episim/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>

#include "episim/errors.hpp"
#include "episim/rng.hpp"

namespace episim {
namespace {

double path_norm(const StateVector& x)
{
    double acc = 0.0;
    for (double v : x)
        acc += v * v;
    return std::sqrt(acc);
}

// Nearest-rank quantile of an ascending-sorted sample.
double nearest_rank(const std::vector<double>& sorted, double q)
{
    const auto p = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * p));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

} // namespace

std::vector<SdePath> simulate_paths(const ContactGraph& g, const ModelParams& p,
                                    const StateVector& x0, double t_end,
                                    double dt, std::size_t save_every,
                                    std::size_t paths, std::uint64_t master_seed,
                                    std::size_t workers)
{
    if (paths == 0)
        throw validation_error("path count must be at least 1");
    if (workers == 0)
        workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    workers = std::min(workers, paths);

    std::vector<SdePath> out(paths);
    auto run_one = [&](std::size_t k) {
        out[k] = simulate_sde(g, p, x0, t_end, derive_path_seed(master_seed, k),
                              dt, save_every);
    };

    if (workers == 1) {
        for (std::size_t k = 0; k < paths; ++k)
            run_one(k);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= paths)
                return;
            try {
                run_one(k);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
    return out;
}

EnsembleStats aggregate(std::span<const SdePath> paths, std::uint64_t master_seed)
{
    if (paths.empty())
        throw validation_error("cannot aggregate an empty ensemble");
    const auto& times = paths.front().trajectory.times;
    const std::size_t t_count = times.size();
    const std::size_t n = paths.front().trajectory.states.front().size();
    for (const auto& path : paths)
        if (path.trajectory.times != times)
            throw validation_error("ensemble members must share one time grid");

    EnsembleStats stats;
    stats.times = times;
    stats.paths = paths.size();
    stats.master_seed = master_seed;
    stats.steps_per_path = paths.front().steps;
    for (const auto& path : paths)
        stats.clamp_events += path.clamp_events;

    stats.mean.assign(t_count, StateVector(n, 0.0));
    stats.q05.assign(t_count, StateVector(n, 0.0));
    stats.q50.assign(t_count, StateVector(n, 0.0));
    stats.q95.assign(t_count, StateVector(n, 0.0));
    stats.norm_mean.assign(t_count, 0.0);
    stats.norm_q05.assign(t_count, 0.0);
    stats.norm_q50.assign(t_count, 0.0);
    stats.norm_q95.assign(t_count, 0.0);

    const double np = static_cast<double>(paths.size());
    std::vector<double> column(paths.size());
    for (std::size_t k = 0; k < t_count; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (std::size_t pth = 0; pth < paths.size(); ++pth) {
                const double v = paths[pth].trajectory.states[k][i];
                column[pth] = v;
                sum += v;
            }
            stats.mean[k][i] = sum / np;
            std::sort(column.begin(), column.end());
            stats.q05[k][i] = nearest_rank(column, 0.05);
            stats.q50[k][i] = nearest_rank(column, 0.50);
            stats.q95[k][i] = nearest_rank(column, 0.95);
        }
        double norm_sum = 0.0;
        for (std::size_t pth = 0; pth < paths.size(); ++pth) {
            column[pth] = path_norm(paths[pth].trajectory.states[k]);
            norm_sum += column[pth];
        }
        stats.norm_mean[k] = norm_sum / np;
        std::sort(column.begin(), column.end());
        stats.norm_q05[k] = nearest_rank(column, 0.05);
        stats.norm_q50[k] = nearest_rank(column, 0.50);
        stats.norm_q95[k] = nearest_rank(column, 0.95);
    }
    return stats;
}

EnsembleStats run_ensemble(const ContactGraph& g, const ModelParams& p,
                           const StateVector& x0, double t_end, double dt,
                           std::size_t save_every, std::size_t paths,
                           std::uint64_t master_seed, std::size_t workers)
{
    const auto members =
        simulate_paths(g, p, x0, t_end, dt, save_every, paths, master_seed, workers);
    return aggregate(members, master_seed);
}

std::optional<double> extinction_time(const SdePath& path, double tol, double hold)
{
    if (!(tol > 0.0))
        throw validation_error("extinction tolerance must be positive");
    if (!(hold > 0.0))
        throw validation_error("hold duration must be positive");
    const auto& times = path.trajectory.times;
    const auto& states = path.trajectory.states;
    const double horizon = times.back() - times.front();
    if (hold > horizon)
        throw validation_error("hold duration " + std::to_string(hold) +
                               " exceeds the saved horizon " +
                               std::to_string(horizon));

    const std::size_t t_count = times.size();
    std::vector<char> below(t_count, 0);
    for (std::size_t k = 0; k < t_count; ++k) {
        double mx = 0.0;
        for (double v : states[k])
            mx = std::max(mx, v);
        below[k] = mx < tol;
    }

    // next_bad[k]: first index >= k that violates the tolerance.
    std::vector<std::size_t> next_bad(t_count + 1, t_count);
    for (std::size_t k = t_count; k-- > 0;)
        next_bad[k] = below[k] ? next_bad[k + 1] : k;

    constexpr double eps = 1e-9;
    std::size_t window_end = 0;
    for (std::size_t k = 0; k < t_count; ++k) {
        const double deadline = times[k] + hold;
        if (deadline > times.back() + eps)
            break; // window no longer observable
        if (window_end < k)
            window_end = k;
        while (window_end + 1 < t_count && times[window_end + 1] <= deadline + eps)
            ++window_end;
        if (below[k] && next_bad[k] > window_end)
            return times[k];
    }
    return std::nullopt;
}

PermanenceEstimate permanence_estimate(std::span<const SdePath> paths, double chi,
                                       double t_a, double t_b)
{
    if (paths.empty())
        throw validation_error("permanence estimate needs at least one path");
    if (!(chi > 0.0))
        throw validation_error("persistence level chi must be positive");
    if (!(t_a < t_b))
        throw validation_error("window must satisfy t_a < t_b");

    const auto& times = paths.front().trajectory.times;
    std::vector<std::size_t> window;
    for (std::size_t k = 0; k < times.size(); ++k)
        if (times[k] >= t_a && times[k] <= t_b)
            window.push_back(k);
    if (window.empty())
        throw validation_error("window [" + std::to_string(t_a) + ", " +
                               std::to_string(t_b) +
                               "] contains no saved grid points");

    std::size_t persistent = 0;
    for (const auto& path : paths) {
        if (path.trajectory.times != times)
            throw validation_error("ensemble members must share one time grid");
        bool ok = true;
        for (std::size_t k : window) {
            if (path_norm(path.trajectory.states[k]) < chi) {
                ok = false;
                break;
            }
        }
        persistent += ok;
    }

    PermanenceEstimate est;
    est.chi = chi;
    est.t_a = t_a;
    est.t_b = t_b;
    est.paths = paths.size();
    est.frac = static_cast<double>(persistent) / static_cast<double>(paths.size());
    return est;
}

} // namespace episim
