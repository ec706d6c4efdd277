#include "episim/sde.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "episim/errors.hpp"
#include "episim/kernels.hpp"
#include "episim/rng.hpp"

namespace episim {
namespace {

void require_state_shape(const ContactGraph& g, const StateVector& x,
                         const char* what)
{
    if (x.size() != g.size())
        throw validation_error(std::string(what) + " has " +
                               std::to_string(x.size()) + " entries but the graph has " +
                               std::to_string(g.size()) + " nodes");
}

// Per-node noise levels as a dense array (NoiseSpec may carry a single
// shared level).
std::vector<double> expand_levels(const ContactGraph& g, const NoiseSpec& noise)
{
    const std::size_t n = g.size();
    if (noise.levels.size() != 1 && noise.levels.size() != n)
        throw validation_error("noise levels must have 1 or " + std::to_string(n) +
                               " entries, got " + std::to_string(noise.levels.size()));
    if (noise.levels.size() == n)
        return noise.levels;
    return std::vector<double>(n, noise.levels.front());
}

void apply_diffusion(const kernels::Ops& ops, const NoiseSpec& noise,
                     std::size_t n, const double* m, const double* x,
                     const double* s, double* g)
{
    if (noise.model == NoiseSpec::Model::linear)
        ops.diffusion_linear(n, m, x, s, g);
    else
        ops.diffusion_logistic(n, m, x, s, g);
}

} // namespace

StateVector diffusion(const ContactGraph& g, const NoiseSpec& noise,
                      const StateVector& x)
{
    require_state_shape(g, x, "state vector");
    const auto levels = expand_levels(g, noise);
    const auto& ops = kernels::active();
    const std::size_t n = g.size();
    StateVector s(n), out(n);
    ops.matvec_sym(g.adjacency().data(), n, x.data(), s.data());
    apply_diffusion(ops, noise, n, levels.data(), x.data(), s.data(), out.data());
    return out;
}

EmStepResult em_step(const ContactGraph& g, const ModelParams& p,
                     const StateVector& x, double dt, const StateVector& dw)
{
    require_state_shape(g, x, "state vector");
    require_state_shape(g, dw, "increment vector");
    if (!(dt > 0.0))
        throw validation_error("time step dt must be positive");

    const auto levels = expand_levels(g, p.noise);
    const auto& ops = kernels::active();
    const std::size_t n = g.size();
    StateVector s(n), f(n), gd(n);
    EmStepResult result;
    result.x.resize(n);

    ops.matvec_sym(g.adjacency().data(), n, x.data(), s.data());
    ops.sis_drift(n, p.beta, p.delta, x.data(), s.data(), f.data());
    apply_diffusion(ops, p.noise, n, levels.data(), x.data(), s.data(), gd.data());
    const auto stats = ops.em_update(n, dt, x.data(), f.data(), gd.data(),
                                     dw.data(), result.x.data());
    if (!stats.finite)
        throw numerical_error("non-finite state increment in Euler-Maruyama step");
    result.clamps = stats.clamps;
    return result;
}

SdePath simulate_sde(const ContactGraph& g, const ModelParams& p,
                     const StateVector& x0, double t_end, std::uint64_t seed,
                     double dt, std::size_t save_every)
{
    require_state_shape(g, x0, "initial state");
    for (double v : x0)
        if (!(v >= 0.0 && v <= 1.0))
            throw validation_error("initial state entries must lie in [0, 1]");
    if (!(dt > 0.0))
        throw validation_error("time step dt must be positive");
    if (!(t_end >= dt))
        throw validation_error("t_end must be at least one time step");
    if (save_every == 0)
        throw validation_error("save_every must be at least 1");

    const std::size_t steps = static_cast<std::size_t>(std::llround(t_end / dt));
    const std::size_t n = g.size();
    const auto levels = expand_levels(g, p.noise);
    const auto& ops = kernels::active();
    const double* a = g.adjacency().data();
    const double sqrt_dt = std::sqrt(dt);

    GaussianStream gauss(seed);
    std::vector<double> s(n), f(n), gd(n), dw(n), next(n);
    StateVector x = x0;

    SdePath path;
    path.seed = seed;
    path.dt = dt;
    path.steps = steps;
    path.trajectory.scheme = "euler-maruyama";
    path.trajectory.dt = dt;
    path.trajectory.seed = seed;
    path.trajectory.times.reserve(steps / save_every + 2);
    path.trajectory.states.reserve(steps / save_every + 2);
    path.trajectory.times.push_back(0.0);
    path.trajectory.states.push_back(x);

    for (std::size_t k = 1; k <= steps; ++k) {
        for (std::size_t i = 0; i < n; ++i)
            dw[i] = sqrt_dt * gauss.next();
        ops.matvec_sym(a, n, x.data(), s.data());
        ops.sis_drift(n, p.beta, p.delta, x.data(), s.data(), f.data());
        apply_diffusion(ops, p.noise, n, levels.data(), x.data(), s.data(), gd.data());
        const auto stats =
            ops.em_update(n, dt, x.data(), f.data(), gd.data(), dw.data(), next.data());
        if (!stats.finite)
            throw numerical_error("non-finite state increment at t=" +
                                  std::to_string(static_cast<double>(k) * dt));
        path.clamp_events += stats.clamps;
        x.swap(next);
        if (k % save_every == 0 || k == steps) {
            path.trajectory.times.push_back(static_cast<double>(k) * dt);
            path.trajectory.states.push_back(x);
        }
    }
    return path;
}

double lyapunov_drift_constant(const ModelParams& p, const SpectralData& s)
{
    const double m2 = p.noise.cap * p.noise.cap;
    return 2.0 * p.beta * s.lambda1 - 2.0 * p.delta +
           m2 * (s.lambda1 * s.lambda1) / 16.0;
}

GeneratorCheckReport empirical_generator_check(const ContactGraph& g,
                                               const ModelParams& p,
                                               std::size_t samples,
                                               std::uint64_t seed)
{
    if (samples == 0)
        throw validation_error("sample count must be at least 1");

    const std::size_t n = g.size();
    const auto& ops = kernels::active();
    const SpectralData& spec = g.spectral();
    const double c = lyapunov_drift_constant(p, spec);

    std::mt19937_64 eng(seed);
    std::vector<double> x(n), s(n);

    GeneratorCheckReport report;
    report.samples = samples;
    report.drift_c = c;
    report.max_violation = -std::numeric_limits<double>::infinity();

    for (std::size_t k = 0; k < samples; ++k) {
        for (std::size_t i = 0; i < n; ++i)
            x[i] = uniform01(eng);
        ops.matvec_sym(g.adjacency().data(), n, x.data(), s.data());

        double norm2 = 0.0, cross = 0.0, cross2 = 0.0, noise_term = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            norm2 += x[i] * x[i];
            cross += x[i] * s[i];
            cross2 += x[i] * x[i] * s[i];
            const double sig = p.noise.sigma(i, x[i]);
            const double gi = sig * (1.0 - x[i]) * s[i];
            noise_term += gi * gi;
        }
        const double lv = 2.0 * p.beta * cross - 2.0 * p.delta * norm2 -
                          2.0 * p.beta * cross2 + noise_term;
        report.max_violation = std::max(report.max_violation, lv - c * norm2);
    }
    return report;
}

} // namespace episim
