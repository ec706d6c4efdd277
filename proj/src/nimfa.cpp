#include "episim/nimfa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "episim/detail/rk4.hpp"
#include "episim/errors.hpp"
#include "episim/kernels.hpp"

namespace episim {
namespace {

void require_state_shape(const ContactGraph& g, const StateVector& x)
{
    if (x.size() != g.size())
        throw validation_error("state vector has " + std::to_string(x.size()) +
                               " entries but the graph has " +
                               std::to_string(g.size()) + " nodes");
}

void require_state_range(const StateVector& x)
{
    for (double v : x)
        if (!(v >= 0.0 && v <= 1.0))
            throw validation_error("initial state entries must lie in [0, 1]");
}

std::size_t step_count(double t_end, double dt)
{
    if (!(dt > 0.0))
        throw validation_error("time step dt must be positive");
    if (!(t_end >= dt))
        throw validation_error("t_end must be at least one time step");
    return static_cast<std::size_t>(std::llround(t_end / dt));
}

} // namespace

StateVector infection_pressure(const ContactGraph& g, const StateVector& x)
{
    require_state_shape(g, x);
    StateVector s(g.size());
    kernels::active().matvec_sym(g.adjacency().data(), g.size(), x.data(), s.data());
    return s;
}

StateVector nimfa_drift(const ContactGraph& g, const ModelParams& p,
                        const StateVector& x)
{
    require_state_shape(g, x);
    const auto& ops = kernels::active();
    const std::size_t n = g.size();
    StateVector s(n), f(n);
    ops.matvec_sym(g.adjacency().data(), n, x.data(), s.data());
    ops.sis_drift(n, p.beta, p.delta, x.data(), s.data(), f.data());
    return f;
}

Trajectory integrate_nimfa(const ContactGraph& g, const ModelParams& p,
                           const StateVector& x0, double t_end, double dt,
                           std::size_t save_every)
{
    require_state_shape(g, x0);
    require_state_range(x0);
    if (save_every == 0)
        throw validation_error("save_every must be at least 1");
    const std::size_t steps = step_count(t_end, dt);

    const auto& ops = kernels::active();
    const std::size_t n = g.size();
    const double* a = g.adjacency().data();
    std::vector<double> s(n);

    auto deriv = [&](const double* y, double* dy) {
        ops.matvec_sym(a, n, y, s.data());
        ops.sis_drift(n, p.beta, p.delta, y, s.data(), dy);
    };

    Trajectory traj;
    traj.scheme = "rk4";
    traj.dt = dt;
    traj.times.reserve(steps / save_every + 2);
    traj.states.reserve(steps / save_every + 2);

    StateVector x = x0;
    detail::Rk4Workspace work(n);

    traj.times.push_back(0.0);
    traj.states.push_back(x);

    constexpr double roundoff = 1e-12;
    for (std::size_t k = 1; k <= steps; ++k) {
        detail::rk4_step(deriv, x, dt, work);
        for (double& v : x) {
            if (!(v >= -roundoff && v <= 1.0 + roundoff)) {
                std::ostringstream msg;
                msg << "state left [0,1] by more than " << roundoff << " at t="
                    << static_cast<double>(k) * dt << "; reduce dt (currently "
                    << dt << ")";
                throw numerical_error(msg.str());
            }
            v = std::clamp(v, 0.0, 1.0);
        }
        if (k % save_every == 0 || k == steps) {
            traj.times.push_back(static_cast<double>(k) * dt);
            traj.states.push_back(x);
        }
    }
    return traj;
}

double nimfa_threshold(const SpectralData& s)
{
    if (!(s.lambda1 > 0.0))
        throw validation_error(
            "epidemic threshold is undefined: spectral radius is zero");
    return 1.0 / s.lambda1;
}

EquilibriumResult endemic_equilibrium(const ContactGraph& g, const ModelParams& p,
                                      double tol, std::size_t max_iter)
{
    if (!(tol > 0.0))
        throw validation_error("tolerance must be positive");
    const std::size_t n = g.size();

    const SpectralData& spec = g.spectral();
    EquilibriumResult result;
    if (spec.lambda1 <= 0.0 || p.tau() <= 1.0 / spec.lambda1) {
        result.x.assign(n, 0.0);
        result.below_threshold = true;
        return result;
    }

    // Damped iteration of the monotone map T(x)_i = beta s_i / (delta +
    // beta s_i); starting from all-ones converges from above to the
    // maximal equilibrium.
    constexpr double damping = 0.7;
    const auto& ops = kernels::active();
    StateVector x(n, 1.0), s(n);
    for (std::size_t it = 1; it <= max_iter; ++it) {
        ops.matvec_sym(g.adjacency().data(), n, x.data(), s.data());
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double target = p.beta * s[i] / (p.delta + p.beta * s[i]);
            const double next = x[i] + damping * (target - x[i]);
            diff = std::max(diff, std::abs(next - x[i]));
            x[i] = next;
        }
        if (diff <= tol) {
            result.x = std::move(x);
            result.iterations = it;
            result.residual = diff;
            return result;
        }
    }
    throw numerical_error("endemic-equilibrium iteration did not converge within " +
                          std::to_string(max_iter) + " iterations");
}

} // namespace episim
