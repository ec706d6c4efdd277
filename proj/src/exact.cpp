#include "episim/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "episim/detail/rk4.hpp"
#include "episim/errors.hpp"
#include "episim/kernels.hpp"
#include "episim/rng.hpp"

namespace episim {
namespace {

constexpr std::size_t max_ode_nodes = 12;

void require_binary_state(const ContactGraph& g, const BinaryState& x0)
{
    if (x0.infected.size() != g.size())
        throw validation_error("binary state has " +
                               std::to_string(x0.infected.size()) +
                               " entries but the graph has " +
                               std::to_string(g.size()) + " nodes");
    for (auto v : x0.infected)
        if (v != 0 && v != 1)
            throw validation_error("binary state entries must be 0 or 1");
}

void require_time_grid(const std::vector<double>& times)
{
    if (times.empty())
        throw validation_error("time grid must not be empty");
    if (!(times.front() >= 0.0))
        throw validation_error("time grid must start at t >= 0");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw validation_error("time grid must be strictly increasing");
}

// Mutable chain state for the event-driven simulation. Rate updates
// touch only the flipped node's neighborhood.
struct ChainState {
    const ContactGraph* g;
    std::vector<std::uint8_t> infected;
    std::vector<std::size_t> inf_nbrs; // infected-neighbor count per node
    std::size_t infected_count = 0;
    std::size_t si_pairs = 0; // susceptible nodes' infected-neighbor total

    ChainState(const ContactGraph& graph, const BinaryState& x0)
        : g(&graph), infected(x0.infected), inf_nbrs(graph.size(), 0)
    {
        const std::size_t n = graph.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (!infected[i])
                continue;
            ++infected_count;
            for (std::size_t j = 0; j < n; ++j)
                if (graph.at(i, j) != 0.0)
                    ++inf_nbrs[j];
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!infected[i])
                si_pairs += inf_nbrs[i];
    }

    double total_rate(double beta, double delta) const
    {
        return delta * static_cast<double>(infected_count) +
               beta * static_cast<double>(si_pairs);
    }

    void flip(std::size_t v)
    {
        const std::size_t n = g->size();
        const bool becoming_infected = !infected[v];
        if (becoming_infected) {
            si_pairs -= inf_nbrs[v];
            ++infected_count;
        } else {
            --infected_count;
        }
        infected[v] = becoming_infected ? 1 : 0;
        const int delta_nbr = becoming_infected ? 1 : -1;
        for (std::size_t u = 0; u < n; ++u) {
            if (g->at(v, u) == 0.0)
                continue;
            inf_nbrs[u] = static_cast<std::size_t>(
                static_cast<long long>(inf_nbrs[u]) + delta_nbr);
            if (!infected[u])
                si_pairs = static_cast<std::size_t>(
                    static_cast<long long>(si_pairs) + delta_nbr);
        }
        if (!becoming_infected)
            si_pairs += inf_nbrs[v];
    }
};

// Runs the chain until t_end. The callback fires before the flip is
// applied, so it observes the state that held on [previous event, t).
template <class OnEvent>
void run_chain(ChainState& chain, const ModelParams& p, double t_end,
               std::mt19937_64& eng, OnEvent&& on_event)
{
    const std::size_t n = chain.g->size();
    double t = 0.0;
    for (;;) {
        const double rate = chain.total_rate(p.beta, p.delta);
        if (rate <= 0.0)
            return; // absorbed
        const double u = uniform01(eng);
        t += -std::log1p(-u) / rate;
        if (t > t_end)
            return;

        // Direct method: walk node rates cumulatively.
        double r = uniform01(eng) * rate;
        std::size_t node = n;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = chain.infected[i]
                                 ? p.delta
                                 : p.beta * static_cast<double>(chain.inf_nbrs[i]);
            if (r < w) {
                node = i;
                break;
            }
            r -= w;
        }
        if (node == n) { // round-off spill: take the last active node
            for (std::size_t i = n; i-- > 0;) {
                if (chain.infected[i] || chain.inf_nbrs[i] > 0) {
                    node = i;
                    break;
                }
            }
        }
        const EventKind kind = chain.infected[node] ? EventKind::recover
                                                    : EventKind::infect;
        on_event(t, node, kind);
        chain.flip(node);
    }
}

} // namespace

std::vector<SisEvent> gillespie_path(const ContactGraph& g, const ModelParams& p,
                                     const BinaryState& x0, double t_end,
                                     std::uint64_t seed)
{
    require_binary_state(g, x0);
    if (!(t_end > 0.0))
        throw validation_error("t_end must be positive");

    std::vector<SisEvent> events;
    ChainState chain(g, x0);
    std::mt19937_64 eng(seed);
    run_chain(chain, p, t_end, eng, [&](double t, std::size_t node, EventKind kind) {
        events.push_back({t, node, kind});
    });
    return events;
}

MarginalCurve exact_marginals_mc(const ContactGraph& g, const ModelParams& p,
                                 const BinaryState& x0,
                                 const std::vector<double>& times,
                                 std::size_t paths, std::uint64_t seed)
{
    require_binary_state(g, x0);
    require_time_grid(times);
    if (paths == 0)
        throw validation_error("path count must be at least 1");

    const std::size_t n = g.size();
    const std::size_t t_count = times.size();
    const double t_end = times.back();
    std::vector<std::vector<std::size_t>> hits(t_count,
                                               std::vector<std::size_t>(n, 0));

    for (std::size_t path = 0; path < paths; ++path) {
        ChainState chain(g, x0);
        std::mt19937_64 eng(derive_path_seed(seed, path));
        std::size_t next_grid = 0;
        auto record_until = [&](double t) {
            // The state is piecewise constant; sample it at every grid
            // time strictly before t.
            while (next_grid < t_count && times[next_grid] < t) {
                for (std::size_t i = 0; i < n; ++i)
                    hits[next_grid][i] += chain.infected[i];
                ++next_grid;
            }
        };
        run_chain(chain, p, t_end, eng,
                  [&](double t, std::size_t, EventKind) { record_until(t); });
        record_until(std::numeric_limits<double>::infinity());
    }

    MarginalCurve curve;
    curve.times = times;
    curve.probs.assign(t_count, StateVector(n, 0.0));
    curve.ci_halfwidth.assign(t_count, StateVector(n, 0.0));
    const double np = static_cast<double>(paths);
    for (std::size_t k = 0; k < t_count; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const double phat = static_cast<double>(hits[k][i]) / np;
            curve.probs[k][i] = phat;
            curve.ci_halfwidth[k][i] = 1.96 * std::sqrt(phat * (1.0 - phat) / np);
        }
    }
    return curve;
}

namespace {

// Outgoing transitions of the 2^N-state chain, grouped by source state.
struct Generator {
    std::size_t states = 0;
    std::vector<std::size_t> offset; // states + 1
    std::vector<std::uint32_t> target;
    std::vector<double> rate;
    std::vector<double> out_rate; // total outflow per state
    double max_rate = 0.0;

    Generator(const ContactGraph& g, const ModelParams& p)
    {
        const std::size_t n = g.size();
        states = std::size_t{1} << n;

        std::vector<std::uint32_t> nbr_mask(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (g.at(i, j) != 0.0)
                    nbr_mask[i] |= std::uint32_t{1} << j;

        offset.assign(states + 1, 0);
        out_rate.assign(states, 0.0);
        target.reserve(states * n / 2);
        rate.reserve(states * n / 2);
        for (std::uint32_t s = 0; s < states; ++s) {
            offset[s] = target.size();
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::uint32_t bit = std::uint32_t{1} << i;
                if (s & bit) {
                    target.push_back(s ^ bit);
                    rate.push_back(p.delta);
                    total += p.delta;
                } else {
                    const int cnt = std::popcount(s & nbr_mask[i]);
                    if (cnt > 0) {
                        const double r = p.beta * static_cast<double>(cnt);
                        target.push_back(s | bit);
                        rate.push_back(r);
                        total += r;
                    }
                }
            }
            out_rate[s] = total;
            max_rate = std::max(max_rate, total);
        }
        offset[states] = target.size();
    }

    // dp = Q^T prob: outflow from each state, inflow along transitions.
    void apply(const double* prob, double* dp) const
    {
        for (std::size_t s = 0; s < states; ++s)
            dp[s] = -out_rate[s] * prob[s];
        for (std::size_t s = 0; s < states; ++s) {
            const double ps = prob[s];
            if (ps == 0.0)
                continue;
            for (std::size_t k = offset[s]; k < offset[s + 1]; ++k)
                dp[target[k]] += rate[k] * ps;
        }
    }
};

void renormalize_mass(std::vector<double>& prob, double t)
{
    double mass = 0.0;
    for (double& v : prob) {
        if (v < 0.0) {
            if (v < -1e-12)
                throw numerical_error(
                    "forward-equation probability went negative at t=" +
                    std::to_string(t));
            v = 0.0;
        }
        mass += v;
    }
    if (std::abs(mass - 1.0) > 1e-8)
        throw numerical_error("forward-equation probability mass drifted to " +
                              std::to_string(mass) + " at t=" + std::to_string(t));
    if (std::abs(mass - 1.0) > 1e-12)
        for (double& v : prob)
            v /= mass;
}

std::uint32_t state_index(const BinaryState& x0)
{
    std::uint32_t idx = 0;
    for (std::size_t i = 0; i < x0.infected.size(); ++i)
        if (x0.infected[i])
            idx |= std::uint32_t{1} << i;
    return idx;
}

} // namespace

MarginalCurve exact_marginals_ode(const ContactGraph& g, const ModelParams& p,
                                  const BinaryState& x0,
                                  const std::vector<double>& times)
{
    require_binary_state(g, x0);
    require_time_grid(times);
    if (g.size() > max_ode_nodes)
        throw validation_error("forward equations are limited to " +
                               std::to_string(max_ode_nodes) + " nodes (got " +
                               std::to_string(g.size()) + ")");

    const std::size_t n = g.size();
    const Generator gen(g, p);

    std::vector<double> prob(gen.states, 0.0);
    prob[state_index(x0)] = 1.0;

    auto deriv = [&](const double* y, double* dy) { gen.apply(y, dy); };
    detail::Rk4Workspace work(gen.states);

    // Substep cap keeps the scheme well inside its stability region and
    // the per-step truncation error below the mass-drift guard.
    const double h_max =
        gen.max_rate > 0.0 ? std::min(0.01, 0.01 / gen.max_rate) : 0.01;

    MarginalCurve curve;
    curve.times = times;
    curve.probs.assign(times.size(), StateVector(n, 0.0));
    curve.ci_halfwidth.assign(times.size(), StateVector(n, 0.0));

    auto marginalize = [&](std::size_t k) {
        for (std::uint32_t s = 0; s < gen.states; ++s) {
            const double ps = prob[s];
            if (ps == 0.0)
                continue;
            for (std::size_t i = 0; i < n; ++i)
                if (s & (std::uint32_t{1} << i))
                    curve.probs[k][i] += ps;
        }
    };

    double t = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double span = times[k] - t;
        if (span > 0.0) {
            const auto sub = static_cast<std::size_t>(std::ceil(span / h_max));
            const double h = span / static_cast<double>(sub);
            for (std::size_t j = 0; j < sub; ++j)
                detail::rk4_step(deriv, prob, h, work);
            renormalize_mass(prob, times[k]);
            t = times[k];
        }
        marginalize(k);
    }
    return curve;
}

BoundReport nimfa_bound_report(const ContactGraph& g, const ModelParams& p,
                               const BinaryState& x0,
                               const std::vector<double>& times)
{
    const MarginalCurve exact = exact_marginals_ode(g, p, x0, times);

    // Mean-field trajectory sampled at exactly the same grid times.
    const std::size_t n = g.size();
    const auto& ops = kernels::active();
    std::vector<double> s(n);
    auto deriv = [&](const double* y, double* dy) {
        ops.matvec_sym(g.adjacency().data(), n, y, s.data());
        ops.sis_drift(n, p.beta, p.delta, y, s.data(), dy);
    };
    detail::Rk4Workspace work(n);
    std::vector<double> x(x0.infected.begin(), x0.infected.end());

    BoundReport report;
    report.min_gap = std::numeric_limits<double>::infinity();

    double t = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double span = times[k] - t;
        if (span > 0.0) {
            const auto sub =
                static_cast<std::size_t>(std::ceil(span / 1e-3));
            const double h = span / static_cast<double>(sub);
            for (std::size_t j = 0; j < sub; ++j)
                detail::rk4_step(deriv, x, h, work);
            t = times[k];
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double gap = x[i] - exact.probs[k][i];
            if (gap < report.min_gap) {
                report.min_gap = gap;
                report.node = i;
                report.time = times[k];
            }
        }
    }
    return report;
}

} // namespace episim
