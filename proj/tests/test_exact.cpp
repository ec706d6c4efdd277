#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <doctest.h>
#include <vector>

#include "episim/errors.hpp"
#include "episim/exact.hpp"
#include "episim/graph.hpp"
#include "episim/rng.hpp"

using namespace episim;

namespace {

// Independent forward-equation oracle: dense transposed generator,
// propagated by eigendecomposition instead of time stepping.
Eigen::MatrixXd dense_qt(const ContactGraph& g, double beta, double delta)
{
    const std::size_t n = g.size();
    const std::size_t states = std::size_t{1} << n;
    Eigen::MatrixXd qt = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(states),
                                               static_cast<Eigen::Index>(states));
    for (std::size_t s = 0; s < states; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t bit = std::size_t{1} << i;
            if (s & bit) {
                qt(static_cast<Eigen::Index>(s ^ bit), static_cast<Eigen::Index>(s)) +=
                    delta;
                qt(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) -= delta;
            } else {
                int cnt = 0;
                for (std::size_t j = 0; j < n; ++j)
                    if (g.at(i, j) != 0.0 && (s & (std::size_t{1} << j)))
                        ++cnt;
                if (cnt > 0) {
                    const double r = beta * cnt;
                    qt(static_cast<Eigen::Index>(s | bit),
                       static_cast<Eigen::Index>(s)) += r;
                    qt(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) -= r;
                }
            }
        }
    }
    return qt;
}

std::vector<double> oracle_marginals(const ContactGraph& g, double beta, double delta,
                                     const BinaryState& x0, double t)
{
    const std::size_t n = g.size();
    const std::size_t states = std::size_t{1} << n;
    const Eigen::MatrixXd qt = dense_qt(g, beta, delta);
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(qt);
    Eigen::VectorXcd p0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(states));
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (x0.infected[i])
            idx |= std::size_t{1} << i;
    p0(static_cast<Eigen::Index>(idx)) = 1.0;

    const Eigen::VectorXcd coeff = solver.eigenvectors().partialPivLu().solve(p0);
    const Eigen::VectorXcd pt =
        solver.eigenvectors() *
        (solver.eigenvalues().array() * t).exp().matrix().asDiagonal() * coeff;

    std::vector<double> marg(n, 0.0);
    for (std::size_t s = 0; s < states; ++s)
        for (std::size_t i = 0; i < n; ++i)
            if (s & (std::size_t{1} << i))
                marg[i] += pt(static_cast<Eigen::Index>(s)).real();
    return marg;
}

} // namespace

TEST_CASE("event-driven chain: absorption and degenerate cases")
{
    const auto ring4 = build_ring(4);
    const ModelParams p(1.0, 1.0);

    CHECK(gillespie_path(ring4, p, BinaryState{{0, 0, 0, 0}}, 10.0, 1).empty());

    // One isolated node: exactly one recovery, nothing after.
    const auto lone = load_edge_list("", 1);
    const auto events = gillespie_path(lone, ModelParams(0.7, 1.0),
                                       BinaryState{{1}}, 1000.0, 5);
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == EventKind::recover);
    CHECK(events[0].node == 0);

    CHECK_THROWS_AS(gillespie_path(ring4, p, BinaryState{{1, 0, 0, 0}}, -1.0, 1),
                    validation_error);
    CHECK_THROWS_AS(gillespie_path(ring4, p, BinaryState{{2, 0, 0, 0}}, 1.0, 1),
                    validation_error);
    CHECK_THROWS_AS(gillespie_path(ring4, p, BinaryState{{1, 0}}, 1.0, 1),
                    validation_error);
}

TEST_CASE("first event on K2 splits evenly between recovery and infection")
{
    const auto k2 = build_complete(2);
    const ModelParams p(1.0, 1.0);
    const BinaryState x0{{1, 0}};
    const int trials = 10000;
    int infections = 0;
    for (int k = 0; k < trials; ++k) {
        const auto events =
            gillespie_path(k2, p, x0, 1000.0, derive_path_seed(808, k));
        REQUIRE(!events.empty());
        const auto& first = events.front();
        if (first.kind == EventKind::infect) {
            ++infections;
            CHECK(first.node == 1); // only node 1 is susceptible
        } else {
            CHECK(first.node == 0); // only node 0 can recover
        }
    }
    const double frac = static_cast<double>(infections) / trials;
    CHECK(std::abs(frac - 0.5) <= 3.0 * 0.005); // 3 binomial standard errors
}

TEST_CASE("waiting times from a frozen state are exponential")
{
    // Ring of 6 with nodes {0,3} infected: every susceptible node sees
    // exactly one infected neighbor, so R = 2 delta + 4 beta = 5.4.
    const auto ring6 = build_ring(6);
    const ModelParams p(0.7, 1.3);
    const BinaryState frozen{{1, 0, 0, 1, 0, 0}};
    const double rate = 2 * 1.3 + 4 * 0.7;

    const int n = 10000;
    std::vector<double> sample;
    sample.reserve(n);
    for (int k = 0; k < n; ++k) {
        const auto events =
            gillespie_path(ring6, p, frozen, 1000.0, derive_path_seed(909, k));
        REQUIRE(!events.empty());
        sample.push_back(events.front().time);
    }
    std::sort(sample.begin(), sample.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cdf = 1.0 - std::exp(-rate * sample[i]);
        d = std::max(d, std::abs(cdf - static_cast<double>(i + 1) / n));
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    }
    CHECK(d < 1.628 / std::sqrt(static_cast<double>(n))); // KS, 1% level
}

TEST_CASE("forward equations: closed forms and the eigensolver oracle")
{
    const std::vector<double> times{0.0, 0.3, 0.7, 1.5, 3.0};

    SUBCASE("single node decays at exp(-delta t)")
    {
        const auto lone = load_edge_list("", 1);
        const auto curve =
            exact_marginals_ode(lone, ModelParams(0.5, 1.3), BinaryState{{1}}, times);
        for (std::size_t k = 0; k < times.size(); ++k)
            CHECK(curve.probs[k][0] ==
                  doctest::Approx(std::exp(-1.3 * times[k])).epsilon(1e-9));
    }

    SUBCASE("beta = 0 decouples the nodes")
    {
        const auto ring4 = build_ring(4);
        const auto curve = exact_marginals_ode(ring4, ModelParams(0.0, 0.9),
                                               BinaryState{{1, 0, 1, 0}}, times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            CHECK(curve.probs[k][0] ==
                  doctest::Approx(std::exp(-0.9 * times[k])).epsilon(1e-9));
            CHECK(curve.probs[k][1] == doctest::Approx(0.0).epsilon(1e-12));
        }
    }

    SUBCASE("K2 and ring4 match the eigendecomposition oracle")
    {
        const auto k2 = build_complete(2);
        const auto curve_k2 =
            exact_marginals_ode(k2, ModelParams(1.3, 0.9), BinaryState{{1, 0}}, times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const auto ref = oracle_marginals(k2, 1.3, 0.9, BinaryState{{1, 0}}, times[k]);
            for (std::size_t i = 0; i < 2; ++i)
                CHECK(curve_k2.probs[k][i] == doctest::Approx(ref[i]).epsilon(1e-8));
        }

        const auto ring4 = build_ring(4);
        const BinaryState x0{{1, 0, 1, 0}};
        const auto curve = exact_marginals_ode(ring4, ModelParams(0.8, 1.1), x0, times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const auto ref = oracle_marginals(ring4, 0.8, 1.1, x0, times[k]);
            for (std::size_t i = 0; i < 4; ++i)
                CHECK(curve.probs[k][i] == doctest::Approx(ref[i]).epsilon(1e-8));
        }
    }

    SUBCASE("deterministic curves report zero confidence width, in bounds")
    {
        const auto k4 = build_complete(4);
        const auto curve = exact_marginals_ode(k4, ModelParams(1.0, 1.0),
                                               BinaryState{{1, 1, 1, 1}}, times);
        for (std::size_t k = 0; k < times.size(); ++k)
            for (std::size_t i = 0; i < 4; ++i) {
                CHECK(curve.probs[k][i] >= 0.0);
                CHECK(curve.probs[k][i] <= 1.0);
                CHECK(curve.ci_halfwidth[k][i] == 0.0);
            }
    }
}

TEST_CASE("monte carlo marginals")
{
    SUBCASE("single node at t=1 estimates exp(-1)")
    {
        const auto lone = load_edge_list("", 1);
        const auto curve = exact_marginals_mc(lone, ModelParams(0.5, 1.0),
                                              BinaryState{{1}}, {1.0}, 100000, 31);
        const double target = std::exp(-1.0);
        const double se = std::sqrt(target * (1.0 - target) / 100000.0);
        CHECK(std::abs(curve.probs[0][0] - target) <= 3.0 * se);
    }

    SUBCASE("agreement with the forward equations on K2")
    {
        const auto k2 = build_complete(2);
        const ModelParams p(1.0, 1.0);
        const BinaryState x0{{1, 0}};
        std::vector<double> times;
        for (int k = 0; k <= 8; ++k)
            times.push_back(0.25 * k);
        const auto ode = exact_marginals_ode(k2, p, x0, times);
        const auto mc = exact_marginals_mc(k2, p, x0, times, 2000, 4242);
        for (std::size_t k = 0; k < times.size(); ++k)
            for (std::size_t i = 0; i < 2; ++i)
                CHECK(std::abs(mc.probs[k][i] - ode.probs[k][i]) <=
                      3.0 * mc.ci_halfwidth[k][i]);
    }

    SUBCASE("all-susceptible start never produces infection")
    {
        const auto ring4 = build_ring(4);
        const auto curve = exact_marginals_mc(ring4, ModelParams(2.0, 1.0),
                                              BinaryState{{0, 0, 0, 0}},
                                              {0.5, 1.0}, 100, 7);
        for (const auto& row : curve.probs)
            for (double v : row)
                CHECK(v == 0.0);
    }
}

TEST_CASE("mean-field curve dominates the exact marginals")
{
    std::vector<double> times;
    for (int k = 0; k <= 24; ++k)
        times.push_back(0.25 * k);

    SUBCASE("beta = 0 gives equality up to integrator tolerance")
    {
        const auto ring4 = build_ring(4);
        const auto report = nimfa_bound_report(ring4, ModelParams(0.0, 1.0),
                                               BinaryState{{1, 0, 1, 0}}, times);
        CHECK(std::abs(report.min_gap) <= 1e-9);
    }

    SUBCASE("ring4 all infected")
    {
        const auto ring4 = build_ring(4);
        const auto report = nimfa_bound_report(ring4, ModelParams(1.0, 1.0),
                                               BinaryState{{1, 1, 1, 1}}, times);
        CHECK(report.min_gap >= -1e-6);
    }

    SUBCASE("K2 above threshold")
    {
        const auto k2 = build_complete(2);
        const auto report = nimfa_bound_report(k2, ModelParams(2.0, 1.0),
                                               BinaryState{{1, 0}}, times);
        CHECK(report.min_gap >= -1e-6);
    }
}

TEST_CASE("exact-module validation")
{
    const auto ring13 = build_ring(13);
    CHECK_THROWS_AS(exact_marginals_ode(ring13, ModelParams(1.0, 1.0),
                                        BinaryState{{1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}},
                                        {1.0}),
                    validation_error);

    const auto ring4 = build_ring(4);
    const BinaryState x0{{1, 0, 0, 0}};
    CHECK_THROWS_AS(exact_marginals_ode(ring4, ModelParams(1.0, 1.0), x0, {}),
                    validation_error);
    CHECK_THROWS_AS(exact_marginals_ode(ring4, ModelParams(1.0, 1.0), x0, {1.0, 0.5}),
                    validation_error);
    CHECK_THROWS_AS(exact_marginals_ode(ring4, ModelParams(1.0, 1.0), x0, {-1.0, 0.5}),
                    validation_error);
    CHECK_THROWS_AS(exact_marginals_mc(ring4, ModelParams(1.0, 1.0), x0, {1.0}, 0, 1),
                    validation_error);
}
