#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <doctest.h>
#include <numeric>
#include <random>

#include "episim/errors.hpp"
#include "episim/graph.hpp"
#include "episim/rng.hpp"

using namespace episim;

namespace {

// Independent dense eigensolver oracle for the dominant eigenvalue.
double oracle_lambda1(const ContactGraph& g)
{
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            a(i, j) = g.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    return solver.eigenvalues().maxCoeff();
}

} // namespace

TEST_CASE("ring graphs: degrees, spectral radius 2, uniform perron vector")
{
    const auto g = build_ring(50);
    for (std::size_t d : g.degrees())
        CHECK(d == 2);
    CHECK(g.edge_count() == 50);

    const auto s = spectral_radius(g);
    CHECK(std::abs(s.lambda1 - 2.0) <= 1e-10);
    for (double u : s.perron)
        CHECK(std::abs(u - 1.0 / 50.0) <= 1e-10);
    CHECK(s.connected);

    // Smallest ring is the triangle.
    const auto k3 = build_ring(3);
    CHECK(k3.adjacency() == build_complete(3).adjacency());

    const auto c4 = build_ring(4);
    CHECK(c4.at(0, 1) == 1.0);
    CHECK(c4.at(1, 2) == 1.0);
    CHECK(c4.at(2, 3) == 1.0);
    CHECK(c4.at(3, 0) == 1.0);
    CHECK(c4.at(0, 2) == 0.0);
    CHECK(c4.at(1, 3) == 0.0);

    CHECK_THROWS_AS(build_ring(2), validation_error);
}

TEST_CASE("complete graphs: K_n spectral radius is n-1")
{
    CHECK(std::abs(spectral_radius(build_complete(40)).lambda1 - 39.0) <= 1e-10);
    CHECK(std::abs(spectral_radius(build_complete(2)).lambda1 - 1.0) <= 1e-10);
    const auto k5 = build_complete(5);
    for (std::size_t d : k5.degrees())
        CHECK(d == 4);
    CHECK(std::abs(spectral_radius(k5).lambda1 - 4.0) <= 1e-10);
    CHECK_THROWS_AS(build_complete(1), validation_error);
}

TEST_CASE("star and path agree with the dense eigensolver oracle")
{
    const auto star5 = build_star(5);
    const auto s = spectral_radius(star5);
    CHECK(std::abs(s.lambda1 - 2.0) <= 1e-10); // sqrt(4) for 4 leaves
    CHECK(std::abs(s.lambda1 - oracle_lambda1(star5)) <= 1e-9);

    const auto path5 = build_path(5);
    const auto sp = spectral_radius(path5);
    CHECK(std::abs(sp.lambda1 - std::sqrt(3.0)) <= 1e-10);
    CHECK(std::abs(sp.lambda1 - oracle_lambda1(path5)) <= 1e-9);
}

TEST_CASE("random graphs: degenerate p, reproducibility, oracle agreement")
{
    CHECK(build_random(12, 1.0, 9).adjacency() == build_complete(12).adjacency());

    const auto empty = build_random(8, 0.0, 9);
    const auto s = spectral_radius(empty);
    CHECK(s.lambda1 == 0.0);
    CHECK(s.residual == 0.0);
    CHECK_FALSE(s.connected);

    CHECK(build_random(20, 0.3, 5).adjacency() == build_random(20, 0.3, 5).adjacency());
    CHECK(build_random(20, 0.3, 5).adjacency() != build_random(20, 0.3, 6).adjacency());

    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto g = build_random(23, 0.4, seed);
        CHECK(std::abs(spectral_radius(g).lambda1 - oracle_lambda1(g)) <= 1e-9);
    }

    CHECK_THROWS_AS(build_random(5, -0.1, 1), validation_error);
    CHECK_THROWS_AS(build_random(5, 1.5, 1), validation_error);
}

TEST_CASE("dense random surrogate hits a target mean degree")
{
    // 80 nodes with p = 49/79 targets an average degree of 49; only the
    // statistics are pinned, not the particular graph.
    const auto g = build_random(80, 49.0 / 79.0, 2025);
    const double avg =
        2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.size());
    CHECK(std::abs(avg - 49.0) <= 3.0);
    CHECK(g.is_connected());
}

TEST_CASE("spectral radius is invariant under node relabeling")
{
    std::mt19937_64 eng(3);
    for (std::uint64_t seed : {77ull, 78ull, 79ull}) {
        const auto g = build_random(17, 0.35, seed);
        std::vector<std::size_t> perm(17);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), eng);

        std::vector<double> a(17 * 17, 0.0);
        for (std::size_t i = 0; i < 17; ++i)
            for (std::size_t j = 0; j < 17; ++j)
                a[perm[i] * 17 + perm[j]] = g.at(i, j);
        const ContactGraph relabeled(17, std::move(a));
        CHECK(std::abs(spectral_radius(g).lambda1 -
                       spectral_radius(relabeled).lambda1) <= 1e-10);
    }
}

TEST_CASE("degree bounds and quadratic-form inequalities")
{
    for (const auto& g : {build_ring(50), build_random(23, 0.4, 4), build_star(8)}) {
        const auto s = spectral_radius(g);
        const double avg =
            2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.size());
        CHECK(s.lambda1 >= avg - 1e-9);
        CHECK(s.lambda1 <= static_cast<double>(g.max_degree()) + 1e-9);

        // <AX, X> <= lambda1 |X|^2 and |AX| <= lambda1 |X| on random states.
        std::mt19937_64 eng(11);
        const std::size_t n = g.size();
        std::vector<double> x(n), ax(n);
        for (int trial = 0; trial < 1000; ++trial) {
            for (auto& v : x)
                v = uniform01(eng);
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    acc += g.at(i, j) * x[j];
                ax[i] = acc;
            }
            double quad = 0.0, norm2 = 0.0, ax2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                quad += ax[i] * x[i];
                norm2 += x[i] * x[i];
                ax2 += ax[i] * ax[i];
            }
            CHECK(quad <= s.lambda1 * norm2 * (1.0 + 1e-10));
            CHECK(ax2 <= s.lambda1 * s.lambda1 * norm2 * (1.0 + 1e-10));
        }
    }
}

TEST_CASE("edge list loading")
{
    const auto p3 = load_edge_list("0 1\n1 2\n", 3);
    CHECK(p3.degrees() == std::vector<std::size_t>{1, 2, 1});

    const auto dup = load_edge_list("0 1\n1 0\n", 2);
    CHECK(dup.edge_count() == 1);

    const auto commented = load_edge_list("# a comment\n\n0 1\n", 2);
    CHECK(commented.edge_count() == 1);

    CHECK_THROWS_AS(load_edge_list("0 0\n", 2), parse_error);
    CHECK_THROWS_AS(load_edge_list("0 5\n", 3), parse_error);
    CHECK_THROWS_AS(load_edge_list("0\n", 3), parse_error);
    CHECK_THROWS_AS(load_edge_list("0 1 7\n", 3), parse_error);
}

TEST_CASE("constructors reject malformed adjacency")
{
    std::vector<double> asym{0, 1, 0, 0};
    CHECK_THROWS_AS(ContactGraph(2, asym), validation_error);
    std::vector<double> diag{1, 0, 0, 0};
    CHECK_THROWS_AS(ContactGraph(2, diag), validation_error);
    std::vector<double> weighted{0, 0.5, 0.5, 0};
    CHECK_THROWS_AS(ContactGraph(2, weighted), validation_error);
    CHECK_THROWS_AS(ContactGraph(0, {}), validation_error);
}

TEST_CASE("spectral radius edge cases and failure modes")
{
    CHECK_THROWS_AS(spectral_radius(build_ring(5), -1.0), validation_error);
    CHECK_THROWS_AS(spectral_radius(build_ring(5), 1e-12, 0), validation_error);
    CHECK_THROWS_AS(spectral_radius(build_path(5), 1e-12, 1), numerical_error);

    // Isolated node: accepted, but flagged and perron not positive there.
    const auto g = load_edge_list("0 1\n", 3);
    CHECK_FALSE(g.is_connected());
    const auto s = spectral_radius(g);
    CHECK_FALSE(s.connected);
    CHECK(std::abs(s.lambda1 - 1.0) <= 1e-9);

    // Single node, no edges.
    const auto lone = load_edge_list("", 1);
    const auto sl = spectral_radius(lone);
    CHECK(sl.lambda1 == 0.0);
    CHECK(sl.perron == std::vector<double>{1.0});

    // Memoized eigenpair matches the explicit call.
    const auto rg = build_random(15, 0.4, 21);
    CHECK(rg.spectral().lambda1 == spectral_radius(rg).lambda1);
}
