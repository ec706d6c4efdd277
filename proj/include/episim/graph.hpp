#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

namespace episim {

// Dominant eigenpair of an adjacency matrix. perron is ell-1 normalized
// (sum 1) and strictly positive on connected graphs; on graphs that are
// disconnected or have isolated nodes, positivity is only guaranteed on
// the dominant component and `connected` is false so callers can warn.
struct SpectralData {
    double lambda1 = 0.0;
    std::vector<double> perron;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool connected = true;
};

// Undirected simple contact graph stored as a dense row-major 0/1
// matrix. Immutable after construction; spectral() memoizes the default
// eigenpair and is safe to call concurrently.
class ContactGraph {
public:
    static constexpr std::size_t max_nodes = 4096;

    // adjacency must be n*n, symmetric, zero-diagonal, entries in {0,1}.
    ContactGraph(std::size_t n, std::vector<double> adjacency);

    std::size_t size() const { return n_; }
    double at(std::size_t i, std::size_t j) const { return adj_[i * n_ + j]; }
    const std::vector<double>& adjacency() const { return adj_; }
    const std::vector<std::size_t>& degrees() const { return degree_; }
    std::size_t max_degree() const { return max_degree_; }
    std::size_t edge_count() const { return edge_count_; }
    bool is_connected() const { return connected_; }

    // Eigenpair at default tolerance (1e-12), computed once on demand.
    const SpectralData& spectral() const;

private:
    std::size_t n_;
    std::vector<double> adj_;
    std::vector<std::size_t> degree_;
    std::size_t max_degree_ = 0;
    std::size_t edge_count_ = 0;
    bool connected_ = true;

    struct SpectralCache;
    std::shared_ptr<SpectralCache> cache_;
};

// Cycle graph C_n; every node has degree 2. Requires n >= 3.
ContactGraph build_ring(std::size_t n);

// Complete graph K_n. Requires n >= 2.
ContactGraph build_complete(std::size_t n);

// G(n, p): each unordered pair included independently with probability
// p, deterministically under the given seed.
ContactGraph build_random(std::size_t n, double p, std::uint64_t seed);

// Path graph P_n (test/bench convenience). Requires n >= 2.
ContactGraph build_path(std::size_t n);

// Star graph: node 0 is the hub, nodes 1..n-1 are leaves. Requires n >= 2.
ContactGraph build_star(std::size_t n);

// Parses "i j" lines with 0-based node indices into a graph on n nodes.
// '#' starts a comment line; duplicate edges collapse; self-loops and
// out-of-range indices are rejected.
ContactGraph load_edge_list(std::string_view text, std::size_t n);

// Power iteration on A + I (the shift makes the dominant eigenvalue
// strictly dominant on bipartite graphs too), all-ones start, ell-1
// normalized iterates. Stops when ||A u - lambda u||_inf <= tol; throws
// numerical_error after max_iter without convergence.
SpectralData spectral_radius(const ContactGraph& g, double tol = 1e-12,
                             std::size_t max_iter = 10000);

} // namespace episim
