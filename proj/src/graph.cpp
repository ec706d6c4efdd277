#include "episim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>
#include <string>

#include "episim/errors.hpp"
#include "episim/kernels.hpp"
#include "episim/rng.hpp"

namespace episim {

struct ContactGraph::SpectralCache {
    std::once_flag once;
    SpectralData data;
};

namespace {

std::vector<double> zero_matrix(std::size_t n)
{
    return std::vector<double>(n * n, 0.0);
}

void set_edge(std::vector<double>& a, std::size_t n, std::size_t i, std::size_t j)
{
    a[i * n + j] = 1.0;
    a[j * n + i] = 1.0;
}

bool bfs_connected(const std::vector<double>& a, std::size_t n)
{
    if (n <= 1)
        return true;
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        const double* row = a.data() + v * n;
        for (std::size_t j = 0; j < n; ++j) {
            if (row[j] != 0.0 && !seen[j]) {
                seen[j] = 1;
                ++reached;
                stack.push_back(j);
            }
        }
    }
    return reached == n;
}

} // namespace

ContactGraph::ContactGraph(std::size_t n, std::vector<double> adjacency)
    : n_(n), adj_(std::move(adjacency)), cache_(std::make_shared<SpectralCache>())
{
    if (n_ == 0)
        throw validation_error("graph must have at least one node");
    if (n_ > max_nodes)
        throw validation_error("graph exceeds the dense-storage limit of " +
                               std::to_string(max_nodes) + " nodes");
    if (adj_.size() != n_ * n_)
        throw validation_error("adjacency matrix size does not match node count");

    degree_.assign(n_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
        if (adj_[i * n_ + i] != 0.0)
            throw validation_error("self-loop on node " + std::to_string(i));
        for (std::size_t j = 0; j < n_; ++j) {
            const double v = adj_[i * n_ + j];
            if (v != 0.0 && v != 1.0)
                throw validation_error("adjacency entries must be 0 or 1");
            if (v != adj_[j * n_ + i])
                throw validation_error("adjacency matrix must be symmetric");
            if (v != 0.0)
                ++degree_[i];
        }
        max_degree_ = std::max(max_degree_, degree_[i]);
        edge_count_ += degree_[i];
    }
    edge_count_ /= 2;
    connected_ = bfs_connected(adj_, n_);
}

const SpectralData& ContactGraph::spectral() const
{
    std::call_once(cache_->once, [this] { cache_->data = spectral_radius(*this); });
    return cache_->data;
}

ContactGraph build_ring(std::size_t n)
{
    if (n < 3)
        throw validation_error("ring topology requires at least 3 nodes");
    auto a = zero_matrix(n);
    for (std::size_t i = 0; i < n; ++i)
        set_edge(a, n, i, (i + 1) % n);
    return {n, std::move(a)};
}

ContactGraph build_complete(std::size_t n)
{
    if (n < 2)
        throw validation_error("complete topology requires at least 2 nodes");
    auto a = zero_matrix(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            set_edge(a, n, i, j);
    return {n, std::move(a)};
}

ContactGraph build_random(std::size_t n, double p, std::uint64_t seed)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw validation_error("edge probability must lie in [0, 1]");
    if (n == 0)
        throw validation_error("graph must have at least one node");
    std::mt19937_64 eng(seed);
    auto a = zero_matrix(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (uniform01(eng) < p)
                set_edge(a, n, i, j);
    return {n, std::move(a)};
}

ContactGraph build_path(std::size_t n)
{
    if (n < 2)
        throw validation_error("path topology requires at least 2 nodes");
    auto a = zero_matrix(n);
    for (std::size_t i = 0; i + 1 < n; ++i)
        set_edge(a, n, i, i + 1);
    return {n, std::move(a)};
}

ContactGraph build_star(std::size_t n)
{
    if (n < 2)
        throw validation_error("star topology requires at least 2 nodes");
    auto a = zero_matrix(n);
    for (std::size_t i = 1; i < n; ++i)
        set_edge(a, n, 0, i);
    return {n, std::move(a)};
}

ContactGraph load_edge_list(std::string_view text, std::size_t n)
{
    if (n == 0)
        throw validation_error("graph must have at least one node");
    auto a = zero_matrix(n);
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::istringstream fields(line);
        long long i = -1, j = -1;
        if (!(fields >> i >> j) || i < 0 || j < 0)
            throw parse_error("edge list line " + std::to_string(lineno) +
                              ": expected two nonnegative node indices");
        std::string rest;
        if (fields >> rest)
            throw parse_error("edge list line " + std::to_string(lineno) +
                              ": trailing content '" + rest + "'");
        if (i == j)
            throw parse_error("edge list line " + std::to_string(lineno) +
                              ": self-loop on node " + std::to_string(i));
        if (static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n)
            throw parse_error("edge list line " + std::to_string(lineno) +
                              ": node index out of range for n=" + std::to_string(n));
        set_edge(a, n, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    return {n, std::move(a)};
}

SpectralData spectral_radius(const ContactGraph& g, double tol, std::size_t max_iter)
{
    if (!(tol > 0.0))
        throw validation_error("spectral tolerance must be positive");
    if (max_iter == 0)
        throw validation_error("max_iter must be at least 1");

    const std::size_t n = g.size();
    SpectralData out;
    out.connected = g.is_connected();

    // Edgeless graph: A = 0, so lambda1 = 0 and any stochastic vector is
    // an exact eigenvector.
    if (g.max_degree() == 0) {
        out.lambda1 = 0.0;
        out.perron.assign(n, 1.0 / static_cast<double>(n));
        out.iterations = 0;
        out.residual = 0.0;
        return out;
    }

    const auto& ops = kernels::active();
    std::vector<double> v(n, 1.0 / static_cast<double>(n));
    std::vector<double> av(n, 0.0);

    double lambda = 0.0;
    double residual = 0.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        ops.matvec_sym(g.adjacency().data(), n, v.data(), av.data());

        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += v[i] * av[i];
            den += v[i] * v[i];
        }
        lambda = num / den;

        residual = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            residual = std::max(residual, std::abs(av[i] - lambda * v[i]));

        if (residual <= tol) {
            out.lambda1 = lambda;
            out.perron = v;
            out.iterations = it;
            out.residual = residual;
            return out;
        }

        // Next iterate from the shifted matrix: w = (A + I) v.
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            av[i] += v[i];
            sum += av[i];
        }
        for (std::size_t i = 0; i < n; ++i)
            v[i] = av[i] / sum;
    }

    std::ostringstream msg;
    msg << "power iteration did not reach residual " << tol << " within "
        << max_iter << " iterations (last residual " << residual << ")";
    throw numerical_error(msg.str());
}

} // namespace episim
