#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace episim {

// Per-node infection probabilities x in [0,1]^N.
using StateVector = std::vector<double>;

// Multiplicative infection-rate noise. sigma_i(x) must satisfy
// sup_{x in (0,1)} sigma_i(x)/x <= cap, which both shapes below do as
// long as every per-node level m_i <= cap:
//   linear:   sigma_i(x) = m_i * x
//   logistic: sigma_i(x) = m_i * x * (1 - x)
// levels may hold one entry (applied to every node) or one per node.
struct NoiseSpec {
    enum class Model { linear, logistic };

    Model model = Model::linear;
    std::vector<double> levels{0.0};
    double cap = 0.0;

    NoiseSpec() = default;
    NoiseSpec(Model model, std::vector<double> levels, double cap);

    // Uniform levels m_i = cap for every node.
    static NoiseSpec uniform(Model model, double cap);

    double level(std::size_t i) const
    {
        return levels.size() == 1 ? levels.front() : levels[i];
    }

    double sigma(std::size_t i, double x) const
    {
        const double lin = level(i) * x;
        return model == Model::linear ? lin : lin * (1.0 - x);
    }
};

const char* to_string(NoiseSpec::Model model);

struct ModelParams {
    double beta;  // mean infection rate, 1/time; 0 disables infection
    double delta; // recovery rate, 1/time
    NoiseSpec noise;

    ModelParams(double beta, double delta, NoiseSpec noise = {});

    // Effective infection rate tau = beta / delta.
    double tau() const { return beta / delta; }
};

// A saved solution: strictly increasing time grid and one state per
// grid point, tagged with how it was produced.
struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;
    std::string scheme;
    double dt = 0.0;
    std::optional<std::uint64_t> seed;
};

} // namespace episim
