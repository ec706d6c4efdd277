#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace episim {

// splitmix64 (Steele, Lea, Flood 2014). Used as the seed-mixing function
// so that per-path streams are reproducible independent of worker
// scheduling: path k of a run with master seed m always uses
// derive_path_seed(m, k).
inline std::uint64_t splitmix64_next(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_path_seed(std::uint64_t master_seed, std::uint64_t path_index)
{
    std::uint64_t state = master_seed + 0x9E3779B97F4A7C15ULL * (path_index + 1);
    return splitmix64_next(state);
}

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(std::mt19937_64& eng)
{
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Standard-normal stream via the Marsaglia polar method on top of
// mt19937_64. Both pieces are fully specified, so identical seeds give
// identical increment sequences on every build of this toolkit.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

    double next()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01(eng_) - 1.0;
            v = 2.0 * uniform01(eng_) - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double mul = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * mul;
        has_spare_ = true;
        return u * mul;
    }

    // Fills out[i] with independent N(0, 1) draws, i ascending.
    void fill(std::span<double> out)
    {
        for (double& x : out)
            x = next();
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace episim
