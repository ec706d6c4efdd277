#include "episim/model.hpp"

#include <cmath>
#include <string>

#include "episim/errors.hpp"

namespace episim {

NoiseSpec::NoiseSpec(Model model, std::vector<double> levels, double cap)
    : model(model), levels(std::move(levels)), cap(cap)
{
    if (!(this->cap >= 0.0) || !std::isfinite(this->cap))
        throw validation_error("noise cap M must be finite and nonnegative");
    if (this->levels.empty())
        throw validation_error("noise levels must not be empty");
    for (std::size_t i = 0; i < this->levels.size(); ++i) {
        const double m = this->levels[i];
        if (!(m >= 0.0) || !std::isfinite(m))
            throw validation_error("noise level m[" + std::to_string(i) +
                                   "] must be finite and nonnegative");
        if (m > this->cap)
            throw validation_error(
                "noise level m[" + std::to_string(i) + "]=" + std::to_string(m) +
                " exceeds cap M=" + std::to_string(this->cap) +
                " (levels must satisfy sup sigma_i(x)/x <= M)");
    }
}

NoiseSpec NoiseSpec::uniform(Model model, double cap)
{
    return {model, std::vector<double>{cap}, cap};
}

const char* to_string(NoiseSpec::Model model)
{
    return model == NoiseSpec::Model::linear ? "linear" : "logistic";
}

ModelParams::ModelParams(double beta, double delta, NoiseSpec noise)
    : beta(beta), delta(delta), noise(std::move(noise))
{
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw validation_error("infection rate beta must be finite and nonnegative");
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw validation_error("recovery rate delta must be finite and positive");
}

} // namespace episim
