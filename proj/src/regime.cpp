#include "episim/regime.hpp"

#include <algorithm>
#include <cmath>

#include "episim/errors.hpp"
#include "episim/sde.hpp"

namespace episim {

const char* to_string(RegimeLabel label)
{
    switch (label) {
    case RegimeLabel::extinction: return "Extinction";
    case RegimeLabel::gap: return "Gap";
    case RegimeLabel::permanence: return "Permanence";
    }
    return "?";
}

RegimeReport classify(const ModelParams& p, const SpectralData& s)
{
    if (!(s.lambda1 > 0.0))
        throw validation_error(
            "regime thresholds are undefined: spectral radius is zero");

    constexpr double tie = 1e-12;

    RegimeReport r;
    r.tau = p.tau();
    r.tau_c1 = 1.0 / s.lambda1;
    const double shift = p.noise.cap * p.noise.cap * s.lambda1 / (32.0 * p.delta);
    r.tau_cs = r.tau_c1 - shift;
    r.tau_ps = r.tau_c1 + shift;
    r.drift_c = lyapunov_drift_constant(p, s);

    if (r.tau_cs - r.tau > tie)
        r.label = RegimeLabel::extinction;
    else if (r.tau - r.tau_ps > tie)
        r.label = RegimeLabel::permanence;
    else
        r.label = RegimeLabel::gap;

    r.margin = std::min(std::abs(r.tau - r.tau_cs), std::abs(r.tau - r.tau_ps));
    return r;
}

} // namespace episim
