#pragma once

#include "episim/graph.hpp"
#include "episim/model.hpp"

namespace episim {

enum class RegimeLabel { extinction, gap, permanence };

const char* to_string(RegimeLabel label);

// Threshold algebra for the effective infection rate tau = beta/delta:
//   tau_c1 = 1 / lambda1                    (mean-field threshold)
//   tau_cs = tau_c1 - M^2 lambda1 / (32 delta)   (extinction below)
//   tau_ps = tau_c1 + M^2 lambda1 / (32 delta)   (permanence above)
// Both results behind tau_cs/tau_ps are strict sufficient conditions,
// so ties (within 1e-12) classify as gap.
struct RegimeReport {
    double tau = 0.0;
    double tau_c1 = 0.0;
    double tau_cs = 0.0;
    double tau_ps = 0.0;
    double drift_c = 0.0;  // 2 beta lambda1 - 2 delta + M^2 lambda1^2 / 16
    double margin = 0.0;   // distance of tau from the nearest threshold
    RegimeLabel label = RegimeLabel::gap;
};

RegimeReport classify(const ModelParams& p, const SpectralData& s);

} // namespace episim
