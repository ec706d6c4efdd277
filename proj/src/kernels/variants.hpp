#pragma once

#include "episim/kernels.hpp"

namespace episim::kernels {

// Returns the AVX2 dispatch table, or nullptr when this build has no
// x86 variant. Callers must still gate on runtime CPU support.
const Ops* avx2_variant();

} // namespace episim::kernels
