#include "episim/kernels.hpp"

#include <atomic>
#include <cstdlib>

#include "variants.hpp"

namespace episim::kernels {
namespace {

bool cpu_has_avx2()
{
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::vector<const Ops*> supported_variants()
{
    std::vector<const Ops*> out{&scalar()};
    if (const Ops* avx2 = avx2_variant(); avx2 != nullptr && cpu_has_avx2())
        out.push_back(avx2);
    return out;
}

const Ops* pick_default()
{
    const auto variants = supported_variants();
    const Ops* best = variants.back();
    if (const char* env = std::getenv("EPISIM_KERNELS")) {
        for (const Ops* v : variants)
            if (v->name == std::string_view(env))
                return v;
    }
    return best;
}

std::atomic<const Ops*>& active_slot()
{
    static std::atomic<const Ops*> slot{pick_default()};
    return slot;
}

} // namespace

const Ops& active()
{
    return *active_slot().load(std::memory_order_relaxed);
}

std::vector<const Ops*> available()
{
    return supported_variants();
}

bool set_active(std::string_view name)
{
    for (const Ops* v : supported_variants()) {
        if (v->name == name) {
            active_slot().store(v, std::memory_order_relaxed);
            return true;
        }
    }
    return false;
}

} // namespace episim::kernels
