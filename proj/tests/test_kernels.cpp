#include <cstring>
#include <doctest.h>
#include <limits>
#include <random>
#include <vector>

#include "episim/kernels.hpp"
#include "episim/rng.hpp"

using namespace episim;

namespace {

std::vector<double> random_symmetric(std::size_t n, std::mt19937_64& eng)
{
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (uniform01(eng) < 0.4)
                a[i * n + j] = a[j * n + i] = 1.0;
    return a;
}

bool bytes_equal(const std::vector<double>& a, const std::vector<double>& b)
{
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

} // namespace

TEST_CASE("every kernel variant reproduces the scalar reference bit for bit")
{
    const auto variants = kernels::available();
    REQUIRE(!variants.empty());
    CHECK(variants.front()->name == "scalar");

    const auto& ref = kernels::scalar();
    std::mt19937_64 eng(2024);

    // Sizes straddle the SIMD width, including remainder lanes.
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 13u, 16u, 40u, 50u, 97u}) {
        const auto a = random_symmetric(n, eng);
        std::vector<double> x(n), m(n), dw(n);
        for (auto& v : x)
            v = uniform01(eng);
        for (auto& v : m)
            v = 3.0 * uniform01(eng);
        for (auto& v : dw)
            v = 0.4 * (uniform01(eng) - 0.5);

        std::vector<double> s0(n), f0(n), gl0(n), gg0(n), o0(n);
        ref.matvec_sym(a.data(), n, x.data(), s0.data());
        ref.sis_drift(n, 1.3, 2.7, x.data(), s0.data(), f0.data());
        ref.diffusion_linear(n, m.data(), x.data(), s0.data(), gl0.data());
        ref.diffusion_logistic(n, m.data(), x.data(), s0.data(), gg0.data());
        const auto st0 =
            ref.em_update(n, 1e-2, x.data(), f0.data(), gl0.data(), dw.data(), o0.data());

        for (const auto* v : variants) {
            CAPTURE(v->name);
            CAPTURE(n);
            std::vector<double> s1(n), f1(n), gl1(n), gg1(n), o1(n);
            v->matvec_sym(a.data(), n, x.data(), s1.data());
            v->sis_drift(n, 1.3, 2.7, x.data(), s1.data(), f1.data());
            v->diffusion_linear(n, m.data(), x.data(), s1.data(), gl1.data());
            v->diffusion_logistic(n, m.data(), x.data(), s1.data(), gg1.data());
            const auto st1 = v->em_update(n, 1e-2, x.data(), f1.data(), gl1.data(),
                                          dw.data(), o1.data());
            CHECK(bytes_equal(s0, s1));
            CHECK(bytes_equal(f0, f1));
            CHECK(bytes_equal(gl0, gl1));
            CHECK(bytes_equal(gg0, gg1));
            CHECK(bytes_equal(o0, o1));
            CHECK(st0.clamps == st1.clamps);
            CHECK(st0.finite == st1.finite);
        }
    }
}

TEST_CASE("em_update clamps and counts boundary exits")
{
    // One component pushed to 1.02 must come back as exactly 1.0 with
    // one clamp counted; one pushed below zero likewise.
    const std::size_t n = 6;
    std::vector<double> x(n, 0.5), f(n, 0.0), g(n, 0.0), dw(n, 0.0), out(n);
    f[2] = 52.0; // 0.5 + 52 * 0.01 = 1.02
    f[4] = -60.0;
    for (const auto* v : kernels::available()) {
        CAPTURE(v->name);
        const auto st = v->em_update(n, 0.01, x.data(), f.data(), g.data(),
                                     dw.data(), out.data());
        CHECK(st.clamps == 2);
        CHECK(st.finite);
        CHECK(out[2] == 1.0);
        CHECK(out[4] == 0.0);
        CHECK(out[0] == 0.5);
    }
}

TEST_CASE("em_update flags non-finite increments")
{
    const std::size_t n = 5;
    std::vector<double> x(n, 0.5), f(n, 0.0), g(n, 0.0), dw(n, 0.0), out(n);
    g[1] = std::numeric_limits<double>::infinity();
    dw[1] = 1.0;
    for (const auto* v : kernels::available()) {
        CAPTURE(v->name);
        const auto st =
            v->em_update(n, 0.01, x.data(), f.data(), g.data(), dw.data(), out.data());
        CHECK_FALSE(st.finite);
    }
}

TEST_CASE("kernel variant can be forced by name")
{
    const auto before = kernels::active().name;
    REQUIRE(kernels::set_active("scalar"));
    CHECK(kernels::active().name == "scalar");
    CHECK_FALSE(kernels::set_active("no-such-variant"));
    CHECK(kernels::active().name == "scalar");
    REQUIRE(kernels::set_active(before)); // restore for the other tests
}
