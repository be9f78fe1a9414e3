#include <doctest.h>

#include <cmath>

#include "rrlab/kernels.hpp"
#include "rrlab/rng.hpp"

using namespace rrlab;

namespace {

// Relative tolerance for reductions, where lane-parallel accumulation is
// allowed to round differently from the sequential reference.
constexpr double kRedTol = 1e-13;

struct BackendGuard {
    BackendGuard() = default;
    ~BackendGuard() { kernels::force_backend("auto"); }
};

bool simd_available() {
#if defined(RRLAB_HAVE_SIMD_BACKEND)
    try {
        kernels::force_backend("simd");
        kernels::force_backend("auto");
        return true;
    } catch (const std::exception&) {
        return false;
    }
#else
    return false;
#endif
}

}  // namespace

TEST_CASE("kernels: scalar/simd equivalence on random sizes") {
    BackendGuard guard;
    const auto& ref = kernels::scalar_backend();
    const auto& act = kernels::active();
    INFO("active backend: ", kernels::active_name());

    Rng rng(4242);
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 33u, 100u, 257u}) {
        Vec x = rng.gaussian_vec(n), y = rng.gaussian_vec(n);
        const double a = rng.gaussian();

        Vec y1 = y, y2 = y;
        ref.axpy(n, a, x.data(), y1.data());
        act.axpy(n, a, x.data(), y2.data());
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

        Vec s1 = x, s2 = x;
        ref.scal(n, a, s1.data());
        act.scal(n, a, s2.data());
        CHECK(s1 == s2);

        Vec r1(n), r2(n);
        ref.relu(n, x.data(), r1.data());
        act.relu(n, x.data(), r2.data());
        CHECK(r1 == r2);

        Vec g1 = y, g2 = y;
        ref.relu_mask(n, x.data(), g1.data());
        act.relu_mask(n, x.data(), g2.data());
        CHECK(g1 == g2);

        const double d1 = ref.dot(n, x.data(), y.data());
        const double d2 = act.dot(n, x.data(), y.data());
        CHECK(d1 == doctest::Approx(d2).epsilon(kRedTol));

        const double q1 = ref.sumsq(n, x.data());
        const double q2 = act.sumsq(n, x.data());
        CHECK(q1 == doctest::Approx(q2).epsilon(kRedTol));
    }
}

TEST_CASE("kernels: scalar/simd gemm equivalence") {
    BackendGuard guard;
    const auto& ref = kernels::scalar_backend();
    const auto& act = kernels::active();
    Rng rng(777);
    for (auto [m, k, n] : std::vector<std::array<std::size_t, 3>>{
             {1, 1, 1}, {2, 2, 2}, {3, 5, 2}, {4, 4, 4}, {7, 3, 9}, {8, 8, 8}, {5, 16, 11}}) {
        Vec A = rng.gaussian_vec(m * k), B = rng.gaussian_vec(k * n);
        Vec Bt = rng.gaussian_vec(n * k), At = rng.gaussian_vec(k * m);
        Vec C1(m * n), C2(m * n);

        ref.gemm_nn(m, k, n, A.data(), B.data(), C1.data());
        act.gemm_nn(m, k, n, A.data(), B.data(), C2.data());
        for (std::size_t i = 0; i < m * n; ++i)
            CHECK(C1[i] == doctest::Approx(C2[i]).epsilon(kRedTol));

        ref.gemm_nt(m, k, n, A.data(), Bt.data(), C1.data());
        act.gemm_nt(m, k, n, A.data(), Bt.data(), C2.data());
        for (std::size_t i = 0; i < m * n; ++i)
            CHECK(C1[i] == doctest::Approx(C2[i]).epsilon(kRedTol));

        ref.gemm_tn(m, k, n, At.data(), B.data(), C1.data());
        act.gemm_tn(m, k, n, At.data(), B.data(), C2.data());
        for (std::size_t i = 0; i < m * n; ++i)
            CHECK(C1[i] == doctest::Approx(C2[i]).epsilon(kRedTol));
    }
}

TEST_CASE("kernels: gemm against hand-computed products") {
    // [[1,2],[3,4]] * [[5,6],[7,8]] = [[19,22],[43,50]]
    Vec A{1, 2, 3, 4}, B{5, 6, 7, 8}, C(4);
    kernels::gemm_nn(2, 2, 2, A.data(), B.data(), C.data());
    CHECK(C == Vec{19, 22, 43, 50});

    // A * B^T with B stored row-major as (n x k)
    kernels::gemm_nt(2, 2, 2, A.data(), B.data(), C.data());
    CHECK(C == Vec{17, 23, 39, 53});

    // A^T * B
    kernels::gemm_tn(2, 2, 2, A.data(), B.data(), C.data());
    CHECK(C == Vec{26, 30, 38, 44});
}

TEST_CASE("kernels: relu_mask applies the inactive-at-zero convention") {
    Vec pre{-1.0, 0.0, 2.0, -0.0};
    Vec g{10.0, 20.0, 30.0, 40.0};
    kernels::relu_mask(4, pre.data(), g.data());
    CHECK(g == Vec{0.0, 0.0, 30.0, 0.0});
}

TEST_CASE("kernels: backend forcing") {
    BackendGuard guard;
    kernels::force_backend("scalar");
    CHECK(kernels::active_name() == "scalar");
    CHECK_THROWS_AS(kernels::force_backend("no-such-backend"), std::invalid_argument);
    if (simd_available()) {
        kernels::force_backend("simd");
        CHECK((kernels::active_name() == "avx2" || kernels::active_name() == "neon" ||
               kernels::active_name() == "simd"));
    }
}
