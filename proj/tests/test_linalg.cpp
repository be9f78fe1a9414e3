#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rrlab/linalg.hpp"

using namespace rrlab;

namespace {

double reconstruction_error(const Mat& a, const Svd& d) {
    Mat us = d.u;
    for (std::size_t j = 0; j < d.s.size(); ++j)
        for (std::size_t i = 0; i < us.rows(); ++i) us(i, j) *= d.s[j];
    const Mat rec = matmul_nt(us, d.v);
    double err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        err += (rec.data()[i] - a.data()[i]) * (rec.data()[i] - a.data()[i]);
    return std::sqrt(err);
}

double orthonormality_error(const Mat& q) {
    const Mat g = matmul_tn(q, q);
    double err = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j)
            err = std::max(err, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return err;
}

}  // namespace

TEST_CASE("svd: fixed 2x2 cases") {
    const Svd id = svd(Mat::identity(2));
    CHECK(id.s[0] == doctest::Approx(1.0));
    CHECK(id.s[1] == doctest::Approx(1.0));

    const Svd r1 = svd(Mat(2, 2, {1, 1, 2, 2}));
    CHECK(r1.s[0] == doctest::Approx(std::sqrt(10.0)));
    CHECK(r1.s[1] == 0.0);  // exact: the two hypot terms cancel bitwise

    const Svd di = svd(Mat(2, 2, {3, 0, 0, 4}));
    CHECK(di.s[0] == doctest::Approx(4.0));
    CHECK(di.s[1] == doctest::Approx(3.0));
}

TEST_CASE("svd: reconstruction and orthonormality on 1000 random matrices up to 8x8") {
    Rng rng(2024);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t r = 1 + std::size_t(rng.uniform() * 8.0);
        const std::size_t c = 1 + std::size_t(rng.uniform() * 8.0);
        const double scale = std::exp(rng.gaussian());
        Mat a = oracles::random_mat(rng, r, c, scale);
        if (t % 5 == 0 && r >= 2 && c >= 2) {
            // force a rank deficiency
            a.set_row(r - 1, a.row(0));
        }
        const Svd d = svd(a);
        const double fn = frobenius_norm(a);
        CHECK(reconstruction_error(a, d) <= 1e-10 * std::max(1.0, fn));
        CHECK(orthonormality_error(d.u) <= 1e-10);
        CHECK(orthonormality_error(d.v) <= 1e-10);
        for (std::size_t j = 0; j + 1 < d.s.size(); ++j) CHECK(d.s[j] >= d.s[j + 1]);
        CHECK(d.s.back() >= 0.0);
    }
}

TEST_CASE("svd: zero matrix and tall/wide shapes") {
    const Svd z = svd(Mat(3, 2, 0.0));
    CHECK(z.s == Vec{0.0, 0.0});
    CHECK(orthonormality_error(z.u) <= 1e-12);

    Rng rng(5);
    const Mat tall = oracles::random_mat(rng, 7, 3);
    const Mat wide = oracles::random_mat(rng, 3, 7);
    CHECK(reconstruction_error(tall, svd(tall)) <= 1e-10 * frobenius_norm(tall));
    CHECK(reconstruction_error(wide, svd(wide)) <= 1e-10 * frobenius_norm(wide));
}

TEST_CASE("norms: fixed values and the power-iteration oracle") {
    CHECK(spectral_norm(Mat::identity(2)) == doctest::Approx(1.0));
    CHECK(frobenius_norm(Mat::identity(2)) == doctest::Approx(std::sqrt(2.0)));
    CHECK(spectral_norm(Mat(2, 2, {3, 0, 0, 4})) == doctest::Approx(4.0));
    CHECK(frobenius_norm(Mat(2, 2, {3, 0, 0, 4})) == doctest::Approx(5.0));

    Rng rng(31);
    for (int t = 0; t < 25; ++t) {
        const Mat a = oracles::random_mat(rng, 3, 3);
        const double sn = spectral_norm(a);
        CHECK(sn == doctest::Approx(oracles::power_iteration_sigma(a)).epsilon(1e-8));
        CHECK(sn <= frobenius_norm(a) + 1e-12);
    }
}

TEST_CASE("norm inequalities on random matrices") {
    Rng rng(77);
    for (int t = 0; t < 200; ++t) {
        const std::size_t r = 1 + std::size_t(rng.uniform() * 6.0);
        const std::size_t c = 1 + std::size_t(rng.uniform() * 6.0);
        const Mat a = oracles::random_mat(rng, r, c);
        const double sn = spectral_norm(a), fn = frobenius_norm(a);
        CHECK(sn <= fn * (1.0 + 1e-12));
        CHECK(fn <= std::sqrt(double(std::min(r, c))) * sn * (1.0 + 1e-12));
    }
}

TEST_CASE("stable_rank: values, range, and scale invariance") {
    CHECK(stable_rank(Mat(2, 2, {1, 1, 2, 2})) == doctest::Approx(1.0));
    CHECK(stable_rank(Mat::identity(2)) == doctest::Approx(2.0));
    CHECK(stable_rank(Mat(2, 2, {3, 0, 0, 4})) == doctest::Approx(25.0 / 16.0));
    CHECK_THROWS_AS(stable_rank(Mat(2, 2, 0.0)), std::invalid_argument);

    Rng rng(123);
    for (int t = 0; t < 100; ++t) {
        const std::size_t r = 1 + std::size_t(rng.uniform() * 5.0);
        const std::size_t c = 1 + std::size_t(rng.uniform() * 5.0);
        const Mat a = oracles::random_mat(rng, r, c);
        const double sr = stable_rank(a);
        CHECK(sr >= 1.0 - 1e-12);
        CHECK(sr <= double(std::min(r, c)) + 1e-12);
        const double cscale = std::exp(3.0 * rng.gaussian());
        CHECK(stable_rank(cscale * a) == doctest::Approx(sr).epsilon(1e-9));
    }
}

TEST_CASE("numerical_rank") {
    CHECK(numerical_rank(Mat(2, 2, {1, 1, 2, 2}), 1e-8) == 1);
    CHECK(numerical_rank(Mat::identity(2), 1e-8) == 2);
    CHECK(numerical_rank(Mat(3, 3, 0.0), 1e-8) == 0);
    CHECK_THROWS_AS(numerical_rank(Mat::identity(2), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(numerical_rank(Mat::identity(2), 1.5), std::invalid_argument);
}

TEST_CASE("angle: unit-circle cases and clamping") {
    const double pi = 3.14159265358979323846;
    CHECK(angle({1, 0}, {0, 1}) == doctest::Approx(pi / 2.0));
    CHECK(angle({1, 0}, {-1, 0}) == doctest::Approx(pi));
    CHECK(angle({1, 0}, {-0.5, std::sqrt(3.0) / 2.0}) == doctest::Approx(2.0 * pi / 3.0));
    CHECK_THROWS_AS(angle({0, 0}, {1, 0}), std::invalid_argument);
    // nearly-parallel vectors whose cosine rounds above 1
    const Vec u{1.0, 1e-9};
    CHECK(std::isfinite(angle(u, u)));
    CHECK(angle(u, u) == doctest::Approx(0.0));
}

TEST_CASE("pinv: fixed cases, adjugate oracle, Penrose identities") {
    const Mat id = Mat::identity(2);
    const Mat pid = pinv(id);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(pid.data()[i] == doctest::Approx(id.data()[i]).epsilon(1e-12));

    const Mat dg = pinv(Mat(2, 2, {2, 0, 0, 0}));
    CHECK(dg(0, 0) == doctest::Approx(0.5));
    CHECK(std::abs(dg(0, 1)) + std::abs(dg(1, 0)) + std::abs(dg(1, 1)) <= 1e-12);

    Rng rng(88);
    for (int t = 0; t < 50; ++t) {
        Mat a = oracles::random_mat(rng, 2, 2);
        if (std::abs(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) < 0.05) continue;
        const Mat inv = oracles::adjugate_inverse_2x2(a);
        const Mat pa = pinv(a);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(pa.data()[i] == doctest::Approx(inv.data()[i]).epsilon(1e-8));
    }

    // rank-deficient: A A+ A = A and the other three identities to 1e-9
    for (int t = 0; t < 50; ++t) {
        const std::size_t r = 2 + std::size_t(rng.uniform() * 4.0);
        const std::size_t c = 2 + std::size_t(rng.uniform() * 4.0);
        Mat a = oracles::random_mat(rng, r, c);
        a.set_row(r - 1, a.row(0));  // duplicate a row
        const Mat ap = pinv(a);
        const Mat aapa = a * ap * a;
        const Mat apaap = ap * a * ap;
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(aapa.data()[i] == doctest::Approx(a.data()[i]).epsilon(1e-9));
        for (std::size_t i = 0; i < ap.size(); ++i)
            CHECK(apaap.data()[i] == doctest::Approx(ap.data()[i]).epsilon(1e-9));
        const Mat sym1 = a * ap;         // must be symmetric
        const Mat sym2 = ap * a;
        for (std::size_t i = 0; i < sym1.rows(); ++i)
            for (std::size_t j = 0; j < sym1.cols(); ++j)
                CHECK(sym1(i, j) == doctest::Approx(sym1(j, i)).epsilon(1e-9));
        for (std::size_t i = 0; i < sym2.rows(); ++i)
            for (std::size_t j = 0; j < sym2.cols(); ++j)
                CHECK(sym2(i, j) == doctest::Approx(sym2(j, i)).epsilon(1e-9));
    }
}

TEST_CASE("svd rejects non-finite input") {
    Mat bad(2, 2, {1.0, 2.0, std::nan(""), 4.0});
    CHECK_THROWS_AS(svd(bad), std::invalid_argument);
}
