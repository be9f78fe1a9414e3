#include "rrlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rrlab/kernels.hpp"

namespace rrlab {
namespace {

constexpr double kJacobiTol = 1e-12;
constexpr double kPinvCutoff = 1e-12;

void require_finite(const Mat& a, const char* op) {
    if (!a.all_finite()) throw std::invalid_argument(std::string(op) + ": non-finite input");
}

Mat rotation(double t) {
    Mat r(2, 2);
    r(0, 0) = std::cos(t);
    r(0, 1) = -std::sin(t);
    r(1, 0) = std::sin(t);
    r(1, 1) = std::cos(t);
    return r;
}

// 2x2 decomposition as rotation * scale * rotation. With
//   e = (a00+a11)/2, f = (a00-a11)/2, g = (a10+a01)/2, h = (a10-a01)/2
// the singular values are hypot(e,h) +- hypot(f,g) and the two rotation
// angles come from the atan2 of the same pairs.
Svd svd_2x2(const Mat& a) {
    const double e = (a(0, 0) + a(1, 1)) / 2.0;
    const double f = (a(0, 0) - a(1, 1)) / 2.0;
    const double g = (a(1, 0) + a(0, 1)) / 2.0;
    const double h = (a(1, 0) - a(0, 1)) / 2.0;

    const double q = std::hypot(e, h);
    const double r = std::hypot(f, g);
    double s1 = q + r;
    double s2 = q - r;

    const double a1 = std::atan2(g, f);
    const double a2 = std::atan2(h, e);
    const double left = (a2 + a1) / 2.0;
    const double right = (a2 - a1) / 2.0;

    Svd out;
    out.u = rotation(left);
    out.v = transpose(rotation(right));
    out.s = {s1, s2};
    if (s2 < 0.0) {
        out.s[1] = -s2;
        out.v(0, 1) = -out.v(0, 1);
        out.v(1, 1) = -out.v(1, 1);
    }
    return out;
}

// One-sided Jacobi on a copy of a (rows >= cols): orthogonalize column pairs
// by right rotations accumulated into v; column norms become the singular
// values and the normalized columns the left factor.
Svd svd_jacobi(const Mat& a) {
    const std::size_t m = a.rows(), n = a.cols();
    Mat b = a;
    Mat v = Mat::identity(n);

    auto col_dot = [&](std::size_t p, std::size_t q) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += b(i, p) * b(i, q);
        return s;
    };

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double app = col_dot(p, p);
                const double aqq = col_dot(q, q);
                const double apq = col_dot(p, q);
                if (std::abs(apq) <= kJacobiTol * std::sqrt(app * aqq)) continue;
                rotated = true;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double bp = b(i, p), bq = b(i, q);
                    b(i, p) = c * bp - s * bq;
                    b(i, q) = s * bp + c * bq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }

    Vec s(n);
    for (std::size_t j = 0; j < n; ++j) s[j] = std::sqrt(col_dot(j, j));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return s[i] > s[j]; });

    Svd out;
    out.s.resize(n);
    out.u = Mat(m, n);
    out.v = Mat(n, n);
    const double smax = s[order[0]];
    const double tiny = smax > 0.0 ? smax * 1e-14 : 0.0;
    std::size_t filled = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.s[j] = s[src];
        out.v.set_col(j, v.col(src));
        if (s[src] > tiny) {
            for (std::size_t i = 0; i < m; ++i) out.u(i, j) = b(i, src) / s[src];
            filled = j + 1;
        }
    }
    // Columns for (numerically) zero singular values: complete to an
    // orthonormal set by Gram-Schmidt over the standard basis.
    for (std::size_t j = filled; j < n; ++j) {
        for (std::size_t cand = 0; cand < m; ++cand) {
            Vec u(m, 0.0);
            u[cand] = 1.0;
            for (std::size_t prev = 0; prev < j; ++prev) {
                double proj = 0.0;
                for (std::size_t i = 0; i < m; ++i) proj += out.u(i, prev) * u[i];
                for (std::size_t i = 0; i < m; ++i) u[i] -= proj * out.u(i, prev);
            }
            const double un = norm(u);
            if (un > 0.5) {
                for (std::size_t i = 0; i < m; ++i) out.u(i, j) = u[i] / un;
                break;
            }
        }
    }
    return out;
}

}  // namespace

Svd svd(const Mat& a) {
    require_finite(a, "svd");
    if (a.rows() == 2 && a.cols() == 2) return svd_2x2(a);
    if (a.rows() >= a.cols()) return svd_jacobi(a);
    Svd t = svd_jacobi(transpose(a));
    return Svd{std::move(t.v), std::move(t.s), std::move(t.u)};
}

double spectral_norm(const Mat& a) {
    require_finite(a, "spectral_norm");
    return svd(a).s[0];
}

double frobenius_norm(const Mat& a) {
    require_finite(a, "frobenius_norm");
    return std::sqrt(kernels::sumsq(a.size(), a.data()));
}

double stable_rank(const Mat& a) {
    const double sn = spectral_norm(a);
    if (sn == 0.0) throw std::invalid_argument("stable_rank: undefined stable rank (zero matrix)");
    const double fn = frobenius_norm(a);
    return (fn * fn) / (sn * sn);
}

std::size_t numerical_rank(const Mat& a, double rel_tol) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0))
        throw std::invalid_argument("numerical_rank: rel_tol must be in (0,1)");
    const Svd d = svd(a);
    const double cutoff = rel_tol * d.s[0];
    std::size_t r = 0;
    for (double sv : d.s)
        if (sv > cutoff && sv > 0.0) ++r;
    return r;
}

double angle(const Vec& u, const Vec& v) {
    const double nu = norm(u), nv = norm(v);
    if (nu == 0.0 || nv == 0.0) throw std::invalid_argument("angle: zero vector");
    const double c = std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
    return std::acos(c);
}

Mat pinv(const Mat& a) {
    require_finite(a, "pinv");
    const Svd d = svd(a);
    const double cutoff = kPinvCutoff * d.s[0];
    // v * diag(1/s) * u^T, dropping directions below the cutoff
    Mat vs = d.v;
    for (std::size_t j = 0; j < d.s.size(); ++j) {
        const double inv = (d.s[j] > cutoff && d.s[j] > 0.0) ? 1.0 / d.s[j] : 0.0;
        for (std::size_t i = 0; i < vs.rows(); ++i) vs(i, j) *= inv;
    }
    return matmul_nt(vs, d.u);
}

}  // namespace rrlab
