#include "rrlab/kernels.hpp"

#include <experimental/simd>

// Vectorized kernels on std::experimental::simd. This translation unit is
// compiled with -mavx2 on x86-64, so native_simd<double> is 4 lanes wide
// there; on aarch64 the native width is the 2-lane NEON register. Runtime
// dispatch (dispatch.cpp) only selects this backend when the CPU supports
// the instruction set the unit was compiled for.

namespace stdx = std::experimental;

namespace rrlab::kernels {
namespace {

using vd = stdx::native_simd<double>;
constexpr std::size_t W = vd::size();

void axpy_simd(std::size_t n, double a, const double* x, double* y) {
    const vd va = a;
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        vd vx(x + i, stdx::element_aligned);
        vd vy(y + i, stdx::element_aligned);
        vy += va * vx;
        vy.copy_to(y + i, stdx::element_aligned);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scal_simd(std::size_t n, double a, double* x) {
    const vd va = a;
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        vd vx(x + i, stdx::element_aligned);
        vx *= va;
        vx.copy_to(x + i, stdx::element_aligned);
    }
    for (; i < n; ++i) x[i] *= a;
}

void relu_simd(std::size_t n, const double* x, double* out) {
    const vd zero = 0.0;
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        vd vx(x + i, stdx::element_aligned);
        stdx::max(vx, zero).copy_to(out + i, stdx::element_aligned);
    }
    for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_mask_simd(std::size_t n, const double* pre, double* g) {
    const vd zero = 0.0;
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        vd vp(pre + i, stdx::element_aligned);
        vd vg(g + i, stdx::element_aligned);
        stdx::where(!(vp > zero), vg) = 0.0;
        vg.copy_to(g + i, stdx::element_aligned);
    }
    for (; i < n; ++i) {
        if (!(pre[i] > 0.0)) g[i] = 0.0;
    }
}

double dot_simd(std::size_t n, const double* x, const double* y) {
    vd acc = 0.0;
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        vd vx(x + i, stdx::element_aligned);
        vd vy(y + i, stdx::element_aligned);
        acc += vx * vy;
    }
    double s = stdx::reduce(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double sumsq_simd(std::size_t n, const double* x) {
    vd acc = 0.0;
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        vd vx(x + i, stdx::element_aligned);
        acc += vx * vx;
    }
    double s = stdx::reduce(acc);
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

// Row-of-C at a time, broadcasting A(i,p): the j-loop is contiguous in both
// B and C, which keeps the same k-summation order as the scalar kernel.
void gemm_nn_simd(std::size_t m, std::size_t k, std::size_t n,
                  const double* A, const double* B, double* C) {
    for (std::size_t i = 0; i < m; ++i) {
        double* c = C + i * n;
        std::size_t j = 0;
        for (; j + W <= n; j += W) vd(0.0).copy_to(c + j, stdx::element_aligned);
        for (; j < n; ++j) c[j] = 0.0;
        for (std::size_t p = 0; p < k; ++p) {
            const vd a = A[i * k + p];
            const double* b = B + p * n;
            j = 0;
            for (; j + W <= n; j += W) {
                vd vb(b + j, stdx::element_aligned);
                vd vc(c + j, stdx::element_aligned);
                vc += a * vb;
                vc.copy_to(c + j, stdx::element_aligned);
            }
            for (; j < n; ++j) c[j] += A[i * k + p] * b[j];
        }
    }
}

void gemm_nt_simd(std::size_t m, std::size_t k, std::size_t n,
                  const double* A, const double* B, double* C) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* a = A + i * k;
        for (std::size_t j = 0; j < n; ++j) C[i * n + j] = dot_simd(k, a, B + j * k);
    }
}

void gemm_tn_simd(std::size_t m, std::size_t k, std::size_t n,
                  const double* A, const double* B, double* C) {
    for (std::size_t i = 0; i < m; ++i) {
        double* c = C + i * n;
        std::size_t j = 0;
        for (; j + W <= n; j += W) vd(0.0).copy_to(c + j, stdx::element_aligned);
        for (; j < n; ++j) c[j] = 0.0;
        for (std::size_t p = 0; p < k; ++p) {
            const vd a = A[p * m + i];
            const double* b = B + p * n;
            j = 0;
            for (; j + W <= n; j += W) {
                vd vb(b + j, stdx::element_aligned);
                vd vc(c + j, stdx::element_aligned);
                vc += a * vb;
                vc.copy_to(c + j, stdx::element_aligned);
            }
            for (; j < n; ++j) c[j] += A[p * m + i] * b[j];
        }
    }
}

}  // namespace

const Backend& simd_backend() {
    static const Backend b{
#if defined(__x86_64__) || defined(_M_X64)
        "avx2",
#elif defined(__aarch64__)
        "neon",
#else
        "simd",
#endif
        axpy_simd, scal_simd, relu_simd, relu_mask_simd,
        dot_simd,  sumsq_simd,
        gemm_nn_simd, gemm_nt_simd, gemm_tn_simd,
    };
    return b;
}

}  // namespace rrlab::kernels
