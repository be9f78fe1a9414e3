#include "rrlab/kernels.hpp"

// Reference kernels. Plain loops, no tricks: these define the semantics the
// vectorized backend is tested against.

namespace rrlab::kernels {
namespace {

void axpy_scalar(std::size_t n, double a, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(std::size_t n, double a, double* x) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void relu_scalar(std::size_t n, const double* x, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_mask_scalar(std::size_t n, const double* pre, double* g) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!(pre[i] > 0.0)) g[i] = 0.0;
    }
}

double dot_scalar(std::size_t n, const double* x, const double* y) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double sumsq_scalar(std::size_t n, const double* x) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

void gemm_nn_scalar(std::size_t m, std::size_t k, std::size_t n,
                    const double* A, const double* B, double* C) {
    for (std::size_t i = 0; i < m; ++i) {
        double* c = C + i * n;
        for (std::size_t j = 0; j < n; ++j) c[j] = 0.0;
        for (std::size_t p = 0; p < k; ++p) {
            const double a = A[i * k + p];
            const double* b = B + p * n;
            for (std::size_t j = 0; j < n; ++j) c[j] += a * b[j];
        }
    }
}

void gemm_nt_scalar(std::size_t m, std::size_t k, std::size_t n,
                    const double* A, const double* B, double* C) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* a = A + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const double* b = B + j * k;
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += a[p] * b[p];
            C[i * n + j] = s;
        }
    }
}

void gemm_tn_scalar(std::size_t m, std::size_t k, std::size_t n,
                    const double* A, const double* B, double* C) {
    for (std::size_t i = 0; i < m; ++i) {
        double* c = C + i * n;
        for (std::size_t j = 0; j < n; ++j) c[j] = 0.0;
        for (std::size_t p = 0; p < k; ++p) {
            const double a = A[p * m + i];
            const double* b = B + p * n;
            for (std::size_t j = 0; j < n; ++j) c[j] += a * b[j];
        }
    }
}

}  // namespace

const Backend& scalar_backend() {
    static const Backend b{
        "scalar",
        axpy_scalar, scal_scalar, relu_scalar, relu_mask_scalar,
        dot_scalar,  sumsq_scalar,
        gemm_nn_scalar, gemm_nt_scalar, gemm_tn_scalar,
    };
    return b;
}

}  // namespace rrlab::kernels
