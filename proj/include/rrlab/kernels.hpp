#pragma once

#include <cstddef>
#include <string>

// Low-level arithmetic kernels over contiguous double arrays. Every kernel
// has a scalar reference implementation and (where the build enables it) a
// vectorized variant; the active backend is chosen once at startup from the
// host CPU and can be overridden with RELU_RANK_LAB_KERNELS=scalar|simd.
//
// All matrices are row-major. gemm-style kernels overwrite C.

namespace rrlab::kernels {

struct Backend {
    const char* name;

    // y[i] += a * x[i]
    void (*axpy)(std::size_t n, double a, const double* x, double* y);
    // x[i] *= a
    void (*scal)(std::size_t n, double a, double* x);
    // out[i] = max(0, x[i])
    void (*relu)(std::size_t n, const double* x, double* out);
    // g[i] = pre[i] > 0 ? g[i] : 0   (derivative-at-kink convention: 0)
    void (*relu_mask)(std::size_t n, const double* pre, double* g);
    double (*dot)(std::size_t n, const double* x, const double* y);
    double (*sumsq)(std::size_t n, const double* x);

    // C(m x n) = A(m x k) * B(k x n)
    void (*gemm_nn)(std::size_t m, std::size_t k, std::size_t n,
                    const double* A, const double* B, double* C);
    // C(m x n) = A(m x k) * B(n x k)^T
    void (*gemm_nt)(std::size_t m, std::size_t k, std::size_t n,
                    const double* A, const double* B, double* C);
    // C(m x n) = A(k x m)^T * B(k x n)
    void (*gemm_tn)(std::size_t m, std::size_t k, std::size_t n,
                    const double* A, const double* B, double* C);
};

const Backend& scalar_backend();
#if defined(RRLAB_HAVE_SIMD_BACKEND)
const Backend& simd_backend();
#endif

// Active backend for this process. Resolved on first use: the override
// environment variable if set, otherwise the widest backend the CPU runs.
const Backend& active();

// Force a backend by name ("scalar", "simd", "auto"); throws on unknown
// names. Intended for tests and benchmarking.
void force_backend(const std::string& name);

// Name of the backend active() currently resolves to.
std::string active_name();

inline void axpy(std::size_t n, double a, const double* x, double* y) { active().axpy(n, a, x, y); }
inline void scal(std::size_t n, double a, double* x) { active().scal(n, a, x); }
inline void relu(std::size_t n, const double* x, double* out) { active().relu(n, x, out); }
inline void relu_mask(std::size_t n, const double* pre, double* g) { active().relu_mask(n, pre, g); }
inline double dot(std::size_t n, const double* x, const double* y) { return active().dot(n, x, y); }
inline double sumsq(std::size_t n, const double* x) { return active().sumsq(n, x); }
inline void gemm_nn(std::size_t m, std::size_t k, std::size_t n,
                    const double* A, const double* B, double* C) { active().gemm_nn(m, k, n, A, B, C); }
inline void gemm_nt(std::size_t m, std::size_t k, std::size_t n,
                    const double* A, const double* B, double* C) { active().gemm_nt(m, k, n, A, B, C); }
inline void gemm_tn(std::size_t m, std::size_t k, std::size_t n,
                    const double* A, const double* B, double* C) { active().gemm_tn(m, k, n, A, B, C); }

}  // namespace rrlab::kernels
