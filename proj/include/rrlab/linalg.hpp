#pragma once

#include "rrlab/mat.hpp"

namespace rrlab {

// Thin SVD a = u * diag(s) * v^T with orthonormal columns in u and v and
// singular values sorted non-increasing.
struct Svd {
    Mat u;
    Vec s;
    Mat v;
};

// Closed-form path for 2x2 inputs, one-sided Jacobi otherwise. The 2x2 path
// computes the singular values as sum/difference of two hypot() terms, so an
// exactly rank-1 2x2 input yields a second singular value of exactly zero.
Svd svd(const Mat& a);

double spectral_norm(const Mat& a);
double frobenius_norm(const Mat& a);

// ||a||_F^2 / ||a||_sigma^2, in [1, min(rows, cols)]. Throws on the zero
// matrix, where the ratio is undefined.
double stable_rank(const Mat& a);

// Number of singular values above rel_tol times the largest one.
std::size_t numerical_rank(const Mat& a, double rel_tol = 1e-8);

// Angle between two nonzero vectors, in [0, pi]. The cosine is clamped to
// [-1, 1] before acos so rounding can never produce a NaN.
double angle(const Vec& u, const Vec& v);

// Moore-Penrose pseudoinverse via SVD; singular values below 1e-12 times the
// largest are treated as zero.
Mat pinv(const Mat& a);

}  // namespace rrlab
