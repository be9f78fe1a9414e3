#pragma once

#include <cstddef>
#include <vector>

namespace rrlab {

using Vec = std::vector<double>;

// Dense row-major matrix of doubles. The single carrier for weights, data
// batches and activations; sizes in this project are tiny (rarely above
// 8x8), so everything is by value.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0);
    Mat(std::size_t rows, std::size_t cols, Vec entries);

    static Mat identity(std::size_t n);
    static Mat from_rows(const std::vector<Vec>& rows);
    static Mat from_cols(const std::vector<Vec>& cols);
    static Mat col_vec(const Vec& v);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return e_.size(); }
    bool empty() const { return e_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    double* data() { return e_.data(); }
    const double* data() const { return e_.data(); }
    const Vec& entries() const { return e_; }

    Vec row(std::size_t i) const;
    Vec col(std::size_t j) const;
    void set_row(std::size_t i, const Vec& v);
    void set_col(std::size_t j, const Vec& v);

    bool all_finite() const;

    bool operator==(const Mat& other) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    Vec e_;
};

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(double c, const Mat& a);
Mat operator*(const Mat& a, const Mat& b);  // gemm_nn

Mat matmul_nt(const Mat& a, const Mat& b);  // a * b^T
Mat matmul_tn(const Mat& a, const Mat& b);  // a^T * b
Mat transpose(const Mat& a);
Mat hadamard(const Mat& a, const Mat& b);

// Vector helpers (on contiguous Vec).
double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
Vec matvec(const Mat& a, const Vec& x);

}  // namespace rrlab
