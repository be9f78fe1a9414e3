#include "rrlab/mat.hpp"

#include <cmath>
#include <stdexcept>

#include "rrlab/kernels.hpp"

namespace rrlab {

Mat::Mat(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), e_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("Mat: zero dimension");
}

Mat::Mat(std::size_t rows, std::size_t cols, Vec entries)
    : rows_(rows), cols_(cols), e_(std::move(entries)) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("Mat: zero dimension");
    if (e_.size() != rows * cols) throw std::invalid_argument("Mat: entries length != rows*cols");
}

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::from_rows(const std::vector<Vec>& rows) {
    if (rows.empty()) throw std::invalid_argument("Mat::from_rows: empty");
    Mat m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) m.set_row(i, rows[i]);
    return m;
}

Mat Mat::from_cols(const std::vector<Vec>& cols) {
    if (cols.empty()) throw std::invalid_argument("Mat::from_cols: empty");
    Mat m(cols[0].size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) m.set_col(j, cols[j]);
    return m;
}

Mat Mat::col_vec(const Vec& v) {
    Mat m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
}

Vec Mat::row(std::size_t i) const {
    return Vec(e_.begin() + i * cols_, e_.begin() + (i + 1) * cols_);
}

Vec Mat::col(std::size_t j) const {
    Vec v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void Mat::set_row(std::size_t i, const Vec& v) {
    if (v.size() != cols_) throw std::invalid_argument("Mat::set_row: length mismatch");
    std::copy(v.begin(), v.end(), e_.begin() + i * cols_);
}

void Mat::set_col(std::size_t j, const Vec& v) {
    if (v.size() != rows_) throw std::invalid_argument("Mat::set_col: length mismatch");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

bool Mat::all_finite() const {
    for (double x : e_)
        if (!std::isfinite(x)) return false;
    return true;
}

namespace {
void check_same_shape(const Mat& a, const Mat& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
}
}  // namespace

Mat operator+(const Mat& a, const Mat& b) {
    check_same_shape(a, b, "Mat+");
    Mat c = a;
    kernels::axpy(c.size(), 1.0, b.data(), c.data());
    return c;
}

Mat operator-(const Mat& a, const Mat& b) {
    check_same_shape(a, b, "Mat-");
    Mat c = a;
    kernels::axpy(c.size(), -1.0, b.data(), c.data());
    return c;
}

Mat operator*(double c, const Mat& a) {
    Mat r = a;
    kernels::scal(r.size(), c, r.data());
    return r;
}

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("Mat*: inner dimension mismatch");
    Mat c(a.rows(), b.cols());
    kernels::gemm_nn(a.rows(), a.cols(), b.cols(), a.data(), b.data(), c.data());
    return c;
}

Mat matmul_nt(const Mat& a, const Mat& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("matmul_nt: inner dimension mismatch");
    Mat c(a.rows(), b.rows());
    kernels::gemm_nt(a.rows(), a.cols(), b.rows(), a.data(), b.data(), c.data());
    return c;
}

Mat matmul_tn(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("matmul_tn: inner dimension mismatch");
    Mat c(a.cols(), b.cols());
    kernels::gemm_tn(a.cols(), a.rows(), b.cols(), a.data(), b.data(), c.data());
    return c;
}

Mat transpose(const Mat& a) {
    Mat t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Mat hadamard(const Mat& a, const Mat& b) {
    check_same_shape(a, b, "hadamard");
    Mat c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] *= b.data()[i];
    return c;
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    return kernels::dot(a.size(), a.data(), b.data());
}

double norm(const Vec& a) { return std::sqrt(kernels::sumsq(a.size(), a.data())); }

Vec matvec(const Mat& a, const Vec& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: length mismatch");
    Vec y(a.rows());
    kernels::gemm_nn(a.rows(), a.cols(), 1, a.data(), x.data(), y.data());
    return y;
}

}  // namespace rrlab
