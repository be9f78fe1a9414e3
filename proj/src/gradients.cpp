#include "rrlab/gradients.hpp"

#include <cmath>
#include <stdexcept>

#include "rrlab/kernels.hpp"

namespace rrlab {
namespace {

void check_compat(const Params& p, const Dataset& d, LossKind kind) {
    if (d.input_dim() != p.input_dim())
        throw std::invalid_argument("loss: dataset/network input dimension mismatch");
    if (kind == LossKind::Square) {
        if (!d.y_mat) throw std::invalid_argument("loss: square loss needs regression targets");
        if (d.y_mat->rows() != p.output_dim())
            throw std::invalid_argument("loss: target/output dimension mismatch");
    } else {
        if (d.labels.empty())
            throw std::invalid_argument("loss: classification loss needs +-1 labels");
        if (p.output_dim() != 1)
            throw std::invalid_argument("loss: classification loss needs scalar output");
    }
}

// log(1 + e^z) without overflow for large |z|
double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

// 1 / (1 + e^z), evaluated in the stable branch
double inv_one_plus_exp(double z) {
    if (z > 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

}  // namespace

double loss(const Params& p, const Dataset& d, LossKind kind) {
    check_compat(p, d, kind);
    const Mat out = forward_batch(p, d.x);
    if (kind == LossKind::Square) {
        const Mat r = out - *d.y_mat;
        return 0.5 * kernels::sumsq(r.size(), r.data());
    }
    double s = 0.0;
    for (std::size_t i = 0; i < d.n(); ++i) {
        const double q = d.labels[i] * out(0, i);
        s += (kind == LossKind::Exponential) ? std::exp(-q) : softplus(-q);
    }
    return s;
}

void GradWorkspace::ensure_shapes(const Params& p, const Dataset& d) {
    const std::size_t k = p.depth(), n = d.n();
    bool ok = acts_.size() == k;
    for (std::size_t l = 0; ok && l < k; ++l)
        ok = acts_[l].rows() == p.layers[l].rows() && acts_[l].cols() == n &&
             grads_[l].cols() == p.layers[l].cols();
    if (ok) return;
    acts_.clear();
    pre_.clear();
    deltas_.clear();
    grads_.clear();
    for (std::size_t l = 0; l < k; ++l) {
        acts_.emplace_back(p.layers[l].rows(), n);
        pre_.emplace_back(p.layers[l].rows(), n);
        deltas_.emplace_back(p.layers[l].rows(), n);
        grads_.emplace_back(p.layers[l].rows(), p.layers[l].cols());
    }
    out_grad_ = Mat(p.output_dim(), n);
}

double GradWorkspace::loss_and_grad(const Params& p, const Dataset& d, LossKind kind) {
    check_compat(p, d, kind);
    ensure_shapes(p, d);
    const std::size_t k = p.depth(), n = d.n();

    // forward, caching pre-activations
    const Mat* h = &d.x;
    for (std::size_t l = 0; l < k; ++l) {
        const Mat& w = p.layers[l];
        kernels::gemm_nn(w.rows(), w.cols(), n, w.data(), h->data(), pre_[l].data());
        if (l + 1 < k) {
            kernels::relu(pre_[l].size(), pre_[l].data(), acts_[l].data());
        } else {
            acts_[l] = pre_[l];
        }
        h = &acts_[l];
    }

    // loss and d(loss)/d(output)
    double value = 0.0;
    const Mat& out = acts_[k - 1];
    if (kind == LossKind::Square) {
        out_grad_ = out - *d.y_mat;
        value = 0.5 * kernels::sumsq(out_grad_.size(), out_grad_.data());
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double y = d.labels[i];
            const double q = y * out(0, i);
            if (kind == LossKind::Exponential) {
                const double e = std::exp(-q);
                value += e;
                out_grad_(0, i) = -y * e;
            } else {
                value += softplus(-q);
                out_grad_(0, i) = -y * inv_one_plus_exp(q);
            }
        }
    }

    // backward
    deltas_[k - 1] = out_grad_;
    for (std::size_t l = k; l-- > 0;) {
        const Mat& input = (l == 0) ? d.x : acts_[l - 1];
        const Mat& delta = deltas_[l];
        kernels::gemm_nt(delta.rows(), n, input.rows(), delta.data(), input.data(),
                         grads_[l].data());
        if (l > 0) {
            const Mat& w = p.layers[l];
            kernels::gemm_tn(w.cols(), w.rows(), n, w.data(), delta.data(),
                             deltas_[l - 1].data());
            kernels::relu_mask(pre_[l - 1].size(), pre_[l - 1].data(), deltas_[l - 1].data());
        }
    }
    return value;
}

double GradWorkspace::grad_norm_sq() const {
    double s = 0.0;
    for (const Mat& g : grads_) s += kernels::sumsq(g.size(), g.data());
    return s;
}

std::vector<Mat> grad(const Params& p, const Dataset& d, LossKind kind) {
    GradWorkspace ws;
    ws.loss_and_grad(p, d, kind);
    return ws.grads();
}

std::vector<Mat> grad_fd_oracle(const Params& p, const Dataset& d, LossKind kind, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("grad_fd_oracle: h must be positive");
    Params q = p;
    std::vector<Mat> g;
    for (std::size_t l = 0; l < p.depth(); ++l) {
        Mat gl(p.layers[l].rows(), p.layers[l].cols());
        for (std::size_t idx = 0; idx < gl.size(); ++idx) {
            double& w = q.layers[l].data()[idx];
            const double saved = w;
            w = saved + h;
            const double up = loss(q, d, kind);
            w = saved - h;
            const double down = loss(q, d, kind);
            w = saved;
            gl.data()[idx] = (up - down) / (2.0 * h);
        }
        g.push_back(std::move(gl));
    }
    return g;
}

double margin(const Params& p, const Dataset& d) {
    if (!d.is_classification()) throw std::invalid_argument("margin: classification dataset required");
    if (p.output_dim() != 1) throw std::invalid_argument("margin: scalar output required");
    const Mat out = forward_batch(p, d.x);
    double m = d.labels[0] * out(0, 0);
    for (std::size_t i = 1; i < d.n(); ++i) m = std::min(m, d.labels[i] * out(0, i));
    return m;
}

}  // namespace rrlab
