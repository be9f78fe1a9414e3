#pragma once

#include "rrlab/network.hpp"

namespace rrlab {

enum class LossKind { Square, Exponential, Logistic };

// Square: 1/2 sum_i ||N(x_i) - y_i||^2 over a regression dataset.
// Exponential/Logistic: sum_i l(y_i N(x_i)) over +-1 labels, scalar output.
double loss(const Params& p, const Dataset& d, LossKind kind);

// Reusable buffers for loss+gradient evaluation; the flow integrator calls
// this millions of times, so nothing is allocated per call after the first.
class GradWorkspace {
public:
    GradWorkspace() = default;

    // Computes the gradient into grads() and returns the loss.
    double loss_and_grad(const Params& p, const Dataset& d, LossKind kind);

    const std::vector<Mat>& grads() const { return grads_; }
    std::vector<Mat>& grads() { return grads_; }

    double grad_norm_sq() const;

private:
    void ensure_shapes(const Params& p, const Dataset& d);

    std::vector<Mat> acts_;     // acts_[l]: output of layer l (post-ReLU), acts_[k-1] = network output
    std::vector<Mat> pre_;      // pre_[l]: pre-activation of layer l
    std::vector<Mat> deltas_;
    std::vector<Mat> grads_;
    Mat out_grad_;
};

// Analytic gradient of the loss w.r.t. every weight; at ReLU kinks the
// derivative is taken as 0 (matching activation_pattern's strict test).
std::vector<Mat> grad(const Params& p, const Dataset& d, LossKind kind);

// Central finite differences per coordinate, O(h^2) away from kinks.
// Independent of the backprop path; used as the verification oracle.
std::vector<Mat> grad_fd_oracle(const Params& p, const Dataset& d, LossKind kind, double h);

// min_i y_i N(x_i) over a classification dataset with scalar output.
double margin(const Params& p, const Dataset& d);

}  // namespace rrlab
