#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rrlab/mat.hpp"

namespace rrlab {

// Fully-connected ReLU network, bias-free: weight matrices W(1)..W(k) with
// ReLU after every layer except the last. Layer l maps width(l-1) -> width(l),
// so layers[l].cols() must equal layers[l-1].rows().
struct Params {
    std::vector<Mat> layers;

    Params() = default;
    explicit Params(std::vector<Mat> ls);

    std::size_t depth() const { return layers.size(); }
    std::size_t input_dim() const { return layers.front().cols(); }
    std::size_t output_dim() const { return layers.back().rows(); }
    std::vector<std::size_t> widths() const;

    // l2 norm of all weights viewed as one vector
    double theta_norm_sq() const;
    double theta_norm() const;

    void validate() const;  // throws on shape-chain violations or depth < 2
};

// Two-point-or-more dataset: inputs as columns of x; targets are either a
// matrix (regression) or +-1 labels (binary classification).
struct Dataset {
    Mat x;                         // d_in x n
    std::optional<Mat> y_mat;      // d_out x n
    std::vector<int> labels;       // n entries of +-1 (classification)

    static Dataset regression(Mat x, Mat y);
    static Dataset classification(Mat x, std::vector<int> labels);

    std::size_t n() const { return x.cols(); }
    std::size_t input_dim() const { return x.rows(); }
    bool is_classification() const { return !labels.empty(); }
    Vec input(std::size_t i) const { return x.col(i); }
};

Vec forward(const Params& p, const Vec& x);
Mat forward_batch(const Params& p, const Mat& x);

// Per-layer activation masks for the hidden layers (true iff the
// pre-activation is strictly positive; an exact zero counts as inactive).
std::vector<std::vector<bool>> activation_pattern(const Params& p, const Vec& x);

// Multiply every layer by c > 0; outputs scale by c^depth.
Params scale(const Params& p, double c);

// JSON round-trip: {"layers":[{"rows":..,"cols":..,"data":[..]}]}
std::string params_to_json(const Params& p);
Params params_from_json(const std::string& text);

}  // namespace rrlab
