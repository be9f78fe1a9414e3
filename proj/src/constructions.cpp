#include "rrlab/constructions.hpp"

#include <cmath>
#include <stdexcept>

#include "rrlab/kernels.hpp"
#include "rrlab/linalg.hpp"

namespace rrlab {

Params rank1_interpolator(const Dataset& d) {
    if (d.n() != 2 || d.input_dim() != 2)
        throw std::invalid_argument("rank1_interpolator: needs 2 planar inputs");
    if (!d.y_mat) throw std::invalid_argument("rank1_interpolator: regression targets required");
    const Vec x1 = d.input(0), x2 = d.input(1);
    const double n1 = norm(x1), n2 = norm(x2);
    if (n1 == 0.0 || n2 == 0.0) throw std::invalid_argument("rank1_interpolator: zero input");
    if (angle(x1, x2) <= 0.0)
        throw std::invalid_argument("rank1_interpolator: inputs are parallel (angle 0)");

    Mat w(2, 2);
    w(0, 0) = x1[0] / n1 - x2[0] / n2;
    w(0, 1) = x1[1] / n1 - x2[1] / n2;
    w(1, 0) = -w(0, 0);
    w(1, 1) = -w(0, 1);

    Mat v = solve_output_layer(w, d);
    return Params({w, v});
}

Mat solve_output_layer(const Mat& w, const Dataset& d) {
    if (!d.y_mat) throw std::invalid_argument("solve_output_layer: regression targets required");
    if (w.cols() != d.input_dim())
        throw std::invalid_argument("solve_output_layer: shape mismatch");
    Mat acts = w * d.x;
    kernels::relu(acts.size(), acts.data(), acts.data());
    if (numerical_rank(acts, 1e-12) < d.n())
        throw std::invalid_argument("solve_output_layer: activation matrix column-rank deficient");
    return *d.y_mat * pinv(acts);
}

Params deepen_square(const Params& src, std::size_t k_prime, double B,
                     const Dataset* check_data) {
    src.validate();
    const std::size_t k = src.depth();
    if (k_prime <= k) throw std::invalid_argument("deepen_square: k_prime must exceed source depth");
    if (src.output_dim() != 1) throw std::invalid_argument("deepen_square: scalar output required");
    if (!(B > 0.0)) throw std::invalid_argument("deepen_square: B must be positive");
    for (const Mat& m : src.layers)
        if (frobenius_norm(m) > B * (1.0 + 1e-12))
            throw std::invalid_argument("deepen_square: a source layer exceeds the norm budget B");
    if (check_data) {
        const Mat out = forward_batch(src, check_data->x);
        for (std::size_t i = 0; i < out.size(); ++i)
            if (out.data()[i] < 0.0)
                throw std::invalid_argument(
                    "deepen_square: source output negative on the supplied data");
    }

    const double alpha = std::pow(1.0 / B, double(k_prime - k) / double(k_prime));
    const double beta = std::pow(1.0 / B, -double(k) / double(k_prime));

    std::vector<Mat> layers;
    for (const Mat& m : src.layers) layers.push_back(alpha * m);
    for (std::size_t l = k; l < k_prime; ++l) layers.push_back(Mat(1, 1, beta));
    return Params(std::move(layers));
}

Params deepen_classification(const Params& src, std::size_t k_prime, double B) {
    src.validate();
    const std::size_t k = src.depth();
    if (k_prime <= k)
        throw std::invalid_argument("deepen_classification: k_prime must exceed source depth");
    if (src.output_dim() != 1)
        throw std::invalid_argument("deepen_classification: scalar output required");
    if (!(B > 0.0)) throw std::invalid_argument("deepen_classification: B must be positive");

    const double alpha = std::pow(std::sqrt(2.0) / B, double(k_prime - k) / double(k_prime));
    const double beta = std::pow(std::sqrt(2.0) / B, -double(k) / double(k_prime));

    std::vector<Mat> layers;
    for (std::size_t l = 0; l + 1 < k; ++l) layers.push_back(alpha * src.layers[l]);

    // source output neuron and its negation, carried as a two-channel tail
    const Mat& u = src.layers[k - 1];  // 1 x d_{k-1}
    Mat split(2, u.cols());
    for (std::size_t j = 0; j < u.cols(); ++j) {
        split(0, j) = alpha * u(0, j);
        split(1, j) = -alpha * u(0, j);
    }
    layers.push_back(std::move(split));

    for (std::size_t l = k + 1; l < k_prime; ++l) layers.push_back(beta * Mat::identity(2));

    Mat last(1, 2);
    last(0, 0) = beta;
    last(0, 1) = -beta;
    layers.push_back(std::move(last));
    return Params(std::move(layers));
}

Params balance_layers(const Params& p) {
    p.validate();
    const std::size_t k = p.depth();
    std::vector<double> fro(k);
    double log_sum = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
        fro[l] = frobenius_norm(p.layers[l]);
        if (fro[l] == 0.0) throw std::invalid_argument("balance_layers: zero layer");
        log_sum += std::log(fro[l]);
    }
    const double target = std::exp(log_sum / double(k));
    Params q = p;
    for (std::size_t l = 0; l < k; ++l)
        kernels::scal(q.layers[l].size(), target / fro[l], q.layers[l].data());
    return q;
}

}  // namespace rrlab
