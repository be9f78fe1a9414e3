#pragma once

// Test-only oracles, deliberately independent of the library's main
// computation paths: power iteration instead of the SVD, an adjugate
// inverse, a per-column forward loop, plain summation losses, and a
// fine-step reference integrator.

#include <cmath>
#include <cstdint>
#include <functional>

#include "rrlab/flow.hpp"
#include "rrlab/gradients.hpp"
#include "rrlab/linalg.hpp"
#include "rrlab/mat.hpp"
#include "rrlab/rng.hpp"

namespace oracles {

using rrlab::Mat;
using rrlab::Vec;

// Top singular value via power iteration on A^T A.
inline double power_iteration_sigma(const Mat& a, int iters = 2000) {
    rrlab::Rng rng(99);
    Vec v = rng.gaussian_vec(a.cols());
    double nv = rrlab::norm(v);
    for (auto& x : v) x /= nv;
    const Mat at = rrlab::transpose(a);
    for (int it = 0; it < iters; ++it) {
        Vec w = rrlab::matvec(at, rrlab::matvec(a, v));
        const double nw = rrlab::norm(w);
        if (nw == 0.0) return 0.0;
        for (auto& x : w) x /= nw;
        v = std::move(w);
    }
    return rrlab::norm(rrlab::matvec(a, v));
}

// Inverse of a full-rank 2x2 by the adjugate formula.
inline Mat adjugate_inverse_2x2(const Mat& a) {
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    Mat inv(2, 2);
    inv(0, 0) = a(1, 1) / det;
    inv(0, 1) = -a(0, 1) / det;
    inv(1, 0) = -a(1, 0) / det;
    inv(1, 1) = a(0, 0) / det;
    return inv;
}

// Forward pass written as an explicit per-column, per-neuron loop.
inline Mat loop_forward(const rrlab::Params& p, const Mat& x) {
    Mat out(p.output_dim(), x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        Vec h = x.col(c);
        for (std::size_t l = 0; l < p.depth(); ++l) {
            const Mat& w = p.layers[l];
            Vec z(w.rows(), 0.0);
            for (std::size_t i = 0; i < w.rows(); ++i)
                for (std::size_t j = 0; j < w.cols(); ++j) z[i] += w(i, j) * h[j];
            if (l + 1 < p.depth())
                for (auto& v : z) v = v > 0.0 ? v : 0.0;
            h = std::move(z);
        }
        for (std::size_t i = 0; i < h.size(); ++i) out(i, c) = h[i];
    }
    return out;
}

// Losses by direct per-example summation.
inline double direct_square_loss(const rrlab::Params& p, const rrlab::Dataset& d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.n(); ++i) {
        const Vec o = rrlab::forward(p, d.input(i));
        for (std::size_t j = 0; j < o.size(); ++j) {
            const double r = o[j] - (*d.y_mat)(j, i);
            s += r * r;
        }
    }
    return 0.5 * s;
}

inline double direct_exp_loss(const rrlab::Params& p, const rrlab::Dataset& d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.n(); ++i)
        s += std::exp(-double(d.labels[i]) * rrlab::forward(p, d.input(i))[0]);
    return s;
}

inline double direct_logistic_loss(const rrlab::Params& p, const rrlab::Dataset& d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.n(); ++i)
        s += std::log(1.0 + std::exp(-double(d.labels[i]) * rrlab::forward(p, d.input(i))[0]));
    return s;
}

// Classic fourth-order step on a generic state vector; used at a much finer
// step than the system under test to serve as the reference trajectory.
inline void reference_rk4(Vec& state, double t_end, double h,
                          const std::function<Vec(const Vec&)>& deriv) {
    const long steps = std::lround(t_end / h);
    for (long s = 0; s < steps; ++s) {
        const Vec k1 = deriv(state);
        Vec tmp(state.size());
        for (std::size_t i = 0; i < state.size(); ++i) tmp[i] = state[i] + 0.5 * h * k1[i];
        const Vec k2 = deriv(tmp);
        for (std::size_t i = 0; i < state.size(); ++i) tmp[i] = state[i] + 0.5 * h * k2[i];
        const Vec k3 = deriv(tmp);
        for (std::size_t i = 0; i < state.size(); ++i) tmp[i] = state[i] + h * k3[i];
        const Vec k4 = deriv(tmp);
        for (std::size_t i = 0; i < state.size(); ++i)
            state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

// Random helpers shared by tests.
inline Mat random_mat(rrlab::Rng& rng, std::size_t r, std::size_t c, double scale = 1.0) {
    Mat m(r, c);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.gaussian();
    return m;
}

inline rrlab::Params random_net(rrlab::Rng& rng, const std::vector<std::size_t>& widths,
                                double scale = 1.0) {
    std::vector<Mat> layers;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l)
        layers.push_back(random_mat(rng, widths[l + 1], widths[l], scale));
    return rrlab::Params(std::move(layers));
}

// Random flow problem engineered to stay inside one activation pattern:
// positive weights, positive inputs and targets above the initial outputs,
// so pre-activations start positive and grow. Conservation-order tests need
// this smoothness; a kink crossing would knock the integrator's local error
// down to O(h^2).
struct FlowCase {
    rrlab::Params p;
    rrlab::Dataset d;
};

inline FlowCase smooth_positive_case(std::uint64_t seed,
                                     const std::vector<std::size_t>& widths = {2, 3, 3, 1}) {
    rrlab::Rng rng(seed);
    std::vector<Mat> layers;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        Mat m(widths[l + 1], widths[l]);
        for (std::size_t i = 0; i < m.size(); ++i)
            m.data()[i] = 0.15 + 0.35 * std::abs(rng.gaussian());
        layers.push_back(std::move(m));
    }
    rrlab::Params p(std::move(layers));

    Mat x(widths.front(), 2);
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = 0.2 + rng.uniform();
    const Mat out0 = rrlab::forward_batch(p, x);
    Mat y(widths.back(), 2);
    for (std::size_t i = 0; i < y.size(); ++i)
        y.data()[i] = out0.data()[i] * 1.5 + 0.5 + 0.5 * rng.uniform();
    return {std::move(p), rrlab::Dataset::regression(std::move(x), std::move(y))};
}

// True iff every hidden pre-activation keeps a fixed sign along the recorded
// parameter snapshots (requires record_params).
inline bool pattern_constant(const rrlab::FlowResult& r, const rrlab::Dataset& d) {
    if (r.trajectory.empty() || !r.trajectory.front().params) return false;
    std::vector<std::vector<bool>> ref;
    for (std::size_t i = 0; i < d.n(); ++i) {
        auto m = rrlab::activation_pattern(*r.trajectory.front().params, d.input(i));
        for (auto& row : m) ref.push_back(std::move(row));
    }
    for (const auto& s : r.trajectory) {
        if (!s.params) return false;
        std::vector<std::vector<bool>> cur;
        for (std::size_t i = 0; i < d.n(); ++i) {
            auto m = rrlab::activation_pattern(*s.params, d.input(i));
            for (auto& row : m) cur.push_back(std::move(row));
        }
        if (cur != ref) return false;
    }
    return true;
}

}  // namespace oracles
