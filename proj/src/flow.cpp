#include "rrlab/flow.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "rrlab/kernels.hpp"
#include "rrlab/linalg.hpp"
#include "rrlab/rng.hpp"

namespace rrlab {
namespace {

struct Rk4Buffers {
    std::vector<std::vector<Mat>> k;  // 4 slopes, Params-shaped
    Params stage;

    void init(const Params& p) {
        k.assign(4, {});
        for (auto& ki : k) ki = p.layers;
        stage = p;
    }
};

void copy_layers(const std::vector<Mat>& from, std::vector<Mat>& to) {
    for (std::size_t l = 0; l < from.size(); ++l)
        std::copy(from[l].data(), from[l].data() + from[l].size(), to[l].data());
}

// stage = base + c * dir
void stage_from(const Params& base, const std::vector<Mat>& dir, double c, Params& stage) {
    for (std::size_t l = 0; l < base.layers.size(); ++l) {
        std::copy(base.layers[l].data(), base.layers[l].data() + base.layers[l].size(),
                  stage.layers[l].data());
        kernels::axpy(stage.layers[l].size(), c, dir[l].data(), stage.layers[l].data());
    }
}

bool params_finite(const Params& p) {
    for (const Mat& m : p.layers)
        if (!m.all_finite()) return false;
    return true;
}

TrajectorySample make_sample(long step, double time, double value, const Params& p,
                             bool record_params) {
    TrajectorySample s;
    s.step = step;
    s.time = time;
    s.loss = value;
    for (const Mat& m : p.layers) {
        s.layer_fro.push_back(frobenius_norm(m));
        s.layer_spectral.push_back(spectral_norm(m));
    }
    s.balance = balance_invariant(p);
    if (record_params) s.params = p;
    return s;
}

}  // namespace

FlowResult run_flow(const Params& p0, const Dataset& d, LossKind kind, const FlowConfig& cfg) {
    if (!(cfg.step > 0.0)) throw std::invalid_argument("run_flow: step must be positive");
    if (!(cfg.loss_tol > 0.0) || !(cfg.grad_tol >= 0.0))
        throw std::invalid_argument("run_flow: tolerances must be positive");
    if (cfg.record_every < 1) throw std::invalid_argument("run_flow: record_every must be >= 1");
    p0.validate();

    FlowResult res;
    res.params = p0;
    Params& p = res.params;

    GradWorkspace ws;
    Rk4Buffers rk;
    if (cfg.integrator == Integrator::RK4) rk.init(p);

    const std::vector<double> balance0 = balance_invariant(p);
    res.balance_drift.assign(balance0.size(), 0.0);
    auto track_drift = [&](const std::vector<double>& now) {
        for (std::size_t i = 0; i < now.size(); ++i)
            res.balance_drift[i] = std::max(res.balance_drift[i], std::abs(now[i] - balance0[i]));
    };

    long step = 0;
    StopReason reason = StopReason::MaxSteps;
    double grad_norm = 0.0;
    double value = 0.0;

    // One loss+grad pass per step; the loss reported for a step is the value
    // at the pre-update point.
    for (; step < cfg.max_steps; ++step) {
        value = ws.loss_and_grad(p, d, kind);
        grad_norm = std::sqrt(ws.grad_norm_sq());
        if (value <= cfg.loss_tol) {
            reason = StopReason::LossTol;
            break;
        }
        if (!std::isfinite(value) || value > cfg.divergence_guard ||
            p.theta_norm_sq() > cfg.divergence_guard || !params_finite(p)) {
            reason = StopReason::Diverged;
            break;
        }
        if (grad_norm <= cfg.grad_tol) {
            reason = StopReason::GradTol;
            break;
        }
        if (step % cfg.record_every == 0) {
            res.trajectory.push_back(make_sample(step, step * cfg.step, value, p, cfg.record_params));
            track_drift(res.trajectory.back().balance);
        }

        if (cfg.integrator == Integrator::Euler) {
            for (std::size_t l = 0; l < p.layers.size(); ++l)
                kernels::axpy(p.layers[l].size(), -cfg.step, ws.grads()[l].data(),
                              p.layers[l].data());
        } else {
            const double h = cfg.step;
            copy_layers(ws.grads(), rk.k[0]);
            stage_from(p, rk.k[0], -h / 2.0, rk.stage);
            ws.loss_and_grad(rk.stage, d, kind);
            copy_layers(ws.grads(), rk.k[1]);
            stage_from(p, rk.k[1], -h / 2.0, rk.stage);
            ws.loss_and_grad(rk.stage, d, kind);
            copy_layers(ws.grads(), rk.k[2]);
            stage_from(p, rk.k[2], -h, rk.stage);
            ws.loss_and_grad(rk.stage, d, kind);
            copy_layers(ws.grads(), rk.k[3]);
            for (std::size_t l = 0; l < p.layers.size(); ++l) {
                double* w = p.layers[l].data();
                kernels::axpy(p.layers[l].size(), -h / 6.0, rk.k[0][l].data(), w);
                kernels::axpy(p.layers[l].size(), -h / 3.0, rk.k[1][l].data(), w);
                kernels::axpy(p.layers[l].size(), -h / 3.0, rk.k[2][l].data(), w);
                kernels::axpy(p.layers[l].size(), -h / 6.0, rk.k[3][l].data(), w);
            }
        }
    }

    if (step == cfg.max_steps) {
        value = loss(p, d, kind);
        if (value <= cfg.loss_tol) reason = StopReason::LossTol;
    }

    res.final_loss = value;
    res.final_grad_norm = grad_norm;
    res.steps_taken = step;
    res.stop_reason = reason;
    res.converged = std::isfinite(value) && value <= cfg.loss_tol;
    res.trajectory.push_back(make_sample(step, step * cfg.step, value, p, cfg.record_params));
    track_drift(res.trajectory.back().balance);
    return res;
}

std::vector<double> balance_invariant(const Params& p) {
    p.validate();
    std::vector<double> out;
    for (std::size_t l = 0; l + 1 < p.layers.size(); ++l) {
        const double a = kernels::sumsq(p.layers[l].size(), p.layers[l].data());
        const double b = kernels::sumsq(p.layers[l + 1].size(), p.layers[l + 1].data());
        out.push_back(a - b);
    }
    return out;
}

std::vector<std::vector<double>> neuron_balance_invariant(const Params& p) {
    p.validate();
    std::vector<std::vector<double>> out;
    for (std::size_t l = 0; l + 1 < p.layers.size(); ++l) {
        const Mat& win = p.layers[l];
        const Mat& wout = p.layers[l + 1];
        std::vector<double> per_neuron(win.rows());
        for (std::size_t i = 0; i < win.rows(); ++i) {
            const Vec in = win.row(i);
            const Vec outc = wout.col(i);
            per_neuron[i] = dot(in, in) - dot(outc, outc);
        }
        out.push_back(std::move(per_neuron));
    }
    return out;
}

Params init_spherical(const std::vector<std::size_t>& widths, double radius, std::uint64_t seed) {
    if (widths.size() < 3) throw std::invalid_argument("init_spherical: need depth >= 2");
    if (radius < 0.0) throw std::invalid_argument("init_spherical: radius must be >= 0");
    Rng rng(seed);
    std::vector<Mat> layers;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) layers.emplace_back(widths[l + 1], widths[l]);

    if (widths.size() == 3) {
        Mat& w1 = layers[0];
        Mat& w2 = layers[1];
        for (std::size_t i = 0; i < w1.rows(); ++i) w1.set_row(i, rng.sphere(w1.cols(), radius));
        for (std::size_t j = 0; j < w2.cols(); ++j) w2.set_col(j, rng.sphere(w2.rows(), radius));
    } else {
        for (Mat& w : layers) {
            Vec g = rng.gaussian_vec(w.size());
            const double gn = norm(g);
            const double c = (radius == 0.0 || gn == 0.0) ? 0.0 : radius / gn;
            for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = c * g[i];
        }
    }
    return Params(std::move(layers));
}

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::LossTol: return "loss_tol";
        case StopReason::GradTol: return "grad_tol";
        case StopReason::MaxSteps: return "max_steps";
        case StopReason::Diverged: return "diverged";
    }
    return "unknown";
}

std::string flow_result_to_json(const FlowResult& r) {
    nlohmann::json j;
    j["converged"] = r.converged;
    j["stop_reason"] = to_string(r.stop_reason);
    j["final_loss"] = r.final_loss;
    j["final_grad_norm"] = r.final_grad_norm;
    j["steps_taken"] = r.steps_taken;
    j["balance_drift"] = r.balance_drift;
    j["params"] = nlohmann::json::parse(params_to_json(r.params));
    auto traj = nlohmann::json::array();
    for (const TrajectorySample& s : r.trajectory) {
        nlohmann::json sj;
        sj["step"] = s.step;
        sj["time"] = s.time;
        sj["loss"] = s.loss;
        sj["layer_fro"] = s.layer_fro;
        sj["layer_spectral"] = s.layer_spectral;
        sj["balance"] = s.balance;
        if (s.params) sj["params"] = nlohmann::json::parse(params_to_json(*s.params));
        traj.push_back(std::move(sj));
    }
    j["trajectory"] = std::move(traj);
    return j.dump();
}

}  // namespace rrlab
