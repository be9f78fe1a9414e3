#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rrlab/gradients.hpp"

namespace rrlab {

enum class Integrator { Euler, RK4 };

// Euler with step h is exactly full-batch gradient descent with learning
// rate h; RK4 is for conservation-law measurements where Euler's O(h) drift
// would swamp the signal.
struct FlowConfig {
    double step = 1e-3;
    long max_steps = 300000;
    double loss_tol = 1e-4;
    double grad_tol = 1e-10;
    Integrator integrator = Integrator::Euler;
    long record_every = 1000;
    std::uint64_t seed = 0;
    bool record_params = false;   // keep full parameter snapshots per sample
    double divergence_guard = 1e12;
};

enum class StopReason { LossTol, GradTol, MaxSteps, Diverged };

struct TrajectorySample {
    long step = 0;
    double time = 0.0;
    double loss = 0.0;
    std::vector<double> layer_fro;
    std::vector<double> layer_spectral;
    std::vector<double> balance;           // per adjacent layer pair
    std::optional<Params> params;          // only when record_params
};

struct FlowResult {
    Params params;            // state at stop time
    bool converged = false;   // final_loss <= loss_tol
    StopReason stop_reason = StopReason::MaxSteps;
    double final_loss = 0.0;
    double final_grad_norm = 0.0;
    long steps_taken = 0;
    std::vector<TrajectorySample> trajectory;
    // max |balance(t) - balance(0)| per layer pair, over recorded samples
    std::vector<double> balance_drift;
};

// Integrates d(theta)/dt = -grad L from p0. Stops when the loss falls to
// loss_tol, the gradient norm to grad_tol, the step budget runs out, or the
// loss/parameter scale passes the divergence guard.
FlowResult run_flow(const Params& p0, const Dataset& d, LossKind kind, const FlowConfig& cfg);

// ||W(l)||_F^2 - ||W(l+1)||_F^2 for l = 1..k-1; conserved under exact flow.
std::vector<double> balance_invariant(const Params& p);

// Per hidden neuron: ||row i of W(l)||^2 - ||col i of W(l+1)||^2, also
// conserved under exact flow.
std::vector<std::vector<double>> neuron_balance_invariant(const Params& p);

// Depth-2 widths: every row of the first layer and every column of the
// second is an independent uniform point on the radius-sphere. Deeper nets:
// each layer is i.i.d. gaussian rescaled to Frobenius norm = radius.
Params init_spherical(const std::vector<std::size_t>& widths, double radius, std::uint64_t seed);

std::string flow_result_to_json(const FlowResult& r);

const char* to_string(StopReason r);

}  // namespace rrlab
