#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rrlab/constructions.hpp"
#include "rrlab/experiments.hpp"
#include "rrlab/flow.hpp"
#include "rrlab/kernels.hpp"

using namespace rrlab;

TEST_CASE("run_flow: a global minimum stops immediately") {
    Dataset d = Dataset::regression(Mat::from_cols({{1.0, 0.0}, {0.0, 1.0}}), Mat::identity(2));
    const Params p = rank1_interpolator(d);
    FlowConfig cfg;
    cfg.loss_tol = 1e-10;
    const FlowResult r = run_flow(p, d, LossKind::Square, cfg);
    CHECK(r.converged);
    CHECK(r.steps_taken == 0);
    CHECK(r.stop_reason == StopReason::LossTol);
}

TEST_CASE("run_flow: euler equals explicit gradient descent bitwise") {
    Rng rng(99);
    const Params p0 = oracles::random_net(rng, {2, 2, 2}, 0.4);
    Dataset d = dataset_section31();

    FlowConfig cfg;
    cfg.step = 1e-2;
    cfg.max_steps = 500;
    cfg.loss_tol = 1e-300;  // never triggers
    cfg.grad_tol = 0.0;
    const FlowResult r = run_flow(p0, d, LossKind::Square, cfg);
    REQUIRE(r.steps_taken == 500);

    Params manual = p0;
    GradWorkspace ws;
    for (int s = 0; s < 500; ++s) {
        ws.loss_and_grad(manual, d, LossKind::Square);
        for (std::size_t l = 0; l < manual.layers.size(); ++l)
            kernels::axpy(manual.layers[l].size(), -cfg.step, ws.grads()[l].data(),
                          manual.layers[l].data());
    }
    for (std::size_t l = 0; l < manual.layers.size(); ++l)
        CHECK(r.params.layers[l] == manual.layers[l]);
}

TEST_CASE("run_flow: recorded square-loss sequence is non-increasing at a stable step") {
    Rng rng(7);
    const Params p0 = oracles::random_net(rng, {2, 2, 2}, 0.3);
    Dataset d = dataset_section31();
    FlowConfig cfg;
    cfg.step = 1e-3;
    cfg.max_steps = 50000;
    cfg.record_every = 100;
    const FlowResult r = run_flow(p0, d, LossKind::Square, cfg);
    for (std::size_t i = 1; i < r.trajectory.size(); ++i)
        CHECK(r.trajectory[i].loss <= r.trajectory[i - 1].loss + 1e-12);
}

TEST_CASE("run_flow: single-neuron system tracks a fine-step reference") {
    // one example, one hidden neuron, active regime: state (w, v) follows
    //   dw/dt = -v (v w x - y) x,  dv/dt = -w x (v w x - y)
    // with scalar data x=1, y=1 and scalar "matrices" stacked to depth 2.
    const double x = 1.0, y = 1.0;
    const double w0 = 0.3, v0 = 0.1;
    Dataset d = Dataset::regression(Mat(1, 1, x), Mat(1, 1, y));
    const Params p0({Mat(1, 1, w0), Mat(1, 1, v0)});

    FlowConfig cfg;
    cfg.step = 1e-2;
    cfg.max_steps = 1000;  // horizon 10
    cfg.loss_tol = 1e-300;
    cfg.grad_tol = 0.0;
    cfg.integrator = Integrator::RK4;
    const FlowResult r = run_flow(p0, d, LossKind::Square, cfg);
    REQUIRE(r.steps_taken == 1000);

    Vec state{w0, v0};
    oracles::reference_rk4(state, 10.0, 1e-4, [&](const Vec& s) {
        const double resid = s[1] * s[0] * x - y;
        return Vec{-s[1] * resid * x, -s[0] * x * resid};
    });
    CHECK(r.params.layers[0](0, 0) == doctest::Approx(state[0]).epsilon(1e-8));
    CHECK(r.params.layers[1](0, 0) == doctest::Approx(state[1]).epsilon(1e-8));
}

TEST_CASE("run_flow: divergence guard flags exploding euler runs") {
    // absurdly large step makes GD explode on this problem
    Rng rng(3);
    const Params p0 = oracles::random_net(rng, {2, 2, 2}, 2.0);
    Dataset d = dataset_section31();
    FlowConfig cfg;
    cfg.step = 1e4;
    cfg.max_steps = 10000;
    const FlowResult r = run_flow(p0, d, LossKind::Square, cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.stop_reason == StopReason::Diverged);
}

TEST_CASE("balance_invariant: fixed values") {
    // balanced: all layer Frobenius norms equal
    const Params b({Mat(2, 2, 0.5), Mat(2, 2, 0.5)});
    for (double v : balance_invariant(b)) CHECK(v == doctest::Approx(0.0));

    // ||W1||_F = 0.3, ||W2||_F = 0.1 -> 0.09 - 0.01 = 0.08
    Mat w1(2, 2, 0.0), w2(2, 2, 0.0);
    w1(0, 0) = 0.3;
    w2(0, 0) = 0.1;
    const Params p({w1, w2});
    const auto bal = balance_invariant(p);
    REQUIRE(bal.size() == 1);
    CHECK(bal[0] == doctest::Approx(0.08));
}

TEST_CASE("neuron_balance_invariant: fixed values") {
    Mat w1(2, 2, {3.0, 4.0, 1.0, 0.0});   // row norms^2: 25, 1
    Mat w2(2, 2, {1.0, 2.0, 2.0, 0.0});   // col norms^2: 5, 4
    const Params p({w1, w2});
    const auto nb = neuron_balance_invariant(p);
    REQUIRE(nb.size() == 1);
    CHECK(nb[0][0] == doctest::Approx(20.0));
    CHECK(nb[0][1] == doctest::Approx(-3.0));
}

TEST_CASE("conservation: rk4 drift is tiny and improves at least 8x when halving h") {
    const oracles::FlowCase fc = oracles::smooth_positive_case(12);

    auto drift_at = [&](double h) {
        FlowConfig cfg;
        cfg.step = h;
        cfg.max_steps = std::lround(10.0 / h);
        cfg.loss_tol = 1e-300;
        cfg.grad_tol = 0.0;
        cfg.integrator = Integrator::RK4;
        cfg.record_every = 1;
        cfg.record_params = true;
        const FlowResult r = run_flow(fc.p, fc.d, LossKind::Square, cfg);
        REQUIRE(oracles::pattern_constant(r, fc.d));  // premise of the order claim
        double worst = 0.0;
        for (double b : r.balance_drift) worst = std::max(worst, b);
        return worst;
    };

    const double d1 = drift_at(0.05);
    const double d2 = drift_at(0.025);
    CHECK(d1 < 1e-6);
    if (d1 > 1e-13) CHECK(d1 / d2 >= 8.0);
}

TEST_CASE("conservation: neuron-level balance under rk4") {
    Rng rng(13);
    const Params p0 = oracles::random_net(rng, {2, 2, 2}, 0.5);
    Dataset d = dataset_section31();
    FlowConfig cfg;
    cfg.step = 0.01;
    cfg.max_steps = 1000;
    cfg.loss_tol = 1e-300;
    cfg.grad_tol = 0.0;
    cfg.integrator = Integrator::RK4;
    const FlowResult r = run_flow(p0, d, LossKind::Square, cfg);
    const auto before = neuron_balance_invariant(p0);
    const auto after = neuron_balance_invariant(r.params);
    for (std::size_t l = 0; l < before.size(); ++l)
        for (std::size_t i = 0; i < before[l].size(); ++i)
            CHECK(after[l][i] == doctest::Approx(before[l][i]).epsilon(1e-8));
}

TEST_CASE("init_spherical: radii, determinism, zero radius") {
    const Params z = init_spherical({2, 2, 2}, 0.0, 5);
    for (const Mat& m : z.layers)
        for (std::size_t i = 0; i < m.size(); ++i) CHECK(m.data()[i] == 0.0);

    const Params a = init_spherical({2, 2, 2}, 1e-4, 42);
    const Params b = init_spherical({2, 2, 2}, 1e-4, 42);
    for (std::size_t l = 0; l < 2; ++l) CHECK(a.layers[l] == b.layers[l]);
    const Params c = init_spherical({2, 2, 2}, 1e-4, 43);
    CHECK(a.layers[0] != c.layers[0]);

    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(norm(a.layers[0].row(i)) == doctest::Approx(1e-4).epsilon(1e-8));
        CHECK(norm(a.layers[1].col(i)) == doctest::Approx(1e-4).epsilon(1e-8));
    }

    // general-depth variant: per-layer Frobenius norm equals the radius
    const Params deep = init_spherical({2, 2, 2, 1}, 0.5, 7);
    for (const Mat& m : deep.layers) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) s += m.data()[i] * m.data()[i];
        CHECK(std::sqrt(s) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("flow_result json has the documented fields") {
    Dataset d = Dataset::regression(Mat::from_cols({{1.0, 0.0}, {0.0, 1.0}}), Mat::identity(2));
    const Params p = rank1_interpolator(d);
    FlowConfig cfg;
    const FlowResult r = run_flow(p, d, LossKind::Square, cfg);
    const std::string j = flow_result_to_json(r);
    for (const char* key : {"converged", "stop_reason", "final_loss", "steps_taken",
                            "balance_drift", "params", "trajectory"})
        CHECK(j.find(key) != std::string::npos);
}
