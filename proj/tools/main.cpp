#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rrlab/constructions.hpp"
#include "rrlab/diagnostics.hpp"
#include "rrlab/experiments.hpp"
#include "rrlab/kernels.hpp"
#include "rrlab/linalg.hpp"
#include "rrlab/rng.hpp"

using namespace rrlab;
using nlohmann::json;

namespace {

// Exit contract: 0 success, 1 assertion/verification failure, 2 usage or
// config error, 3 numeric divergence.
constexpr int kExitOk = 0;
constexpr int kExitAssert = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDiverged = 3;

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("cannot read file: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot write file: " + path);
    os << text;
}

Mat mat_from_json_obj(const json& j) {
    return Mat(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
               j.at("data").get<Vec>());
}

Dataset dataset_from_file(const std::string& path) {
    const json j = json::parse(read_file(path));
    Mat x = mat_from_json_obj(j.at("x"));
    if (j.contains("labels"))
        return Dataset::classification(std::move(x), j.at("labels").get<std::vector<int>>());
    return Dataset::regression(std::move(x), mat_from_json_obj(j.at("y")));
}

Vec parse_vec(const std::string& csv) {
    Vec v;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    if (v.empty()) throw std::invalid_argument("empty vector literal");
    return v;
}

void print_rank_table(const RankReport& r) {
    std::printf("%-8s %14s %14s %14s %14s\n", "layer", "frobenius", "spectral", "stable_rank",
                "sigma/F");
    for (std::size_t l = 0; l < r.layers.size(); ++l) {
        const LayerRank& lr = r.layers[l];
        std::printf("%-8zu %14.8f %14.8f %14.8f %14.8f\n", l + 1, lr.frobenius, lr.spectral,
                    lr.stable_rank, lr.sigma_over_f);
    }
    std::printf("mean sigma/F = %.8f   harmonic mean F/sigma = %.8f", r.mean_sigma_over_f,
                r.harm_mean_f_over_sigma);
    if (r.b_star) std::printf("   balanced at B* = %.8f", *r.b_star);
    std::printf("\n");
}

int default_jobs() {
    if (const char* env = std::getenv("RELU_RANK_LAB_JOBS")) {
        const int j = std::atoi(env);
        if (j >= 1) return j;
    }
    return 1;
}

struct SimulateArgs {
    std::string dataset = "section31";
    std::string dataset_file;
    std::string init_file;
    double init_radius = 1e-4;
    std::uint64_t seed = 0;
    long steps = 300000;
    double step_size = 1e-3;
    double loss_tol = 1e-4;
    double grad_tol = 1e-10;
    std::string integrator = "euler";
    std::string loss_name = "square";
    long record_every = 1000;
    bool record_params = false;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
    Dataset d = a.dataset_file.empty() && a.dataset == "section31"
                    ? dataset_section31()
                    : dataset_from_file(a.dataset_file.empty() ? a.dataset : a.dataset_file);

    Params p0;
    if (!a.init_file.empty()) {
        p0 = params_from_json(read_file(a.init_file));
    } else {
        const std::size_t dout = d.is_classification() ? 1 : d.y_mat->rows();
        p0 = init_spherical({d.input_dim(), 2, dout}, a.init_radius, a.seed);
    }

    LossKind kind = LossKind::Square;
    if (a.loss_name == "exp") kind = LossKind::Exponential;
    else if (a.loss_name == "logistic") kind = LossKind::Logistic;
    else if (a.loss_name != "square") throw std::invalid_argument("unknown loss: " + a.loss_name);

    FlowConfig cfg;
    cfg.step = a.step_size;
    cfg.max_steps = a.steps;
    cfg.loss_tol = a.loss_tol;
    cfg.grad_tol = a.grad_tol;
    cfg.record_every = a.record_every;
    cfg.record_params = a.record_params;
    cfg.seed = a.seed;
    if (a.integrator == "rk4") cfg.integrator = Integrator::RK4;
    else if (a.integrator != "euler") throw std::invalid_argument("unknown integrator");

    const FlowResult r = run_flow(p0, d, kind, cfg);
    if (!a.out.empty()) write_file(a.out, flow_result_to_json(r) + "\n");

    std::printf("stop: %s after %ld steps, loss %.3e, grad %.3e\n", to_string(r.stop_reason),
                r.steps_taken, r.final_loss, r.final_grad_norm);
    if (cfg.integrator == Integrator::RK4) {
        std::printf("balance drift:");
        for (double b : r.balance_drift) std::printf(" %.3e", b);
        std::printf("\n");
    }
    print_rank_table(rank_report(r.params));
    return r.stop_reason == StopReason::Diverged ? kExitDiverged : kExitOk;
}

struct ConstructArgs {
    std::string what;
    std::string x1{"1,0"}, x2{"0,1"};
    std::string y{"I"};
    std::string in_file;
    std::size_t k_prime = 4;
    double B = 2.0;
    std::string dataset_file;
    std::string out;
};

int cmd_construct(const ConstructArgs& a) {
    json report;
    Params built;
    bool ok = true;

    if (a.what == "rank1") {
        const Vec x1 = parse_vec(a.x1), x2 = parse_vec(a.x2);
        Mat y = a.y == "I" ? Mat::identity(2) : Mat(2, 2, parse_vec(a.y));
        Dataset d = Dataset::regression(Mat::from_cols({x1, x2}), std::move(y));
        built = rank1_interpolator(d);

        const Mat out = forward_batch(built, d.x);
        const Mat resid = out - *d.y_mat;
        double sq = 0.0;
        for (std::size_t i = 0; i < resid.size(); ++i) sq += resid.data()[i] * resid.data()[i];
        const double fit_loss = 0.5 * sq;
        const double sigma2 = svd(built.layers[0]).s[1];
        ok = fit_loss <= 1e-10 && sigma2 <= 1e-14;
        report["fit_loss"] = fit_loss;
        report["w_sigma2"] = sigma2;
        report["w_rank"] = numerical_rank(built.layers[0]);
    } else if (a.what == "deepen-square" || a.what == "deepen-exp") {
        if (a.in_file.empty()) throw std::invalid_argument("construct: --in required");
        const Params src = params_from_json(read_file(a.in_file));
        const std::size_t k = src.depth();

        std::optional<Dataset> d;
        if (!a.dataset_file.empty()) d = dataset_from_file(a.dataset_file);

        const bool square = a.what == "deepen-square";
        built = square ? deepen_square(src, a.k_prime, a.B, d ? &*d : nullptr)
                       : deepen_classification(src, a.k_prime, a.B);

        // output preservation on probe points (the square variant only
        // promises it where the source output is non-negative)
        Rng rng(12345);
        double max_err = 0.0;
        int checked = 0;
        for (int t = 0; t < 256 && checked < 50; ++t) {
            const Vec x = rng.gaussian_vec(src.input_dim());
            const double ref = forward(src, x)[0];
            if (square && ref < 0.0) continue;
            ++checked;
            max_err = std::max(max_err, std::abs(forward(built, x)[0] - ref));
        }
        const double norm_sq = built.theta_norm_sq();
        const double e = -double(k) / double(a.k_prime);
        const double norm_bound = square
                                      ? std::pow(1.0 / (a.B * a.B), e) * double(a.k_prime)
                                      : 2.0 * std::pow(2.0 / (a.B * a.B), e) * (a.k_prime + 1.0);
        const RankReport rr = rank_report(built);
        const RatioBounds rb = square ? deep_ratio_bounds_square(a.B, k, a.k_prime)
                                      : deep_ratio_bounds_margin(a.B, k, a.k_prime);
        ok = max_err <= 1e-9 && norm_sq <= norm_bound * (1.0 + 1e-12) &&
             rr.mean_sigma_over_f >= rb.avg_lower - 1e-12;
        report["probes_checked"] = checked;
        report["max_output_error"] = max_err;
        report["theta_norm_sq"] = norm_sq;
        report["theta_norm_sq_bound"] = norm_bound;
        report["mean_sigma_over_f"] = rr.mean_sigma_over_f;
        report["avg_ratio_lower_bound"] = rb.avg_lower;
        report["harm_ratio_upper_bound"] = rb.harm_upper;
    } else {
        throw std::invalid_argument("construct: unknown variant '" + a.what + "'");
    }

    report["verified"] = ok;
    if (!a.out.empty()) write_file(a.out, params_to_json(built) + "\n");
    std::cout << report.dump(2) << "\n";
    if (ok) print_rank_table(rank_report(built));
    return ok ? kExitOk : kExitAssert;
}

struct ExperimentArgs {
    std::string name;
    std::string config_file;
    bool paper_scale = false;
    bool stratified = false;
    int jobs = 0;
    std::string out_dir;
};

int cmd_experiment(const ExperimentArgs& a) {
    ExperimentConfig cfg;
    if (!a.config_file.empty()) cfg = experiment_config_from_json(read_file(a.config_file));
    cfg.experiment = a.name;
    if (a.paper_scale) apply_paper_scale(cfg);
    if (a.stratified) cfg.stratified = true;
    if (a.jobs > 0) cfg.jobs = a.jobs;
    else if (cfg.jobs <= 0) cfg.jobs = default_jobs();
    if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;

    if (a.name == "histogram") {
        const HistogramOutcome out = run_histogram_experiment(cfg);
        std::printf("trials %d, converged %zu (fraction %.4f), bound %.4f - 3*%.4f\n", cfg.trials,
                    out.n_converged, out.converged_fraction, out.prob_lower_bound,
                    out.binom_stderr);
        std::printf("min stable rank of first layer over converged trials: %.4f (must exceed %.2f)\n",
                    out.min_stable_rank_w1, 1.0 + cfg.stable_rank_delta);
        const bool pass = out.fraction_pass && out.stable_rank_pass;
        std::printf("%s\n", pass ? "PASS" : "FAIL");
        return pass ? kExitOk : kExitAssert;
    }
    if (a.name == "thm3") {
        const Thm3Outcome out = run_thm3_experiment(cfg);
        std::printf("trials %d, converged %zu, in-event %zu (frequency %.4f), bound %.4f\n",
                    cfg.trials, out.n_converged, out.n_event, out.frequency,
                    out.intervals.prob_lower_bound);
        std::printf("%s\n", out.pass ? "PASS" : "FAIL");
        return out.pass ? kExitOk : kExitAssert;
    }
    if (a.name == "thm2") {
        const Thm2Outcome out = run_thm2_check(cfg);
        std::printf("trials %d, converged %zu, rank-deficient converged trials: %zu\n", cfg.trials,
                    out.n_converged, out.rank1_trial_ids.size());
        if (!out.pass) {
            std::printf("failing trial ids:");
            for (long id : out.rank1_trial_ids) std::printf(" %ld", id);
            std::printf("\n");
        }
        std::printf("%s\n", out.pass ? "PASS" : "FAIL");
        return out.pass ? kExitOk : kExitAssert;
    }
    if (a.name == "depth-sweep") {
        const DepthSweepOutcome out = run_depth_sweep(cfg);
        std::cout << out.csv;
        std::printf("measurement only; source B = %.6f\n", out.source_B);
        return kExitOk;
    }
    throw std::invalid_argument("unknown experiment '" + a.name + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relu-rank-lab: gradient-flow rank dynamics of small ReLU networks"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "run one gradient-flow trajectory");
    simulate->add_option("--dataset", sim.dataset, "builtin dataset name (section31)");
    simulate->add_option("--dataset-file", sim.dataset_file, "dataset JSON file");
    simulate->add_option("--init-file", sim.init_file, "initial params JSON");
    simulate->add_option("--init-radius", sim.init_radius, "spherical init radius");
    simulate->add_option("--seed", sim.seed, "init seed");
    simulate->add_option("--steps", sim.steps, "max integration steps");
    simulate->add_option("--step-size", sim.step_size, "integration step");
    simulate->add_option("--loss-tol", sim.loss_tol, "loss convergence threshold");
    simulate->add_option("--grad-tol", sim.grad_tol, "gradient norm threshold");
    simulate->add_option("--integrator", sim.integrator, "euler | rk4");
    simulate->add_option("--loss", sim.loss_name, "square | exp | logistic");
    simulate->add_option("--record-every", sim.record_every, "trajectory sampling cadence");
    simulate->add_flag("--record-params", sim.record_params, "keep parameter snapshots");
    simulate->add_option("--out", sim.out, "write FlowResult JSON here");

    ConstructArgs con;
    CLI::App* construct = app.add_subcommand("construct", "build and verify explicit networks");
    construct->add_option("what", con.what, "rank1 | deepen-square | deepen-exp")->required();
    construct->add_option("--x1", con.x1, "first input, comma separated");
    construct->add_option("--x2", con.x2, "second input");
    construct->add_option("--Y", con.y, "targets: I or 4 comma-separated entries (row-major)");
    construct->add_option("--in", con.in_file, "source network JSON");
    construct->add_option("--kprime", con.k_prime, "target depth");
    construct->add_option("--B", con.B, "per-layer Frobenius budget of the source");
    construct->add_option("--dataset-file", con.dataset_file, "data for the non-negativity check");
    construct->add_option("--out", con.out, "write built params JSON here");

    ExperimentArgs exp;
    CLI::App* experiment = app.add_subcommand("experiment", "run a Monte Carlo experiment");
    experiment->add_option("name", exp.name, "histogram | thm2 | thm3 | depth-sweep")->required();
    experiment->add_option("--config", exp.config_file, "experiment config JSON");
    experiment->add_flag("--paper-scale", exp.paper_scale, "288 trials, step 1e-4, 3e6 steps");
    experiment->add_flag("--stratified", exp.stratified, "thm3: place rows inside their regions");
    experiment->add_option("--jobs", exp.jobs, "worker threads (default RELU_RANK_LAB_JOBS or 1)");
    experiment->add_option("--out", exp.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (construct->parsed()) return cmd_construct(con);
        if (experiment->parsed()) return cmd_experiment(exp);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAssert;
    }
    return kExitUsage;
}
