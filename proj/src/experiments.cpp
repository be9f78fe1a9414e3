#include "rrlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "rrlab/constructions.hpp"
#include "rrlab/kernels.hpp"
#include "rrlab/linalg.hpp"
#include "rrlab/rng.hpp"

namespace rrlab {
namespace {

using nlohmann::json;

// Index-ordered parallel map: worker threads pull trial indices from an
// atomic counter but write into preassigned slots, so results (and the
// serialized stream) do not depend on the schedule or the job count.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

json mat_to_json(const Mat& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.entries()}};
}

Mat mat_from_json(const json& j) {
    return Mat(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
               j.at("data").get<Vec>());
}

void check_assumptions(const Dataset& d) {
    if (d.input_dim() != 2 || d.n() != 2 || !d.y_mat)
        throw std::invalid_argument("experiment: dataset must be 2 planar regression points");
    const Vec x1 = d.input(0), x2 = d.input(1);
    if (std::abs(norm(x1) - 1.0) > 1e-9 || std::abs(norm(x2) - 1.0) > 1e-9)
        throw std::invalid_argument("experiment: inputs must have unit norm");
    const Vec y1 = d.y_mat->col(0), y2 = d.y_mat->col(1);
    if (std::abs(norm(y1) - 1.0) > 1e-9 || std::abs(norm(y2) - 1.0) > 1e-9)
        throw std::invalid_argument("experiment: targets must have unit norm");
    if (numerical_rank(*d.y_mat, 1e-8) != 2)
        throw std::invalid_argument("experiment: targets must be linearly independent");
    const double a = angle(x1, x2);
    constexpr double half_pi = 1.5707963267948966;
    if (!(a > half_pi && a < 2.0 * half_pi))
        throw std::invalid_argument("experiment: input angle must be in (pi/2, pi)");
}

std::vector<std::string> region_labels(const Mat& w1, const Vec& x1, const Vec& x2) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < w1.rows(); ++i)
        out.push_back(to_string(classify(w1.row(i), x1, x2)));
    return out;
}

TrialRecord make_record(long id, std::uint64_t seed, const ExperimentConfig& cfg,
                        const Params& init, const FlowResult& fr, const Dataset& d,
                        const std::optional<EventIntervals>& iv, double slack) {
    TrialRecord t;
    t.trial_id = id;
    t.seed = seed;
    t.init_radius = cfg.init_radius;
    const Mat& w1 = init.layers.front();
    const Mat& wlast = init.layers.back();
    for (std::size_t i = 0; i < w1.rows(); ++i) t.init_w_row_norms.push_back(norm(w1.row(i)));
    for (std::size_t j = 0; j < wlast.cols(); ++j)
        t.init_v_col_norms.push_back(norm(wlast.col(j)));
    if (d.input_dim() == 2 && d.n() == 2) {
        const Vec x1 = d.input(0), x2 = d.input(1);
        t.region_initial = region_labels(w1, x1, x2);
        t.region_final = region_labels(fr.params.layers.front(), x1, x2);
    }
    t.converged = fr.converged;
    t.stop_reason = to_string(fr.stop_reason);
    t.final_loss = fr.final_loss;
    t.steps = fr.steps_taken;
    try {
        t.ranks = rank_report(fr.params);
    } catch (const std::exception&) {
        t.ranks = std::nullopt;  // a layer collapsed to exact zero
    }
    if (iv && fr.params.depth() == 2 && fr.params.layers.front().rows() == 2 &&
        fr.params.layers.front().cols() == 2)
        t.event_flag = check_event(fr, *iv, slack).in_event;
    return t;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << text;
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

void write_trials(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records) {
    if (cfg.out_dir.empty()) return;
    std::filesystem::create_directories(cfg.out_dir);
    std::ostringstream os;
    for (const TrialRecord& t : records) os << trial_record_to_json(t) << '\n';
    write_text(std::filesystem::path(cfg.out_dir) / "trials.jsonl", os.str());
}

void write_summary(const ExperimentConfig& cfg, const json& summary) {
    if (cfg.out_dir.empty()) return;
    std::filesystem::create_directories(cfg.out_dir);
    write_text(std::filesystem::path(cfg.out_dir) / "summary.json", summary.dump(2) + "\n");
}

double stable_rank_of(const TrialRecord& t, std::size_t layer) {
    if (!t.ranks || layer >= t.ranks->layers.size()) return std::nan("");
    return t.ranks->layers[layer].stable_rank;
}

// Gradient descent on loss + lambda * ||theta||^2 (full batch).
FlowResult weight_decay_gd(const Params& p0, const Dataset& d, double lambda, double step,
                           long steps) {
    FlowResult res;
    res.params = p0;
    Params& p = res.params;
    GradWorkspace ws;
    double value = 0.0;
    for (long s = 0; s < steps; ++s) {
        value = ws.loss_and_grad(p, d, LossKind::Square);
        if (!std::isfinite(value) || value > 1e12) {
            res.stop_reason = StopReason::Diverged;
            res.final_loss = value;
            res.steps_taken = s;
            return res;
        }
        // theta <- theta - step * (grad L + 2 lambda theta)
        for (std::size_t l = 0; l < p.layers.size(); ++l) {
            double* w = p.layers[l].data();
            kernels::scal(p.layers[l].size(), 1.0 - 2.0 * step * lambda, w);
            kernels::axpy(p.layers[l].size(), -step, ws.grads()[l].data(), w);
        }
    }
    res.final_loss = loss(p, d, LossKind::Square);
    res.steps_taken = steps;
    res.stop_reason = StopReason::MaxSteps;
    res.converged = res.final_loss <= 1e-4;
    return res;
}

}  // namespace

Dataset dataset_section31() {
    const double s = std::sqrt(1.0 + 0.99 * 0.99);
    Mat x(2, 2);
    x(0, 0) = 1.0 / s;
    x(1, 0) = 0.99 / s;
    x(0, 1) = -1.0 / s;
    x(1, 1) = 0.99 / s;
    return Dataset::regression(std::move(x), Mat::identity(2));
}

std::string trial_record_to_json(const TrialRecord& t) {
    json j;
    j["trial_id"] = t.trial_id;
    j["seed"] = t.seed;
    j["init"] = {{"radius", t.init_radius},
                 {"w_row_norms", t.init_w_row_norms},
                 {"v_col_norms", t.init_v_col_norms}};
    if (!t.region_initial.empty())
        j["regions"] = {{"initial", t.region_initial}, {"final", t.region_final}};
    j["converged"] = t.converged;
    j["stop_reason"] = t.stop_reason;
    j["final_loss"] = t.final_loss;
    j["steps"] = t.steps;
    j["rank_report"] = t.ranks ? json::parse(rank_report_to_json(*t.ranks)) : json();
    if (t.event_flag) j["event"] = *t.event_flag;
    return j.dump();
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig cfg;
    cfg.schema_version = j.value("schema_version", 1);
    if (cfg.schema_version != 1)
        throw std::invalid_argument("experiment config: unsupported schema_version");
    cfg.experiment = j.value("experiment", cfg.experiment);
    cfg.dataset = j.value("dataset", cfg.dataset);
    if (j.contains("x")) cfg.x_explicit = mat_from_json(j.at("x"));
    if (j.contains("y")) cfg.y_explicit = mat_from_json(j.at("y"));
    cfg.trials = j.value("trials", cfg.trials);
    cfg.init_radius = j.value("init_radius", cfg.init_radius);
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    if (j.contains("flow")) {
        const json& f = j.at("flow");
        cfg.flow.step = f.value("step", cfg.flow.step);
        cfg.flow.max_steps = f.value("max_steps", cfg.flow.max_steps);
        cfg.flow.loss_tol = f.value("loss_tol", cfg.flow.loss_tol);
        cfg.flow.grad_tol = f.value("grad_tol", cfg.flow.grad_tol);
        cfg.flow.record_every = f.value("record_every", cfg.flow.record_every);
        const std::string integ = f.value("integrator", std::string("euler"));
        if (integ == "euler") cfg.flow.integrator = Integrator::Euler;
        else if (integ == "rk4") cfg.flow.integrator = Integrator::RK4;
        else throw std::invalid_argument("experiment config: unknown integrator");
    }
    cfg.stable_rank_delta = j.value("stable_rank_delta", cfg.stable_rank_delta);
    cfg.hist_bins = j.value("hist_bins", cfg.hist_bins);
    cfg.stratified = j.value("stratified", cfg.stratified);
    cfg.radius_fraction = j.value("radius_fraction", cfg.radius_fraction);
    cfg.event_slack = j.value("event_slack", cfg.event_slack);
    if (j.contains("depths")) cfg.depths = j.at("depths").get<std::vector<std::size_t>>();
    cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
    cfg.use_constructions = j.value("use_constructions", cfg.use_constructions);
    cfg.sweep_steps = j.value("sweep_steps", cfg.sweep_steps);
    cfg.sweep_step_size = j.value("sweep_step_size", cfg.sweep_step_size);
    cfg.sweep_init_radius = j.value("sweep_init_radius", cfg.sweep_init_radius);
    return cfg;
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["experiment"] = cfg.experiment;
    j["dataset"] = cfg.dataset;
    if (cfg.x_explicit) j["x"] = mat_to_json(*cfg.x_explicit);
    if (cfg.y_explicit) j["y"] = mat_to_json(*cfg.y_explicit);
    j["trials"] = cfg.trials;
    j["init_radius"] = cfg.init_radius;
    j["jobs"] = cfg.jobs;
    j["master_seed"] = cfg.master_seed;
    j["out_dir"] = cfg.out_dir;
    j["flow"] = {{"step", cfg.flow.step},
                 {"max_steps", cfg.flow.max_steps},
                 {"loss_tol", cfg.flow.loss_tol},
                 {"grad_tol", cfg.flow.grad_tol},
                 {"record_every", cfg.flow.record_every},
                 {"integrator", cfg.flow.integrator == Integrator::RK4 ? "rk4" : "euler"}};
    j["stable_rank_delta"] = cfg.stable_rank_delta;
    j["hist_bins"] = cfg.hist_bins;
    j["stratified"] = cfg.stratified;
    j["radius_fraction"] = cfg.radius_fraction;
    j["event_slack"] = cfg.event_slack;
    j["depths"] = cfg.depths;
    j["weight_decay"] = cfg.weight_decay;
    j["use_constructions"] = cfg.use_constructions;
    j["sweep_steps"] = cfg.sweep_steps;
    j["sweep_step_size"] = cfg.sweep_step_size;
    j["sweep_init_radius"] = cfg.sweep_init_radius;
    return j.dump(2);
}

void apply_paper_scale(ExperimentConfig& cfg) {
    cfg.trials = 288;
    cfg.flow.step = 1e-4;
    cfg.flow.max_steps = 3000000;
    cfg.init_radius = 1e-4;
}

Dataset resolve_dataset(const ExperimentConfig& cfg) {
    if (cfg.x_explicit) {
        if (!cfg.y_explicit)
            throw std::invalid_argument("experiment config: explicit x without y");
        return Dataset::regression(*cfg.x_explicit, *cfg.y_explicit);
    }
    if (cfg.dataset == "section31") return dataset_section31();
    throw std::invalid_argument("experiment config: unknown dataset '" + cfg.dataset + "'");
}

HistogramOutcome run_histogram_experiment(const ExperimentConfig& cfg) {
    const Dataset d = resolve_dataset(cfg);
    check_assumptions(d);
    const Vec x1 = d.input(0), x2 = d.input(1);
    const EventIntervals iv = event_intervals(x1, x2);

    HistogramOutcome out;
    out.records.resize(cfg.trials);
    parallel_for(cfg.trials, cfg.jobs, [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::uint64_t seed = split_seed(cfg.master_seed, i);
        const Params init = init_spherical({2, 2, 2}, cfg.init_radius, seed);
        FlowConfig fc = cfg.flow;
        fc.seed = seed;
        const FlowResult fr = run_flow(init, d, LossKind::Square, fc);
        out.records[i] = make_record(long(i), seed, cfg, init, fr, d, iv, 0.0);
        out.records[i].wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
    });

    out.prob_lower_bound = iv.prob_lower_bound;
    double min_sr = std::numeric_limits<double>::infinity();
    for (const TrialRecord& t : out.records) {
        if (!t.converged) continue;
        ++out.n_converged;
        const double sr = stable_rank_of(t, 0);
        if (std::isfinite(sr)) min_sr = std::min(min_sr, sr);
    }
    out.converged_fraction = cfg.trials > 0 ? double(out.n_converged) / cfg.trials : 0.0;
    out.binom_stderr =
        cfg.trials > 0
            ? std::sqrt(out.converged_fraction * (1.0 - out.converged_fraction) / cfg.trials)
            : 0.0;
    out.fraction_pass = cfg.trials == 0 ||
                        out.converged_fraction >= out.prob_lower_bound - 3.0 * out.binom_stderr;
    out.min_stable_rank_w1 = min_sr;

    out.n_rank2 = 0;
    bool all_rank2 = true;
    for (const TrialRecord& t : out.records) {
        if (!t.converged) continue;
        // numerical rank from the recorded singular data: stable rank of a
        // 2x2 equals 1 only in the rank-1 limit; use the spectral/frobenius
        // pair to recover sigma_2 > tol * sigma_1
        if (!t.ranks) {
            all_rank2 = false;
            continue;
        }
        const LayerRank& lr = t.ranks->layers[0];
        const double s1 = lr.spectral;
        const double s2sq = std::max(0.0, lr.frobenius * lr.frobenius - s1 * s1);
        if (std::sqrt(s2sq) > 1e-8 * s1) ++out.n_rank2;
        else all_rank2 = false;
    }
    out.stable_rank_pass = out.n_converged == 0 ||
                           (all_rank2 && min_sr > 1.0 + cfg.stable_rank_delta);

    write_trials(cfg, out.records);

    if (!cfg.out_dir.empty()) {
        // stable-rank histogram over converged trials, one block per layer
        std::ostringstream hist;
        hist.precision(17);
        hist << "layer,bin_lo,bin_hi,count\n";
        const double lo = 1.0, hi = 2.0;
        for (std::size_t layer = 0; layer < 2; ++layer) {
            std::vector<long> counts(cfg.hist_bins, 0);
            for (const TrialRecord& t : out.records) {
                if (!t.converged) continue;
                const double sr = stable_rank_of(t, layer);
                if (!std::isfinite(sr)) continue;
                int b = int((sr - lo) / (hi - lo) * cfg.hist_bins);
                b = std::clamp(b, 0, cfg.hist_bins - 1);
                ++counts[b];
            }
            for (int b = 0; b < cfg.hist_bins; ++b)
                hist << layer + 1 << ',' << lo + (hi - lo) * b / cfg.hist_bins << ','
                     << lo + (hi - lo) * (b + 1) / cfg.hist_bins << ',' << counts[b] << '\n';
        }
        write_text(std::filesystem::path(cfg.out_dir) / "histogram.csv", hist.str());

        json summary;
        summary["experiment"] = "histogram";
        summary["trials"] = cfg.trials;
        summary["n_converged"] = out.n_converged;
        summary["converged_fraction"] = out.converged_fraction;
        summary["prob_lower_bound"] = out.prob_lower_bound;
        summary["binom_stderr"] = out.binom_stderr;
        summary["fraction_pass"] = out.fraction_pass;
        summary["min_stable_rank_w1"] =
            std::isfinite(out.min_stable_rank_w1) ? json(out.min_stable_rank_w1) : json();
        summary["stable_rank_delta"] = cfg.stable_rank_delta;
        summary["stable_rank_pass"] = out.stable_rank_pass;
        summary["kernel_backend"] = kernels::active_name();
        summary["master_seed"] = cfg.master_seed;
        write_summary(cfg, summary);
    }
    return out;
}

Thm3Outcome run_thm3_experiment(const ExperimentConfig& cfg) {
    const Dataset d = resolve_dataset(cfg);
    check_assumptions(d);
    const Vec x1 = d.input(0), x2 = d.input(1);
    Thm3Outcome out;
    out.intervals = event_intervals(x1, x2);
    const double radius = cfg.radius_fraction * out.intervals.max_init_radius;
    if (!(radius > 0.0) || radius > out.intervals.max_init_radius)
        throw std::invalid_argument("thm3: radius_fraction must be in (0, 1]");

    out.records.resize(cfg.trials);
    parallel_for(cfg.trials, cfg.jobs, [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::uint64_t seed = split_seed(cfg.master_seed, i);
        Rng rng(seed);

        Mat w(2, 2);
        for (std::size_t row = 0; row < 2; ++row) {
            const RegionLabel want = row == 0 ? RegionLabel::S1 : RegionLabel::S2;
            for (int tries = 0;; ++tries) {
                const Vec v = rng.sphere(2, radius);
                if (!cfg.stratified) {
                    w.set_row(row, v);
                    break;
                }
                // strictly inside the one-sided region
                if (dot(v, x1) != 0.0 && dot(v, x2) != 0.0 && classify(v, x1, x2) == want) {
                    w.set_row(row, v);
                    break;
                }
                if (tries > 100000) throw std::runtime_error("thm3: sector sampling failed");
            }
        }
        const Params init({w, Mat(2, 2, 0.0)});

        FlowConfig fc = cfg.flow;
        fc.seed = seed;
        const FlowResult fr = run_flow(init, d, LossKind::Square, fc);
        TrialRecord t = make_record(long(i), seed, cfg, init, fr, d, out.intervals,
                                    cfg.event_slack);
        t.init_radius = radius;
        t.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        out.records[i] = std::move(t);
    });

    for (const TrialRecord& t : out.records) {
        if (t.converged) ++out.n_converged;
        if (t.event_flag && *t.event_flag) ++out.n_event;
    }
    out.frequency = cfg.trials > 0 ? double(out.n_event) / cfg.trials : 0.0;
    out.binom_stderr =
        cfg.trials > 0 ? std::sqrt(out.frequency * (1.0 - out.frequency) / cfg.trials) : 0.0;
    if (cfg.stratified)
        out.pass = out.n_event == std::size_t(cfg.trials);
    else
        out.pass = cfg.trials == 0 ||
                   out.frequency >= out.intervals.prob_lower_bound - 3.0 * out.binom_stderr;

    write_trials(cfg, out.records);
    if (!cfg.out_dir.empty()) {
        json summary;
        summary["experiment"] = "thm3";
        summary["stratified"] = cfg.stratified;
        summary["trials"] = cfg.trials;
        summary["n_converged"] = out.n_converged;
        summary["n_event"] = out.n_event;
        summary["frequency"] = out.frequency;
        summary["binom_stderr"] = out.binom_stderr;
        summary["prob_lower_bound"] = out.intervals.prob_lower_bound;
        summary["angle_interval"] = {out.intervals.angle_lo, out.intervals.angle_hi};
        summary["norm_interval"] = {out.intervals.norm_lo, out.intervals.norm_hi};
        summary["init_radius"] = cfg.radius_fraction * out.intervals.max_init_radius;
        summary["event_slack"] = cfg.event_slack;
        summary["pass"] = out.pass;
        summary["kernel_backend"] = kernels::active_name();
        summary["master_seed"] = cfg.master_seed;
        write_summary(cfg, summary);
    }
    return out;
}

Thm2Outcome run_thm2_check(const ExperimentConfig& cfg) {
    const Dataset d = resolve_dataset(cfg);
    check_assumptions(d);
    const Vec x1 = d.input(0), x2 = d.input(1);
    const double bound = init_radius_bound(x1, x2);
    if (!(cfg.init_radius < bound && cfg.init_radius < 0.5))
        throw std::invalid_argument("thm2: init_radius must be below the admissible bound");

    Thm2Outcome out;
    out.records.resize(cfg.trials);
    parallel_for(cfg.trials, cfg.jobs, [&](std::size_t i) {
        const std::uint64_t seed = split_seed(cfg.master_seed, i);
        const Params init = init_spherical({2, 2, 2}, cfg.init_radius, seed);
        FlowConfig fc = cfg.flow;
        fc.seed = seed;
        const FlowResult fr = run_flow(init, d, LossKind::Square, fc);
        out.records[i] = make_record(long(i), seed, cfg, init, fr, d, std::nullopt, 0.0);
        if (out.records[i].converged && numerical_rank(fr.params.layers.front(), 1e-8) < 2 &&
            !cfg.out_dir.empty()) {
            std::filesystem::create_directories(cfg.out_dir);
            write_text(std::filesystem::path(cfg.out_dir) /
                           ("failure_trial_" + std::to_string(i) + ".json"),
                       params_to_json(fr.params) + "\n");
        }
    });

    for (const TrialRecord& t : out.records) {
        if (!t.converged) continue;
        ++out.n_converged;
        const LayerRank* lr = t.ranks ? &t.ranks->layers[0] : nullptr;
        const double s2sq =
            lr ? std::max(0.0, lr->frobenius * lr->frobenius - lr->spectral * lr->spectral) : 0.0;
        if (!lr || std::sqrt(s2sq) <= 1e-8 * lr->spectral)
            out.rank1_trial_ids.push_back(t.trial_id);
    }
    out.pass = out.rank1_trial_ids.empty();

    write_trials(cfg, out.records);
    if (!cfg.out_dir.empty()) {
        json summary;
        summary["experiment"] = "thm2";
        summary["trials"] = cfg.trials;
        summary["n_converged"] = out.n_converged;
        summary["init_radius"] = cfg.init_radius;
        summary["init_radius_bound"] = bound;
        summary["rank1_trial_ids"] = out.rank1_trial_ids;
        summary["pass"] = out.pass;
        summary["kernel_backend"] = kernels::active_name();
        summary["master_seed"] = cfg.master_seed;
        write_summary(cfg, summary);
    }
    return out;
}

DepthSweepOutcome run_depth_sweep(const ExperimentConfig& cfg) {
    // fixed scalar-output dataset: unit inputs, targets >= 1
    Mat x(2, 2);
    x(0, 0) = 0.6;
    x(1, 0) = 0.8;
    x(0, 1) = -0.8;
    x(1, 1) = 0.6;
    Mat y(1, 2);
    y(0, 0) = 1.0;
    y(0, 1) = 1.5;
    if (cfg.x_explicit && cfg.y_explicit) {
        x = *cfg.x_explicit;
        y = *cfg.y_explicit;
    }
    const Dataset d = Dataset::regression(x, y);
    if (d.y_mat->rows() != 1)
        throw std::invalid_argument("depth-sweep: scalar targets required");
    bool anchored = false;
    for (std::size_t i = 0; i < d.n(); ++i)
        anchored = anchored || (norm(d.input(i)) <= 1.0 + 1e-12 && (*d.y_mat)(0, i) >= 1.0);
    if (!anchored)
        throw std::invalid_argument("depth-sweep: need an example with ||x|| <= 1 and y >= 1");

    // depth-2 exact fit anchoring the bound instances
    Mat w(2, 2);
    {
        const Vec x1 = d.input(0), x2 = d.input(1);
        const double n1 = norm(x1), n2 = norm(x2);
        w(0, 0) = x1[0] / n1 - x2[0] / n2;
        w(0, 1) = x1[1] / n1 - x2[1] / n2;
        w(1, 0) = -w(0, 0);
        w(1, 1) = -w(0, 1);
    }
    const Mat v = solve_output_layer(w, d);
    const Params source({w, v});
    const double B = std::max(frobenius_norm(w), frobenius_norm(v));

    DepthSweepOutcome out;
    out.source_B = B;
    for (std::size_t di = 0; di < cfg.depths.size(); ++di) {
        const std::size_t depth = cfg.depths[di];
        if (depth <= 2) throw std::invalid_argument("depth-sweep: depths must exceed 2");
        DepthSweepRow row;
        row.depth = depth;
        row.lambda = cfg.weight_decay;
        const RatioBounds rb = deep_ratio_bounds_square(B, 2, depth);
        row.avg_lower_bound = rb.avg_lower;
        row.harm_upper_bound = rb.harm_upper;

        if (cfg.use_constructions) {
            row.mode = "construction";
            const Params deep = deepen_square(source, depth, B, &d);
            const RankReport rr = rank_report(deep);
            const Mat outm = forward_batch(deep, d.x);
            const Mat r = outm - *d.y_mat;
            row.final_loss = 0.5 * kernels::sumsq(r.size(), r.data());
            row.mean_sigma_over_f = rr.mean_sigma_over_f;
            row.harm_mean_f_over_sigma = rr.harm_mean_f_over_sigma;
        } else {
            row.mode = "trained";
            std::vector<std::size_t> widths(depth + 1, 2);
            widths.front() = d.input_dim();
            widths.back() = 1;
            const Params init = init_spherical(widths, cfg.sweep_init_radius,
                                               split_seed(cfg.master_seed, 1000 + di));
            const FlowResult fr =
                weight_decay_gd(init, d, cfg.weight_decay, cfg.sweep_step_size, cfg.sweep_steps);
            row.final_loss = fr.final_loss;
            try {
                const RankReport rr = rank_report(fr.params);
                row.mean_sigma_over_f = rr.mean_sigma_over_f;
                row.harm_mean_f_over_sigma = rr.harm_mean_f_over_sigma;
            } catch (const std::exception&) {
                row.mean_sigma_over_f = std::nan("");
                row.harm_mean_f_over_sigma = std::nan("");
            }
        }
        out.rows.push_back(row);
    }

    std::ostringstream csv;
    csv.precision(17);
    csv << "depth,mode,lambda,final_loss,mean_sigma_over_f,harm_mean_f_over_sigma,"
           "avg_lower_bound,harm_upper_bound\n";
    for (const DepthSweepRow& r : out.rows)
        csv << r.depth << ',' << r.mode << ',' << r.lambda << ',' << r.final_loss << ','
            << r.mean_sigma_over_f << ',' << r.harm_mean_f_over_sigma << ','
            << r.avg_lower_bound << ',' << r.harm_upper_bound << '\n';
    out.csv = csv.str();

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        write_text(std::filesystem::path(cfg.out_dir) / "depth_sweep.csv", out.csv);
        json summary;
        summary["experiment"] = "depth-sweep";
        summary["source_B"] = out.source_B;
        summary["weight_decay"] = cfg.weight_decay;
        summary["use_constructions"] = cfg.use_constructions;
        summary["measurement_only"] = true;
        summary["kernel_backend"] = kernels::active_name();
        write_summary(cfg, summary);
    }
    return out;
}

}  // namespace rrlab
