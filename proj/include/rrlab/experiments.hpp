#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rrlab/diagnostics.hpp"
#include "rrlab/flow.hpp"
#include "rrlab/geometry.hpp"

namespace rrlab {

// The two-point benchmark dataset used throughout: inputs (1, 0.99) and
// (-1, 0.99) normalized to unit length (their angle is ~1.58085 rad, just
// past a right angle), targets the standard basis of R^2.
Dataset dataset_section31();

struct TrialRecord {
    long trial_id = 0;
    std::uint64_t seed = 0;
    double init_radius = 0.0;
    std::vector<double> init_w_row_norms;
    std::vector<double> init_v_col_norms;
    std::vector<std::string> region_initial;  // per first-layer row, when d_in = n = 2
    std::vector<std::string> region_final;
    bool converged = false;
    std::string stop_reason;
    double final_loss = 0.0;
    long steps = 0;
    std::optional<RankReport> ranks;
    std::optional<bool> event_flag;  // prescribed-convergence-event membership
    double wall_ms = 0.0;            // in-memory only; never serialized
};

// One line per record; excludes wall_ms so that re-runs of the same config
// are byte-identical regardless of scheduling.
std::string trial_record_to_json(const TrialRecord& t);

struct ExperimentConfig {
    int schema_version = 1;
    std::string experiment = "histogram";  // histogram | thm2 | thm3 | depth-sweep
    std::string dataset = "section31";
    std::optional<Mat> x_explicit;
    std::optional<Mat> y_explicit;
    int trials = 64;
    FlowConfig flow;           // step 1e-3, 3e5 steps, loss_tol 1e-4 by default
    double init_radius = 1e-4;
    int jobs = 1;
    std::uint64_t master_seed = 17;
    std::string out_dir;       // empty: keep results in memory only

    // histogram
    double stable_rank_delta = 0.05;  // converged stable ranks must clear 1 + delta
    int hist_bins = 20;

    // thm3
    bool stratified = false;
    double radius_fraction = 0.9;  // of the admissible event radius
    double event_slack = 1e-3;     // interval slack absorbing discretization

    // depth-sweep
    std::vector<std::size_t> depths = {3, 5, 8};
    double weight_decay = 1e-4;
    bool use_constructions = false;
    long sweep_steps = 200000;
    double sweep_step_size = 1e-2;
    double sweep_init_radius = 1.0;
};

ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

// Applies the paper-scale protocol on top of a config: 288 trials, step
// 1e-4, 3e6 steps.
void apply_paper_scale(ExperimentConfig& cfg);

Dataset resolve_dataset(const ExperimentConfig& cfg);

struct HistogramOutcome {
    std::vector<TrialRecord> records;
    std::size_t n_converged = 0;
    double converged_fraction = 0.0;
    double prob_lower_bound = 0.0;
    double binom_stderr = 0.0;
    bool fraction_pass = false;     // fraction >= bound - 3 * stderr
    double min_stable_rank_w1 = 0.0;  // over converged trials
    bool stable_rank_pass = false;    // min > 1 + delta and every rank = 2
    std::size_t n_rank2 = 0;
};

HistogramOutcome run_histogram_experiment(const ExperimentConfig& cfg);

struct Thm3Outcome {
    std::vector<TrialRecord> records;
    EventIntervals intervals;
    std::size_t n_event = 0;
    std::size_t n_converged = 0;
    double frequency = 0.0;
    double binom_stderr = 0.0;
    bool pass = false;
};

// Frequency of the prescribed convergence event under v(0) = 0 and
// spherically symmetric first-layer rows, against the analytic lower bound;
// in stratified mode the rows are placed inside their one-sided regions and
// every trial must land in the event.
Thm3Outcome run_thm3_experiment(const ExperimentConfig& cfg);

struct Thm2Outcome {
    std::vector<TrialRecord> records;
    std::size_t n_converged = 0;
    std::vector<long> rank1_trial_ids;  // converged trials with rank(W1) < 2
    bool pass = false;
};

// Every converged trial must end with a full-rank first layer; violators are
// dumped for inspection.
Thm2Outcome run_thm2_check(const ExperimentConfig& cfg);

struct DepthSweepRow {
    std::size_t depth = 0;
    std::string mode;  // "trained" | "construction"
    double lambda = 0.0;
    double final_loss = 0.0;
    double mean_sigma_over_f = 0.0;
    double harm_mean_f_over_sigma = 0.0;
    double avg_lower_bound = 0.0;
    double harm_upper_bound = 0.0;
};

struct DepthSweepOutcome {
    std::vector<DepthSweepRow> rows;
    double source_B = 0.0;
    std::string csv;
};

// Measurement only: trains (or constructs) nets of increasing depth and
// tabulates norm-ratio aggregates next to the closed-form bound instances.
// Nothing here is asserted.
DepthSweepOutcome run_depth_sweep(const ExperimentConfig& cfg);

}  // namespace rrlab
