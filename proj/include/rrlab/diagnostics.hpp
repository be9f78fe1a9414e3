#pragma once

#include <optional>
#include <string>

#include "rrlab/network.hpp"

namespace rrlab {

struct LayerRank {
    double frobenius = 0.0;
    double spectral = 0.0;
    double stable_rank = 0.0;
    double sigma_over_f = 0.0;  // in (0, 1]; equals 1 iff the layer has rank 1
};

struct RankReport {
    std::vector<LayerRank> layers;
    double mean_sigma_over_f = 0.0;
    // harmonic mean of the per-layer F/sigma ratios; the square root of the
    // "typical" stable rank, and exactly 1/mean_sigma_over_f
    double harm_mean_f_over_sigma = 0.0;
    // common Frobenius norm when the layers are balanced to 1e-6
    std::optional<double> b_star;
};

RankReport rank_report(const Params& p);

// Closed-form bounds on (average sigma/F ratio, harmonic-mean F/sigma ratio)
// at a global optimum of the corresponding min-norm problem, given that a
// depth-k network with per-layer Frobenius norms <= B fits the data.
struct RatioBounds {
    double avg_lower = 0.0;
    double harm_upper = 0.0;
};

// Interpolation (square-loss) variant: ((1/B)^(k/k'), B^(k/k')).
RatioBounds deep_ratio_bounds_square(double B, std::size_t k, std::size_t k_prime);

// Unit-margin (classification) variant:
// ((1/sqrt2)(sqrt2/B)^(k/k') sqrt(k'/(k'+1)), sqrt2 (B/sqrt2)^(k/k') sqrt((k'+1)/k')).
RatioBounds deep_ratio_bounds_margin(double B, std::size_t k, std::size_t k_prime);

enum class WitnessMode { Square, Margin };

// Feasibility + norm + balancedness + ratio diagnostics for a candidate
// min-norm network. Measurement only: the ratio bounds are known to hold at
// global optima, so `bound_applies` is set only when the candidate's norm
// certifies it is at least as good as the explicit construction.
struct WitnessReport {
    bool feasible = false;
    double feasibility_residual = 0.0;  // max interpolation error / (1 - margin)
    double theta_norm = 0.0;
    double balance_residual = 0.0;      // max pairwise |F_i - F_j|
    RankReport ranks;
    RatioBounds bounds;                 // instance for the supplied (B, k, k')
    bool bound_applies = false;
    bool avg_ratio_meets_bound = false;
};

WitnessReport check_min_norm_witness(const Params& candidate, const Dataset& d, WitnessMode mode,
                                     double B, std::size_t k_source,
                                     std::optional<double> reference_norm = std::nullopt);

std::string rank_report_to_json(const RankReport& r);
// One CSV row per layer plus one aggregate row.
std::string rank_report_to_csv(const RankReport& r);

}  // namespace rrlab
