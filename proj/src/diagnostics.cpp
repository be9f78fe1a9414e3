#include "rrlab/diagnostics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rrlab/gradients.hpp"
#include "rrlab/linalg.hpp"

namespace rrlab {

RankReport rank_report(const Params& p) {
    p.validate();
    RankReport r;
    double ratio_sum = 0.0;
    double fro_min = 0.0, fro_max = 0.0;
    for (std::size_t l = 0; l < p.depth(); ++l) {
        LayerRank lr;
        lr.frobenius = frobenius_norm(p.layers[l]);
        lr.spectral = spectral_norm(p.layers[l]);
        if (lr.spectral == 0.0) throw std::invalid_argument("rank_report: zero layer");
        lr.stable_rank = (lr.frobenius * lr.frobenius) / (lr.spectral * lr.spectral);
        lr.sigma_over_f = lr.spectral / lr.frobenius;
        ratio_sum += lr.sigma_over_f;
        fro_min = (l == 0) ? lr.frobenius : std::min(fro_min, lr.frobenius);
        fro_max = (l == 0) ? lr.frobenius : std::max(fro_max, lr.frobenius);
        r.layers.push_back(lr);
    }
    r.mean_sigma_over_f = ratio_sum / double(p.depth());
    r.harm_mean_f_over_sigma = double(p.depth()) / ratio_sum;
    if (fro_max - fro_min <= 1e-6) r.b_star = 0.5 * (fro_min + fro_max);
    return r;
}

RatioBounds deep_ratio_bounds_square(double B, std::size_t k, std::size_t k_prime) {
    if (!(B > 0.0) || k < 2 || k_prime <= k)
        throw std::invalid_argument("deep_ratio_bounds_square: need B>0 and k_prime > k >= 2");
    const double e = double(k) / double(k_prime);
    return {std::pow(1.0 / B, e), std::pow(B, e)};
}

RatioBounds deep_ratio_bounds_margin(double B, std::size_t k, std::size_t k_prime) {
    if (!(B > 0.0) || k < 2 || k_prime <= k)
        throw std::invalid_argument("deep_ratio_bounds_margin: need B>0 and k_prime > k >= 2");
    const double e = double(k) / double(k_prime);
    const double r2 = std::sqrt(2.0);
    const double kp = double(k_prime);
    RatioBounds b;
    b.avg_lower = (1.0 / r2) * std::pow(r2 / B, e) * std::sqrt(kp / (kp + 1.0));
    b.harm_upper = r2 * std::pow(B / r2, e) * std::sqrt((kp + 1.0) / kp);
    return b;
}

WitnessReport check_min_norm_witness(const Params& candidate, const Dataset& d, WitnessMode mode,
                                     double B, std::size_t k_source,
                                     std::optional<double> reference_norm) {
    WitnessReport rep;
    if (mode == WitnessMode::Square) {
        if (!d.y_mat) throw std::invalid_argument("check_min_norm_witness: regression data required");
        const Mat out = forward_batch(candidate, d.x);
        double max_err = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i)
            max_err = std::max(max_err, std::abs(out.data()[i] - d.y_mat->data()[i]));
        rep.feasibility_residual = max_err;
        rep.feasible = max_err <= 1e-6;
    } else {
        const double m = margin(candidate, d);
        rep.feasibility_residual = std::max(0.0, 1.0 - m);
        rep.feasible = m >= 1.0 - 1e-6;
    }
    if (!rep.feasible) throw std::invalid_argument("check_min_norm_witness: infeasible candidate");

    rep.theta_norm = candidate.theta_norm();
    rep.ranks = rank_report(candidate);
    double fro_min = rep.ranks.layers[0].frobenius, fro_max = fro_min;
    for (const LayerRank& lr : rep.ranks.layers) {
        fro_min = std::min(fro_min, lr.frobenius);
        fro_max = std::max(fro_max, lr.frobenius);
    }
    rep.balance_residual = fro_max - fro_min;

    rep.bounds = (mode == WitnessMode::Square)
                     ? deep_ratio_bounds_square(B, k_source, candidate.depth())
                     : deep_ratio_bounds_margin(B, k_source, candidate.depth());
    rep.bound_applies = reference_norm && rep.theta_norm <= *reference_norm * (1.0 + 1e-12);
    rep.avg_ratio_meets_bound = rep.ranks.mean_sigma_over_f >= rep.bounds.avg_lower - 1e-12;
    return rep;
}

std::string rank_report_to_json(const RankReport& r) {
    nlohmann::json j;
    j["layers"] = nlohmann::json::array();
    for (const LayerRank& lr : r.layers) {
        j["layers"].push_back({{"frobenius", lr.frobenius},
                               {"spectral", lr.spectral},
                               {"stable_rank", lr.stable_rank},
                               {"sigma_over_f", lr.sigma_over_f}});
    }
    j["mean_sigma_over_f"] = r.mean_sigma_over_f;
    j["harm_mean_f_over_sigma"] = r.harm_mean_f_over_sigma;
    if (r.b_star) j["b_star"] = *r.b_star;
    return j.dump();
}

std::string rank_report_to_csv(const RankReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "row,frobenius,spectral,stable_rank,sigma_over_f,mean_sigma_over_f,"
          "harm_mean_f_over_sigma,b_star\n";
    for (std::size_t l = 0; l < r.layers.size(); ++l) {
        const LayerRank& lr = r.layers[l];
        os << "layer" << l + 1 << ',' << lr.frobenius << ',' << lr.spectral << ','
           << lr.stable_rank << ',' << lr.sigma_over_f << ",,,\n";
    }
    os << "aggregate,,,,," << r.mean_sigma_over_f << ',' << r.harm_mean_f_over_sigma << ',';
    if (r.b_star) os << *r.b_star;
    os << '\n';
    return os.str();
}

}  // namespace rrlab
