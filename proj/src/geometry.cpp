#include "rrlab/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rrlab/linalg.hpp"

namespace rrlab {
namespace {

constexpr double kPi = std::numbers::pi;

void check_obtuse(const Vec& x1, const Vec& x2) {
    const double a = angle(x1, x2);
    if (!(a > kPi / 2.0 && a < kPi))
        throw std::invalid_argument("geometry: angle(x1,x2) must be in (pi/2, pi)");
}

}  // namespace

const char* to_string(RegionLabel r) {
    switch (r) {
        case RegionLabel::D: return "D";
        case RegionLabel::S: return "S";
        case RegionLabel::S1: return "S1";
        case RegionLabel::S2: return "S2";
    }
    return "?";
}

RegionLabel classify(const Vec& w, const Vec& x1, const Vec& x2) {
    if (norm(x1) == 0.0 || norm(x2) == 0.0)
        throw std::invalid_argument("classify: zero input vector");
    const bool a1 = dot(w, x1) > 0.0;
    const bool a2 = dot(w, x2) > 0.0;
    if (a1 && a2) return RegionLabel::S;
    if (a1) return RegionLabel::S1;
    if (a2) return RegionLabel::S2;
    return RegionLabel::D;
}

double region_angle(const Vec& x1, const Vec& x2, RegionLabel label) {
    check_obtuse(x1, x2);
    const double a = angle(x1, x2);
    switch (label) {
        case RegionLabel::S1:
        case RegionLabel::S2:
            return a;
        case RegionLabel::S:
        case RegionLabel::D:
            return kPi - a;
    }
    return 0.0;
}

double init_radius_bound(const Vec& x1, const Vec& x2) {
    check_obtuse(x1, x2);
    const double a = angle(x1, x2);
    return std::min(0.5, std::sqrt(3.0) / 2.0 * std::cos(a / 2.0));
}

EventIntervals event_intervals(const Vec& x1, const Vec& x2,
                               const std::vector<double>& init_norms) {
    check_obtuse(x1, x2);
    const double a = angle(x1, x2);

    EventIntervals iv;
    iv.max_init_radius =
        std::sqrt(3.0) / 2.0 * std::min(std::sin((kPi - a) / 4.0), std::sin(a - kPi / 2.0));
    for (double r : init_norms)
        if (r > iv.max_init_radius)
            throw std::invalid_argument("event_intervals: init norm exceeds admissible radius");

    iv.angle_lo = kPi - a;
    iv.angle_hi = 3.0 * kPi / 4.0 + (a - kPi / 2.0) / 2.0;
    iv.norm_lo = std::sqrt(3.0) / 2.0;
    const double s = std::sin(a);
    iv.norm_hi = std::sqrt(0.25 + 4.0 / (3.0 * s * s));
    iv.prob_lower_bound = 2.0 * (a / (2.0 * kPi)) * (a / (2.0 * kPi));
    return iv;
}

EventCheck check_event(const FlowResult& r, const EventIntervals& iv, double slack) {
    const Mat& w = r.params.layers.front();
    if (r.params.depth() != 2 || w.rows() != 2 || w.cols() != 2)
        throw std::invalid_argument("check_event: depth-2 width-2 network required");

    EventCheck c;
    c.converged = r.converged;
    const Vec w1 = w.row(0), w2 = w.row(1);
    c.row_norms = {norm(w1), norm(w2)};
    if (c.row_norms[0] == 0.0 || c.row_norms[1] == 0.0) {
        c.row_angle = 0.0;
        return c;
    }
    c.row_angle = angle(w1, w2);
    c.angle_ok = c.row_angle >= iv.angle_lo - slack && c.row_angle <= iv.angle_hi + slack;
    c.norms_ok = true;
    for (double n : c.row_norms)
        c.norms_ok = c.norms_ok && n > iv.norm_lo - slack && n < iv.norm_hi + slack;
    c.in_event = c.converged && c.angle_ok && c.norms_ok;
    return c;
}

}  // namespace rrlab
