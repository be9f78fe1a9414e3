#pragma once

#include "rrlab/flow.hpp"

namespace rrlab {

// Activation regions of a 2-D weight vector against two fixed inputs:
//   D  : inactive on both (w.x1 <= 0 and w.x2 <= 0)
//   S  : strictly active on both
//   S1 : strictly active on x1 only, S2 : strictly active on x2 only
// The >0 / <=0 split makes the four labels a partition of the plane.
enum class RegionLabel { D, S, S1, S2 };

const char* to_string(RegionLabel r);

RegionLabel classify(const Vec& w, const Vec& x1, const Vec& x2);

// Angular measure of a region when the inputs are at an obtuse angle
// (the relevant regime: pi/2 < angle(x1,x2) < pi). The two one-sided
// regions each span angle(x1,x2); S and D split the rest evenly.
double region_angle(const Vec& x1, const Vec& x2, RegionLabel label);

// Largest initialization radius covered by the rank-2 convergence result:
// min{ 1/2, (sqrt(3)/2) cos(angle/2) }.
double init_radius_bound(const Vec& x1, const Vec& x2);

// Prescribed intervals for the convergence event checked by experiment
// "thm3": where the first-layer rows must land (angle between them, and
// each row's norm), plus the analytic lower bound on the probability of
// the event under spherically symmetric initialization.
struct EventIntervals {
    double angle_lo = 0.0, angle_hi = 0.0;   // closed interval
    double norm_lo = 0.0, norm_hi = 0.0;     // open interval
    double prob_lower_bound = 0.0;
    double max_init_radius = 0.0;            // admissible ||w_i(0)||
};

// Throws if the inputs violate the obtuse-angle/unit-norm assumptions or if
// init_norms exceed the admissible radius.
EventIntervals event_intervals(const Vec& x1, const Vec& x2,
                               const std::vector<double>& init_norms = {});

struct EventCheck {
    bool in_event = false;
    bool converged = false;
    bool angle_ok = false;
    bool norms_ok = false;
    double row_angle = 0.0;
    std::vector<double> row_norms;
};

// Event membership for a finished depth-2 width-2 run; slack widens every
// interval to absorb discretization error.
EventCheck check_event(const FlowResult& r, const EventIntervals& iv, double slack = 0.0);

}  // namespace rrlab
