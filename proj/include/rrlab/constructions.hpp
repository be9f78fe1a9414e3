#pragma once

#include "rrlab/network.hpp"

namespace rrlab {

// Exact zero-loss depth-2 width-2 network whose first layer has rank 1, for
// any two-input planar dataset with a strictly positive angle between the
// inputs. Row 1 is x1/||x1|| - x2/||x2||, row 2 its negation, so each hidden
// neuron is active on exactly one input; the output layer then solves the
// fit exactly.
Params rank1_interpolator(const Dataset& d);

// Output layer fitting Y through the fixed first layer w: V = Y * pinv(relu(w X)),
// padded with zero columns when the hidden layer is wider than n. Requires
// relu(w X) to have full column rank.
Mat solve_output_layer(const Mat& w, const Dataset& d);

// Depth extension for scalar-output nets with non-negative outputs on the
// data: the source layers are scaled by alpha = (1/B)^((k'-k)/k') and k'-k
// width-1 layers of weight beta = B^(k/k') are appended; the composite is
// output-preserving wherever the source output is >= 0. Every source layer
// must satisfy ||W_i||_F <= B. When check_data is given the non-negativity
// precondition is verified against it.
Params deepen_square(const Params& src, std::size_t k_prime, double B,
                     const Dataset* check_data = nullptr);

// Depth extension for scalar-output classifiers preserving outputs of both
// signs: the source output neuron u is replaced by the pair [u; -u], the
// tail carries the two half-signals through beta*I layers, and the last
// layer recombines them with beta*(1, -1). alpha = (sqrt(2)/B)^((k'-k)/k'),
// beta = (sqrt(2)/B)^(-k/k').
Params deepen_classification(const Params& src, std::size_t k_prime, double B);

// Function-preserving rescale making all layers' Frobenius norms equal to
// their geometric mean (the norm-minimal point among per-layer rescalings).
Params balance_layers(const Params& p);

}  // namespace rrlab
