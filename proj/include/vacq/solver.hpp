#pragma once

#include <cstddef>
#include <vector>

#include "vacq/model.hpp"

namespace vacq {

struct SolverResult {
    MixedDistribution dist;
    double BK = 0.0;  // stationary loss fraction (reneging) / blocking prob (balking)
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = false;
    std::vector<double> residual_history;
};

// Fixed-point iteration for the stationary served-wait law under reneging.
// State is (atom at 0, panel masses on [0, K)); the kernel is evaluated at
// panel midpoints, which keeps the scheme second order across the density
// jump at K - T. The deadline atom and BK come from the loss-run counts of
// the fixed point. Throws UnstableError / ConvergenceError.
SolverResult solve_reneging_stationary(const QueueConfig& config,
                                       std::size_t grid_size = 512,
                                       double tol = 1e-10,
                                       std::size_t max_iter = 20000);

// Fixed-point iteration for the stationary workload law under balking.
// The grid extends past K; mass beyond the working window is parked at the
// window edge so the per-step drain T can re-admit it, and the window doubles
// until the parked share at the fixed point is below tol.
SolverResult solve_balking_stationary(const QueueConfig& config,
                                      std::size_t grid_size = 512,
                                      double tol = 1e-10,
                                      std::size_t max_iter = 20000);

// Exact-law transient iteration from an empty system (W_0 = point mass at 0):
// returns [W_1, ..., W_{n_steps}] where W_n is the law of the wait/workload
// found by the n-th arrival after the start. Reneging keeps the full history
// of earlier laws because a loss run of length k ties W_{n+1} to W_{n-k};
// n_steps is capped at 10^4 to bound that history. grid_size panels span
// [0, K) (reneging) or the balking working window.
std::vector<MixedDistribution> iterate_transient(const QueueConfig& config,
                                                 std::size_t n_steps,
                                                 std::size_t grid_size = 512);

}  // namespace vacq
