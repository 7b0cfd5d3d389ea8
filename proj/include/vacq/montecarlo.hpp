#pragma once

#include <cstdint>
#include <vector>

#include "vacq/model.hpp"
#include "vacq/recursion.hpp"

namespace vacq {

// Replicated long-run estimate of the stationary wait law. Each replication
// runs an independent path (child seed r), discards burn_in customers, and
// bins the rest. Standard errors come from the between-replication spread.
// grid_size is the number of density panels on [0, x_max); for reneging
// x_max = K and the boundary mass is the atom at K, for balking x_max is an
// empirical high quantile of the exceedances and the boundary mass is the
// binning spillover.
SimulationSummary estimate_stationary(const QueueConfig& config,
                                      std::uint64_t n_customers,
                                      std::uint64_t burn_in,
                                      std::uint32_t replications,
                                      std::uint64_t seed,
                                      std::size_t grid_size = 512,
                                      unsigned threads = 0,
                                      VacationIndexing indexing = VacationIndexing::fresh_draw);

struct TailEstimate {
    double probability;  // P(w_n > x), strict
    double se;
    std::uint64_t n_paths;
};

// Transient tail estimate from independent path prefixes. Path positions are
// indexed from 0 (w_0 = 0 is the empty-start customer); each replication
// restarts the path and records 1{w_n > x} at position n >= 1. Reneging
// records the capped wait (K when lost), balking the uncapped workload.
TailEstimate estimate_transient_tail(const QueueConfig& config, std::uint64_t n, double x,
                                     std::uint64_t replications, std::uint64_t seed);

// Thinned post-burn-in waits from one path, for distribution-level tests.
// stride decorrelates consecutive samples; lost reneging customers contribute
// their capped wait K, balking exceedances contribute the uncapped workload.
std::vector<double> stationary_samples(const QueueConfig& config,
                                       std::uint64_t n_samples,
                                       std::uint64_t burn_in,
                                       std::uint64_t seed,
                                       std::uint64_t stride = 10,
                                       VacationIndexing indexing = VacationIndexing::fresh_draw);

struct KsResult {
    double statistic;  // sup |F1 - F2|
    double p_value;    // asymptotic two-sample significance
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace vacq
