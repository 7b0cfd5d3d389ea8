#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vacq {

// Bad user input (flag values, spec strings, violated preconditions). CLI exit 2.
struct SpecError : std::runtime_error {
    explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

// Config fails P(sigma + v < T) > 0. CLI exit 3.
struct UnstableError : std::runtime_error {
    explicit UnstableError(const std::string& what) : std::runtime_error(what) {}
};

// Iteration or series truncation failed to certify its target. CLI exit 4.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& what, double residual_, long long iterations_)
        : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
    double residual;
    long long iterations;
};

enum class DistKind { deterministic, exponential, tabulated };

// A service-time or vacation-time law. Tabulated laws are inverse CDFs
// given as (level, quantile) pairs with linear interpolation between rows.
struct DistributionSpec {
    DistKind kind = DistKind::deterministic;
    double value = 0.0;              // deterministic
    double rate = 0.0;               // exponential
    std::vector<double> levels;      // tabulated: strictly increasing, 0 .. 1
    std::vector<double> quantiles;   // tabulated: nondecreasing, >= 0

    static DistributionSpec deterministic(double v);
    static DistributionSpec exponential(double r);
    static DistributionSpec tabulated(std::vector<double> levels, std::vector<double> quantiles);

    // text forms: det:<value>, exp:<rate>, tab:<path.csv> (csv header "p,q")
    static DistributionSpec parse(const std::string& text);

    double sample(double u) const;   // inverse-CDF draw, u in [0,1)
    double cdf(double x) const;      // right-continuous, 0 for x < 0
    double cdf_strict(double x) const;  // P(X < x), differs from cdf at atoms
    double mean() const;
    bool bounded() const;            // support bounded above
    double upper() const;            // sup of support (bounded kinds only)
};

enum class Discipline { reneging, balking };

struct QueueConfig {
    double T = 0.0;  // inter-arrival period
    double K = 0.0;  // deadline on waiting time / workload
    DistributionSpec service;
    DistributionSpec vacation;
    Discipline discipline = Discipline::reneging;

    void validate() const;  // throws SpecError
};

struct StabilityResult {
    double probability;  // P(sigma + v < T)
    bool stable;
};

// Evaluates the regeneration condition P(sigma0 + v1 < T) > 0 from the
// convolution CDF at T from the left.
StabilityResult check_stability(const QueueConfig& config);

enum class BoundaryKind {
    deadline_atom,    // mass at x_max = K (reneging losses)
    truncation_tail,  // mass beyond x_max (balking workload truncation)
};

// Atom at 0, gridded density on (0, x_max), and a boundary mass. cdf is
// the authoritative representation: cdf[0] = atom0, cdf[m] = 1 - boundary.
// density is the per-node derivative, rescaled so that its trapezoid
// integral reproduces cdf[m] - cdf[0] exactly.
struct MixedDistribution {
    double atom0 = 0.0;
    double x_max = 0.0;
    std::vector<double> density;  // nodes i*h, i = 0..m, h = x_max/m
    std::vector<double> cdf;      // same nodes, nondecreasing
    double boundary_mass = 0.0;
    BoundaryKind boundary_kind = BoundaryKind::deadline_atom;

    double h() const { return x_max / static_cast<double>(density.size() - 1); }
    double trapezoid_density() const;
    double normalization_error() const;  // |atom0 + integral + boundary - 1|
    double cdf_at(double x) const;       // linear interpolation between nodes
    void validate(double tol = 1e-8) const;  // throws SpecError on violation
};

// Node density for uniform panel masses p_0..p_{m-1} of width h: the m+1
// returned node values are chosen so their trapezoid integral reproduces
// sum(p) exactly.
std::vector<double> node_density(const std::vector<double>& panel_mass, double h);

struct Estimate {
    double value = 0.0;
    double se = 0.0;  // NaN when replications == 1
};

struct SimulationSummary {
    long long n_customers = 0;
    int n_replications = 0;
    long long burn_in = 0;
    Estimate W0_hat;     // P(wait == 0)
    Estimate BK_hat;     // P(lost) (reneging) / P(balked) (balking)
    Estimate mean_wait;
    MixedDistribution empirical;
    std::uint64_t seed = 0;
    bool stable = true;  // warning flag; estimation proceeds regardless
};

}  // namespace vacq
