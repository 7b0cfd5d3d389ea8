#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "vacq/model.hpp"

namespace vacq {

// One exponential tail component: contributes coeff * exp(-rate * (y - from))
// to 1 - G(y), valid jointly with the other components for y >= from, where
// from = tail_from() of the owning ConvDist. Anchoring at from keeps every
// exponent nonpositive regardless of how wide the bounded component is.
struct ExpTailTerm {
    double coeff;
    double rate;
};

// Law G of sigma0 + v1. Closed forms for the det/exp parameter families;
// tabulated components fall back to a precomputed value grid.
class ConvDist {
public:
    // table_step bounds the quadrature grid spacing used when a tabulated
    // component forces numeric convolution.
    ConvDist(const DistributionSpec& service, const DistributionSpec& vacation,
             double table_step);

    double cdf(double y) const;         // right-continuous, 0 for y < 0
    double prob_below(double y) const;  // P(sigma + v < y), left limit at y
    double mean() const;

    // true when the geometric summation over exponential tails applies
    // (deterministic/exponential component families only)
    bool analytic_tails() const { return analytic_tails_; }
    const std::vector<ExpTailTerm>& tails() const { return tails_; }
    double tail_from() const { return tail_from_; }

    bool bounded() const { return bounded_; }
    double upper() const { return upper_; }  // sup of support when bounded

private:
    enum class Form { point, shifted_exponential, two_exponential, shifted_table, table };

    double table_lookup(double y) const;

    Form form_;
    // point / shifted_exponential / two_exponential parameters
    double point_ = 0.0;
    double shift_ = 0.0;
    double rate_ = 0.0;      // shifted_exponential
    double rate_lo_ = 0.0;   // two_exponential: the two distinct rates
    double rate_hi_ = 0.0;
    double c_lo_ = 0.0;      // coefficients of exp(-rate*y) in 1 - G
    double c_hi_ = 0.0;
    // shifted_table / table
    DistributionSpec table_component_;   // the tabulated law (shifted_table)
    std::vector<double> grid_;           // table: G at lo_ + i*step_
    double lo_ = 0.0;
    double step_ = 0.0;
    bool grid_has_exp_tail_ = false;     // table: exact tail beyond the grid
    double grid_tail_coeff_ = 0.0;
    double grid_tail_rate_ = 0.0;

    double mean_ = 0.0;
    bool bounded_ = false;
    double upper_ = 0.0;
    bool analytic_tails_ = false;
    std::vector<ExpTailTerm> tails_;
    double tail_from_ = 0.0;
};

// Kernel machinery for the stationary and transient integral equations.
struct KernelParams {
    QueueConfig config;
    std::shared_ptr<const ConvDist> conv;
    std::optional<double> alpha_lambda;  // e^{-rT}/(1-e^{-rT}), vacation rate
    std::optional<double> alpha_mu;      // same for an exponential service rate
    double truncation_eps = 1e-12;

    static KernelParams make(const QueueConfig& config, double truncation_eps = 1e-12);
};

// Convolution CDF of sigma0 + v1 for a config (builds the ConvDist on the fly;
// hold a KernelParams when evaluating many points against a tabulated law).
double conv_cdf(const QueueConfig& config, double x);

struct ABPair {
    double a;
    double b;
};

// Window endpoints: a_n = x - w + (n+1)T; b_0 = 0, b_n = K - w + nT.
ABPair ab_sequences(double x, double w, int n, double T, double K);

// Sum over n >= 0 of P(b_n <= sigma+v <= a_n): the transition CDF of the
// served chain, encoding survival through runs of consecutive losses.
// For x + T <= K this is exactly conv_cdf(x - w + T) (same code path).
// Throws ConvergenceError if truncation cannot be certified (tabulated laws).
double kernel_sum(double x, double w, const KernelParams& params);

// Sum over n >= 1 of [1 - G(K - w + nT)]: expected number of consecutive
// losses following a served customer at wait w.
double loss_sum(double w, const KernelParams& params);

}  // namespace vacq
