#pragma once

#include <complex>
#include <cstdint>

#include "vacq/model.hpp"

namespace vacq {

// Candidate stationary law for deterministic service sigma + exponential
// vacation (rate lambda) under reneging: atom W0 at zero plus the density
// W0 * amplitude * exp(rate * x) on [0, K). W0 and BK always come from the
// joint normalization pair W0 (1 + I + bk_coeff) = 1, BK = bk_coeff * W0.
struct ClosedFormDDet {
    double lambda = 0.0;
    double sigma = 0.0;
    double T = 0.0;
    double K = 0.0;
    double alpha_lambda = 0.0;  // e^{-lambda T} / (1 - e^{-lambda T})
    double amplitude = 0.0;     // lambda * alpha_lambda * e^{lambda sigma}
    double rate = 0.0;          // amplitude - lambda
    double I = 0.0;             // integral of the density shape over [0, K]
    double bk_coeff = 0.0;      // (amplitude/lambda) e^{-K (lambda - amplitude)}
    // alternative exponent alpha_lambda e^{-lambda (K - sigma - alpha_lambda
    // e^{lambda sigma})}; dimensionally suspect; reported for comparison
    double bk_alt = 0.0;
    double W0 = 0.0;
    double BK = 0.0;

    double density(double x) const;  // on [0, K)
    double cdf(double x) const;      // right-continuous; jumps at 0 and K
};

// Requires T > sigma (stability); all parameters positive, sigma >= 0.
ClosedFormDDet ddet_exp_solution(double lambda, double sigma, double T, double K);
// Dispatch form: config must be deterministic service + exponential vacation.
ClosedFormDDet ddet_exp_solution(const QueueConfig& config);

// The same density reconstructed through the resolvent route: atom response
// W0 * amplitude * e^{-lambda x} plus the accumulated geometric correction.
// Collapses algebraically to ClosedFormDDet::density; kept as a separate
// evaluation for cross-checking.
double volterra_resolvent_density(const ClosedFormDDet& cf, double x);

// Candidate stationary law for exponential service (rate mu) + exponential
// vacation (rate lambda) under reneging: atom W0 plus
// W0 * Re[C1 e^{gamma1 x} + C2 e^{gamma2 x}] on [0, K).
struct ClosedFormDM {
    double lambda = 0.0;  // vacation rate
    double mu = 0.0;      // service rate
    double T = 0.0;
    double K = 0.0;
    double alpha_lambda = 0.0;
    double alpha_mu = 0.0;
    double A = 0.0;  // quadratic x^2 + A x + B whose roots are the exponents
    double B = 0.0;
    std::complex<double> gamma1;  // root with the larger real part
    std::complex<double> gamma2;
    std::complex<double> C1;
    std::complex<double> C2;
    double I = 0.0;
    double bk_coeff = 0.0;
    double W0 = 0.0;
    double BK = 0.0;

    double density(double x) const;
    double cdf(double x) const;
};

// Rejects lambda == mu (the two-rate convolution degenerates) and nearly
// coincident exponents, where the residue split loses all precision.
ClosedFormDM dm_exp_solution(double lambda, double mu, double T, double K);
// Dispatch form: config must be exponential service + exponential vacation.
ClosedFormDM dm_exp_solution(const QueueConfig& config);

// Characteristic denominator of the transform whose roots are the density
// exponents, in the literal expanded form:
//   theta^2 (mu - lambda) + theta [(mu^2 - lambda^2) + lambda mu (alpha_mu -
//   alpha_lambda)] + lambda mu [mu (1 - alpha_lambda) - lambda (1 - alpha_mu)]
// Equals (mu - lambda)(theta^2 + A theta + B).
double dm_transform_denominator(double theta, double lambda, double mu, double T);

// Candidate transient tail for the balking recursion with deterministic
// service + exponential vacation, started empty (w_0 = 0): at formula index n
// it targets P(w_{n+1} > x), i.e. the workload law after n+1 steps:
//   sum_{j=0}^{n} C(n,j) (K lambda)^{n-j} e^{-lambda (x + (n+1)T - (n+1-j) sigma)}
// clamped to [0, 1]. Provably exact at n = 0 for x >= (sigma-T)+; for n >= 1
// it is evaluated as stated and adjudicated against simulation, not trusted.
double balking_transient_tail(double lambda, double sigma, double T, double K,
                              std::uint64_t n, double x);
double balking_transient_tail(const QueueConfig& config, std::uint64_t n, double x);

}  // namespace vacq
