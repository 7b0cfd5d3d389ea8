#include "vacq/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace vacq {

namespace {

double alpha_of(double r, double T) { return std::exp(-r * T) / -std::expm1(-r * T); }

void require_positive(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) throw SpecError(std::string(name) + " must be finite and > 0");
}

// (e^{a x} - 1) / a, stable through a -> 0.
std::complex<double> em1(std::complex<double> a, double x) {
    if (std::abs(a) < 1e-8) {
        std::complex<double> ax = a * x;
        return x * (1.0 + ax / 2.0 + ax * ax / 6.0);
    }
    return (std::exp(a * x) - 1.0) / a;
}

double em1_real(double a, double x) {
    if (std::abs(a) < 1e-12) return x * (1.0 + a * x / 2.0);
    return std::expm1(a * x) / a;
}

}  // namespace

double ClosedFormDDet::density(double x) const {
    if (x < 0.0 || x >= K) return 0.0;
    return W0 * amplitude * std::exp(rate * x);
}

double ClosedFormDDet::cdf(double x) const {
    if (x < 0.0) return 0.0;
    if (x >= K) return 1.0;
    return W0 * (1.0 + amplitude * em1_real(rate, x));
}

ClosedFormDDet ddet_exp_solution(double lambda, double sigma, double T, double K) {
    require_positive(lambda, "lambda");
    require_positive(T, "T");
    require_positive(K, "K");
    if (!std::isfinite(sigma) || sigma < 0.0) throw SpecError("sigma must be finite and >= 0");
    if (T <= sigma)
        throw UnstableError("deterministic service must be shorter than the interarrival gap");

    ClosedFormDDet cf;
    cf.lambda = lambda;
    cf.sigma = sigma;
    cf.T = T;
    cf.K = K;
    cf.alpha_lambda = alpha_of(lambda, T);
    cf.amplitude = lambda * cf.alpha_lambda * std::exp(lambda * sigma);
    cf.rate = cf.amplitude - lambda;
    cf.I = cf.amplitude * em1_real(cf.rate, K);
    cf.bk_coeff = (cf.amplitude / lambda) * std::exp(cf.rate * K);
    cf.bk_alt =
        cf.alpha_lambda *
        std::exp(-lambda * (K - sigma - cf.alpha_lambda * std::exp(lambda * sigma)));
    cf.W0 = 1.0 / (1.0 + cf.I + cf.bk_coeff);
    cf.BK = cf.bk_coeff * cf.W0;
    return cf;
}

ClosedFormDDet ddet_exp_solution(const QueueConfig& config) {
    config.validate();
    if (config.service.kind != DistKind::deterministic ||
        config.vacation.kind != DistKind::exponential)
        throw SpecError("closed form needs deterministic service and exponential vacation");
    return ddet_exp_solution(config.vacation.rate, config.service.value, config.T, config.K);
}

double volterra_resolvent_density(const ClosedFormDDet& cf, double x) {
    if (x < 0.0 || x >= cf.K) return 0.0;
    double direct = cf.W0 * cf.amplitude * std::exp(-cf.lambda * x);
    double correction =
        cf.W0 * cf.amplitude * (std::exp(cf.rate * x) - std::exp(-cf.lambda * x));
    return direct + correction;
}

double ClosedFormDM::density(double x) const {
    if (x < 0.0 || x >= K) return 0.0;
    if (gamma1.imag() != 0.0) {
        // conjugate pair: the two complex terms fold into one real waveform
        double envelope = std::exp(gamma1.real() * x);
        return W0 * envelope *
               (2.0 * C1.real() * std::cos(gamma1.imag() * x) -
                2.0 * C1.imag() * std::sin(gamma1.imag() * x));
    }
    return W0 * (C1.real() * std::exp(gamma1.real() * x) +
                 C2.real() * std::exp(gamma2.real() * x));
}

double ClosedFormDM::cdf(double x) const {
    if (x < 0.0) return 0.0;
    if (x >= K) return 1.0;
    std::complex<double> acc = C1 * em1(gamma1, x) + C2 * em1(gamma2, x);
    return W0 * (1.0 + acc.real());
}

ClosedFormDM dm_exp_solution(double lambda, double mu, double T, double K) {
    require_positive(lambda, "lambda");
    require_positive(mu, "mu");
    require_positive(T, "T");
    require_positive(K, "K");
    if (lambda == mu)
        throw SpecError("equal service and vacation rates are not supported; perturb one rate");

    ClosedFormDM cf;
    cf.lambda = lambda;
    cf.mu = mu;
    cf.T = T;
    cf.K = K;
    cf.alpha_lambda = alpha_of(lambda, T);
    cf.alpha_mu = alpha_of(mu, T);
    const double al = cf.alpha_lambda, am = cf.alpha_mu;
    cf.A = lambda + mu - lambda * mu * al / (mu - lambda) - lambda * mu * am / (lambda - mu);
    cf.B = lambda * mu - lambda * lambda * mu * am / (lambda - mu) -
           lambda * mu * mu * al / (mu - lambda);

    std::complex<double> disc(cf.A * cf.A - 4.0 * cf.B, 0.0);
    std::complex<double> root = std::sqrt(disc);
    cf.gamma1 = (-cf.A + root) / 2.0;
    cf.gamma2 = (-cf.A - root) / 2.0;
    if (std::abs(cf.gamma1 - cf.gamma2) < 1e-8)
        throw SpecError("density exponents nearly coincide; the residue split loses precision");

    auto N = [&](std::complex<double> theta) {
        return lambda * mu * (al - am) * theta + lambda * mu * (mu * al - lambda * am);
    };
    cf.C1 = N(cf.gamma1) / (cf.gamma1 - cf.gamma2);
    cf.C2 = N(cf.gamma2) / (cf.gamma2 - cf.gamma1);

    cf.I = (cf.C1 * em1(cf.gamma1, K) + cf.C2 * em1(cf.gamma2, K)).real();

    // blocking coefficient: the conditional mass the density pushes past K,
    // accumulated through both exponential tail channels of the step law
    const double c_l = mu / (mu - lambda);
    const double c_m = lambda / (lambda - mu);
    std::complex<double> ch_l =
        c_l * al * std::exp(-lambda * K) *
        (1.0 + cf.C1 * em1(lambda + cf.gamma1, K) + cf.C2 * em1(lambda + cf.gamma2, K));
    std::complex<double> ch_m =
        c_m * am * std::exp(-mu * K) *
        (1.0 + cf.C1 * em1(mu + cf.gamma1, K) + cf.C2 * em1(mu + cf.gamma2, K));
    cf.bk_coeff = (ch_l + ch_m).real();

    cf.W0 = 1.0 / (1.0 + cf.I + cf.bk_coeff);
    cf.BK = cf.bk_coeff * cf.W0;
    return cf;
}

ClosedFormDM dm_exp_solution(const QueueConfig& config) {
    config.validate();
    if (config.service.kind != DistKind::exponential ||
        config.vacation.kind != DistKind::exponential)
        throw SpecError("closed form needs exponential service and exponential vacation");
    return dm_exp_solution(config.vacation.rate, config.service.rate, config.T, config.K);
}

double dm_transform_denominator(double theta, double lambda, double mu, double T) {
    require_positive(lambda, "lambda");
    require_positive(mu, "mu");
    require_positive(T, "T");
    const double al = alpha_of(lambda, T);
    const double am = alpha_of(mu, T);
    return theta * theta * (mu - lambda) +
           theta * ((mu * mu - lambda * lambda) + lambda * mu * (am - al)) +
           lambda * mu * (mu * (1.0 - al) - lambda * (1.0 - am));
}

double balking_transient_tail(double lambda, double sigma, double T, double K, std::uint64_t n,
                              double x) {
    require_positive(lambda, "lambda");
    require_positive(T, "T");
    require_positive(K, "K");
    if (!std::isfinite(sigma) || sigma < 0.0) throw SpecError("sigma must be finite and >= 0");
    if (!std::isfinite(x)) throw SpecError("x must be finite");

    const double nd = static_cast<double>(n);
    double binom = 1.0;
    double sum = 0.0;
    for (std::uint64_t j = 0; j <= n; ++j) {
        if (j > 0) binom *= (nd - static_cast<double>(j) + 1.0) / static_cast<double>(j);
        double exponent =
            -lambda * (x + (nd + 1.0) * T - (nd + 1.0 - static_cast<double>(j)) * sigma);
        sum += binom * std::pow(K * lambda, nd - static_cast<double>(j)) * std::exp(exponent);
    }
    return std::clamp(sum, 0.0, 1.0);
}

double balking_transient_tail(const QueueConfig& config, std::uint64_t n, double x) {
    config.validate();
    if (config.service.kind != DistKind::deterministic ||
        config.vacation.kind != DistKind::exponential)
        throw SpecError("transient tail needs deterministic service and exponential vacation");
    return balking_transient_tail(config.vacation.rate, config.service.value, config.T, config.K,
                                  n, x);
}

}  // namespace vacq
