#include "vacq/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace vacq {

namespace {

constexpr long long kMaxSeriesTerms = 100000;

// E[exp(-r (hi - X))] for a tabulated X with upper endpoint hi; exact for the
// piecewise-linear quantile law, every exponent <= 0.
double shifted_mgf(const DistributionSpec& tab, double hi, double r) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < tab.levels.size(); ++i) {
        double dp = tab.levels[i + 1] - tab.levels[i];
        double q0 = tab.quantiles[i], q1 = tab.quantiles[i + 1];
        if (q1 == q0) {
            s += dp * std::exp(-r * (hi - q0));
        } else {
            s += dp * (std::exp(-r * (hi - q1)) - std::exp(-r * (hi - q0))) / (r * (q1 - q0));
        }
    }
    return s;
}

}  // namespace

ConvDist::ConvDist(const DistributionSpec& service, const DistributionSpec& vacation,
                   double table_step) {
    mean_ = service.mean() + vacation.mean();
    const bool s_tab = service.kind == DistKind::tabulated;
    const bool v_tab = vacation.kind == DistKind::tabulated;

    if (!s_tab && !v_tab) {
        const bool s_det = service.kind == DistKind::deterministic;
        const bool v_det = vacation.kind == DistKind::deterministic;
        if (s_det && v_det) {
            form_ = Form::point;
            point_ = service.value + vacation.value;
            bounded_ = true;
            upper_ = point_;
        } else if (s_det || v_det) {
            form_ = Form::shifted_exponential;
            shift_ = s_det ? service.value : vacation.value;
            rate_ = s_det ? vacation.rate : service.rate;
            analytic_tails_ = true;
            tails_ = {{1.0, rate_}};
            tail_from_ = shift_;
        } else {
            if (service.rate == vacation.rate)
                throw SpecError(
                    "equal service and vacation rates are not supported; perturb one rate");
            form_ = Form::two_exponential;
            rate_lo_ = service.rate;
            rate_hi_ = vacation.rate;
            c_lo_ = rate_hi_ / (rate_hi_ - rate_lo_);
            c_hi_ = rate_lo_ / (rate_lo_ - rate_hi_);
            analytic_tails_ = true;
            tails_ = {{c_lo_, rate_lo_}, {c_hi_, rate_hi_}};
            tail_from_ = 0.0;
        }
        return;
    }

    if (s_tab != v_tab) {
        const DistributionSpec& tab = s_tab ? service : vacation;
        const DistributionSpec& other = s_tab ? vacation : service;
        if (other.kind == DistKind::deterministic) {
            form_ = Form::shifted_table;
            table_component_ = tab;
            shift_ = other.value;
            bounded_ = true;
            upper_ = tab.upper() + shift_;
            return;
        }
        // tab + exponential: numeric grid over the bounded span, exact
        // exponential tail beyond it
        if (!(table_step > 0.0)) throw SpecError("table convolution needs a positive step");
        form_ = Form::table;
        step_ = table_step;
        const double loA = tab.quantiles.front();
        const double hiA = tab.quantiles.back();
        lo_ = loA;
        std::size_t n_grid =
            hiA > loA ? static_cast<std::size_t>(std::ceil((hiA - loA) / step_)) : 1;
        // cell-mass discretization of the bounded component at midpoints;
        // the first cell absorbs any atom at the lower endpoint
        std::size_t n_cell = n_grid;
        double cell = hiA > loA ? (hiA - loA) / static_cast<double>(n_cell) : 0.0;
        if (static_cast<double>(n_grid) * static_cast<double>(n_cell) > 2e7)
            throw SpecError("tabulated support too wide for the convolution grid");
        std::vector<double> mass(n_cell), mid(n_cell);
        if (hiA == loA) {
            mass[0] = 1.0;
            mid[0] = loA;
        } else {
            double prev = 0.0;
            for (std::size_t k = 0; k < n_cell; ++k) {
                double right = tab.cdf(loA + cell * static_cast<double>(k + 1));
                mass[k] = right - prev;
                prev = right;
                mid[k] = loA + cell * (static_cast<double>(k) + 0.5);
            }
        }
        grid_.resize(n_grid + 1);
        for (std::size_t i = 0; i <= n_grid; ++i) {
            double y = lo_ + step_ * static_cast<double>(i);
            double g = 0.0;
            for (std::size_t k = 0; k < n_cell; ++k) g += mass[k] * other.cdf(y - mid[k]);
            grid_[i] = std::min(g, 1.0);
        }
        grid_has_exp_tail_ = true;
        grid_tail_rate_ = other.rate;
        grid_tail_coeff_ = shifted_mgf(tab, hiA, other.rate);
        analytic_tails_ = true;
        tails_ = {{grid_tail_coeff_, grid_tail_rate_}};
        tail_from_ = hiA;
        return;
    }

    // both tabulated: numeric grid over the full (bounded) support sum
    if (!(table_step > 0.0)) throw SpecError("table convolution needs a positive step");
    form_ = Form::table;
    step_ = table_step;
    const double loA = service.quantiles.front(), hiA = service.quantiles.back();
    const double loB = vacation.quantiles.front(), hiB = vacation.quantiles.back();
    lo_ = loA + loB;
    bounded_ = true;
    upper_ = hiA + hiB;
    std::size_t n_grid =
        upper_ > lo_ ? static_cast<std::size_t>(std::ceil((upper_ - lo_) / step_)) : 1;
    std::size_t n_cell = hiA > loA ? static_cast<std::size_t>(std::ceil((hiA - loA) / step_)) : 1;
    if (static_cast<double>(n_grid) * static_cast<double>(n_cell) > 2e7)
        throw SpecError("tabulated support too wide for the convolution grid");
    double cell = hiA > loA ? (hiA - loA) / static_cast<double>(n_cell) : 0.0;
    std::vector<double> mass(n_cell), mid(n_cell);
    if (hiA == loA) {
        mass[0] = 1.0;
        mid[0] = loA;
    } else {
        double prev = 0.0;
        for (std::size_t k = 0; k < n_cell; ++k) {
            double right = service.cdf(loA + cell * static_cast<double>(k + 1));
            mass[k] = right - prev;
            prev = right;
            mid[k] = loA + cell * (static_cast<double>(k) + 0.5);
        }
    }
    grid_.resize(n_grid + 1);
    for (std::size_t i = 0; i <= n_grid; ++i) {
        double y = lo_ + step_ * static_cast<double>(i);
        double g = 0.0;
        for (std::size_t k = 0; k < n_cell; ++k) g += mass[k] * vacation.cdf(y - mid[k]);
        grid_[i] = std::min(g, 1.0);
    }
}

double ConvDist::table_lookup(double y) const {
    if (y < lo_) return 0.0;
    double end = lo_ + step_ * static_cast<double>(grid_.size() - 1);
    if (y >= end) {
        if (!grid_has_exp_tail_) return 1.0;
        return 1.0 - grid_tail_coeff_ * std::exp(-grid_tail_rate_ * (y - tail_from_));
    }
    double pos = (y - lo_) / step_;
    std::size_t i = static_cast<std::size_t>(pos);
    double t = pos - static_cast<double>(i);
    return grid_[i] + t * (grid_[i + 1] - grid_[i]);
}

double ConvDist::cdf(double y) const {
    switch (form_) {
        case Form::point:
            return y >= point_ ? 1.0 : 0.0;
        case Form::shifted_exponential:
            return y <= shift_ ? 0.0 : -std::expm1(-rate_ * (y - shift_));
        case Form::two_exponential:
            // the mixture weights have opposite signs, so cancellation can land
            // an ulp outside [0, 1]; clamp here so every caller sees a cdf
            return y <= 0.0 ? 0.0
                            : std::clamp(1.0 - (c_lo_ * std::exp(-rate_lo_ * y) +
                                                c_hi_ * std::exp(-rate_hi_ * y)),
                                         0.0, 1.0);
        case Form::shifted_table:
            return table_component_.cdf(y - shift_);
        case Form::table:
            return table_lookup(y);
    }
    throw SpecError("unknown convolution form");
}

double ConvDist::prob_below(double y) const {
    switch (form_) {
        case Form::point:
            return y > point_ ? 1.0 : 0.0;
        case Form::shifted_table:
            return table_component_.cdf_strict(y - shift_);
        default:
            // remaining forms are continuous (any atoms in the numeric table
            // form are already smeared at the grid scale)
            return cdf(y);
    }
}

double ConvDist::mean() const { return mean_; }

KernelParams KernelParams::make(const QueueConfig& config, double truncation_eps) {
    config.validate();
    KernelParams p;
    p.config = config;
    p.conv = std::make_shared<const ConvDist>(config.service, config.vacation,
                                              1e-3 * std::min(config.T, config.K));
    p.truncation_eps = truncation_eps;
    auto alpha = [&](double r) {
        return std::exp(-r * config.T) / -std::expm1(-r * config.T);
    };
    if (config.vacation.kind == DistKind::exponential)
        p.alpha_lambda = alpha(config.vacation.rate);
    if (config.service.kind == DistKind::exponential) p.alpha_mu = alpha(config.service.rate);
    return p;
}

double conv_cdf(const QueueConfig& config, double x) {
    ConvDist conv(config.service, config.vacation, 1e-3 * std::min(config.T, config.K));
    return conv.cdf(x);
}

ABPair ab_sequences(double x, double w, int n, double T, double K) {
    ABPair p;
    p.a = x - w + static_cast<double>(n + 1) * T;
    p.b = n == 0 ? 0.0 : K - w + static_cast<double>(n) * T;
    return p;
}

namespace {

// sum over n >= 1 of [1 - G(z + nT)], z >= 0
double tail1(double z, const ConvDist& conv, double T, double eps) {
    if (conv.analytic_tails()) {
        // direct terms until every argument is in the tail region, then the
        // geometric remainder in closed form
        double from = conv.tail_from();
        long long n0 = 1;
        if (z + T < from)
            n0 = std::max<long long>(1, static_cast<long long>(std::ceil((from - z) / T - 1e-12)));
        if (n0 > kMaxSeriesTerms)
            throw ConvergenceError("kernel series: tail region unreachable within term budget",
                                   0.0, n0);
        double s = 0.0;
        for (long long n = 1; n < n0; ++n)
            s += 1.0 - conv.cdf(z + static_cast<double>(n) * T);
        for (const auto& t : conv.tails()) {
            double q = std::exp(-t.rate * T);
            s += t.coeff * std::exp(-t.rate * (z + static_cast<double>(n0) * T - from)) /
                 (1.0 - q);
        }
        return s;
    }
    // bounded support: terms vanish exactly once z + nT clears the endpoint
    double upper = conv.upper();
    double s = 0.0;
    for (long long n = 1; n <= kMaxSeriesTerms; ++n) {
        double y = z + static_cast<double>(n) * T;
        double term = 1.0 - conv.cdf(y);
        if (term <= 0.0) return s;
        // nonincreasing terms: the remainder is below term * (terms left)
        double remaining = std::ceil((upper - y) / T);
        if (remaining > 0.0 && term * remaining < eps) return s + term;
        s += term;
    }
    throw ConvergenceError("kernel series exceeded the term budget without certification",
                           1.0 - conv.cdf(z + static_cast<double>(kMaxSeriesTerms) * T),
                           kMaxSeriesTerms);
}

}  // namespace

double kernel_sum(double x, double w, const KernelParams& params) {
    const double T = params.config.T, K = params.config.K;
    if (!(x >= 0.0) || x > K || !(w >= 0.0) || w >= K)
        throw SpecError("kernel_sum needs x in [0, K] and w in [0, K)");
    double g0 = params.conv->cdf(x - w + T);
    if (x + T <= K) return g0;
    double s = g0 + tail1(K - w, *params.conv, T, params.truncation_eps) -
               tail1(x - w + T, *params.conv, T, params.truncation_eps);
    return std::clamp(s, 0.0, 1.0);
}

double loss_sum(double w, const KernelParams& params) {
    const double K = params.config.K;
    if (!(w >= 0.0) || w >= K) throw SpecError("loss_sum needs w in [0, K)");
    return tail1(K - w, *params.conv, params.config.T, params.truncation_eps);
}

}  // namespace vacq
