#include "vacq/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vacq/kernel.hpp"

namespace vacq {

namespace {

void validate_spec(const DistributionSpec& spec) {
    switch (spec.kind) {
        case DistKind::deterministic:
            if (!(spec.value >= 0.0) || !std::isfinite(spec.value))
                throw SpecError("deterministic value must be finite and >= 0");
            return;
        case DistKind::exponential:
            if (!(spec.rate > 0.0) || !std::isfinite(spec.rate))
                throw SpecError("exponential rate must be finite and > 0");
            return;
        case DistKind::tabulated: {
            const auto& p = spec.levels;
            const auto& q = spec.quantiles;
            if (p.size() != q.size() || p.size() < 2)
                throw SpecError("tabulated law needs >= 2 (level, quantile) rows");
            if (p.front() != 0.0 || p.back() != 1.0)
                throw SpecError("tabulated levels must run from 0 to 1");
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (!std::isfinite(p[i]) || !std::isfinite(q[i]) || q[i] < 0.0)
                    throw SpecError("tabulated rows must be finite with quantiles >= 0");
                if (i > 0 && !(p[i] > p[i - 1]))
                    throw SpecError("tabulated levels must be strictly increasing");
                if (i > 0 && q[i] < q[i - 1])
                    throw SpecError("tabulated quantiles must be nondecreasing");
            }
            return;
        }
    }
    throw SpecError("unknown distribution kind");
}

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw SpecError(what + ": trailing characters in '" + text + "'");
        return v;
    } catch (const SpecError&) {
        throw;
    } catch (const std::exception&) {
        throw SpecError(what + ": cannot parse '" + text + "'");
    }
}

std::string trimmed(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

DistributionSpec parse_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open quantile table '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || trimmed(line) != "p,q")
        throw SpecError("quantile table '" + path + "' must start with header 'p,q'");
    std::vector<double> levels, quantiles;
    while (std::getline(in, line)) {
        line = trimmed(line);
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw SpecError("quantile table '" + path + "': row '" + line + "' is not 'p,q'");
        levels.push_back(parse_number(trimmed(line.substr(0, comma)), "level"));
        quantiles.push_back(parse_number(trimmed(line.substr(comma + 1)), "quantile"));
    }
    return DistributionSpec::tabulated(std::move(levels), std::move(quantiles));
}

}  // namespace

DistributionSpec DistributionSpec::deterministic(double v) {
    DistributionSpec s;
    s.kind = DistKind::deterministic;
    s.value = v;
    validate_spec(s);
    return s;
}

DistributionSpec DistributionSpec::exponential(double r) {
    DistributionSpec s;
    s.kind = DistKind::exponential;
    s.rate = r;
    validate_spec(s);
    return s;
}

DistributionSpec DistributionSpec::tabulated(std::vector<double> levels,
                                             std::vector<double> quantiles) {
    DistributionSpec s;
    s.kind = DistKind::tabulated;
    s.levels = std::move(levels);
    s.quantiles = std::move(quantiles);
    validate_spec(s);
    return s;
}

DistributionSpec DistributionSpec::parse(const std::string& text) {
    if (text.rfind("det:", 0) == 0) return deterministic(parse_number(text.substr(4), "det value"));
    if (text.rfind("exp:", 0) == 0) return exponential(parse_number(text.substr(4), "exp rate"));
    if (text.rfind("tab:", 0) == 0) return parse_table_csv(text.substr(4));
    throw SpecError("distribution '" + text + "' must be det:<value>, exp:<rate>, or tab:<path>");
}

double DistributionSpec::sample(double u) const {
    if (!(u >= 0.0) || u >= 1.0) throw SpecError("sample() needs u in [0,1)");
    switch (kind) {
        case DistKind::deterministic:
            return value;
        case DistKind::exponential:
            return -std::log1p(-u) / rate;
        case DistKind::tabulated: {
            // levels run 0..1 and u < 1, so the bracketing segment exists
            auto it = std::upper_bound(levels.begin(), levels.end(), u);
            std::size_t j = static_cast<std::size_t>(it - levels.begin());
            std::size_t i = j - 1;
            double t = (u - levels[i]) / (levels[j] - levels[i]);
            return quantiles[i] + t * (quantiles[j] - quantiles[i]);
        }
    }
    throw SpecError("unknown distribution kind");
}

double DistributionSpec::cdf(double x) const {
    switch (kind) {
        case DistKind::deterministic:
            return x >= value ? 1.0 : 0.0;
        case DistKind::exponential:
            return x <= 0.0 ? 0.0 : -std::expm1(-rate * x);
        case DistKind::tabulated: {
            if (x < quantiles.front()) return 0.0;
            if (x >= quantiles.back()) return 1.0;
            // last level whose quantile is <= x; a run of equal quantiles at x
            // collapses to its top level (right-continuity at atoms)
            auto it = std::upper_bound(quantiles.begin(), quantiles.end(), x);
            std::size_t j = static_cast<std::size_t>(it - quantiles.begin());
            std::size_t i = j - 1;
            double t = (x - quantiles[i]) / (quantiles[j] - quantiles[i]);
            return levels[i] + t * (levels[j] - levels[i]);
        }
    }
    throw SpecError("unknown distribution kind");
}

double DistributionSpec::cdf_strict(double x) const {
    switch (kind) {
        case DistKind::deterministic:
            return x > value ? 1.0 : 0.0;
        case DistKind::exponential:
            return cdf(x);
        case DistKind::tabulated: {
            if (x <= quantiles.front()) return 0.0;
            if (x > quantiles.back()) return 1.0;
            // first level whose quantile reaches x: the left limit of the CDF
            auto it = std::lower_bound(quantiles.begin(), quantiles.end(), x);
            std::size_t j = static_cast<std::size_t>(it - quantiles.begin());
            std::size_t i = j - 1;
            double t = (x - quantiles[i]) / (quantiles[j] - quantiles[i]);
            return levels[i] + t * (levels[j] - levels[i]);
        }
    }
    throw SpecError("unknown distribution kind");
}

double DistributionSpec::mean() const {
    switch (kind) {
        case DistKind::deterministic:
            return value;
        case DistKind::exponential:
            return 1.0 / rate;
        case DistKind::tabulated: {
            // integral of the piecewise-linear quantile function over [0,1]
            double m = 0.0;
            for (std::size_t i = 0; i + 1 < levels.size(); ++i)
                m += (levels[i + 1] - levels[i]) * 0.5 * (quantiles[i] + quantiles[i + 1]);
            return m;
        }
    }
    throw SpecError("unknown distribution kind");
}

bool DistributionSpec::bounded() const { return kind != DistKind::exponential; }

double DistributionSpec::upper() const {
    switch (kind) {
        case DistKind::deterministic:
            return value;
        case DistKind::exponential:
            return std::numeric_limits<double>::infinity();
        case DistKind::tabulated:
            return quantiles.back();
    }
    throw SpecError("unknown distribution kind");
}

void QueueConfig::validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw SpecError("T must be finite and > 0");
    if (!(K > 0.0) || !std::isfinite(K)) throw SpecError("K must be finite and > 0");
    validate_spec(service);
    validate_spec(vacation);
}

StabilityResult check_stability(const QueueConfig& config) {
    config.validate();
    ConvDist conv(config.service, config.vacation, 1e-3 * std::min(config.T, config.K));
    double p = conv.prob_below(config.T);
    return StabilityResult{p, p > 0.0};
}

std::vector<double> node_density(const std::vector<double>& panel_mass, double h) {
    std::size_t m = panel_mass.size();
    std::vector<double> f(m + 1);
    f[0] = panel_mass[0] / h;
    for (std::size_t j = 1; j < m; ++j) f[j] = (panel_mass[j - 1] + panel_mass[j]) / (2.0 * h);
    f[m] = panel_mass[m - 1] / h;
    return f;
}

double MixedDistribution::trapezoid_density() const {
    double s = 0.5 * (density.front() + density.back());
    for (std::size_t i = 1; i + 1 < density.size(); ++i) s += density[i];
    return s * h();
}

double MixedDistribution::normalization_error() const {
    return std::abs(atom0 + trapezoid_density() + boundary_mass - 1.0);
}

double MixedDistribution::cdf_at(double x) const {
    if (x < 0.0) return 0.0;
    if (x >= x_max) return 1.0;
    double step = h();
    double pos = x / step;
    std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= cdf.size()) return cdf.back();
    double t = pos - static_cast<double>(i);
    return cdf[i] + t * (cdf[i + 1] - cdf[i]);
}

void MixedDistribution::validate(double tol) const {
    if (!(x_max > 0.0)) throw SpecError("mixed law: x_max must be > 0");
    if (density.size() < 2 || density.size() != cdf.size())
        throw SpecError("mixed law: density and cdf need matching node counts >= 2");
    if (atom0 < 0.0 || boundary_mass < 0.0) throw SpecError("mixed law: negative mass");
    for (double d : density)
        if (!(d >= 0.0)) throw SpecError("mixed law: negative density");
    for (std::size_t i = 0; i + 1 < cdf.size(); ++i)
        if (cdf[i + 1] < cdf[i] - tol) throw SpecError("mixed law: decreasing cdf");
    if (std::abs(cdf.front() - atom0) > tol)
        throw SpecError("mixed law: cdf[0] must equal the atom at 0");
    if (std::abs(cdf.back() - (1.0 - boundary_mass)) > tol)
        throw SpecError("mixed law: cdf at x_max must equal 1 - boundary_mass");
    if (std::abs(trapezoid_density() - (cdf.back() - cdf.front())) > tol)
        throw SpecError("mixed law: density integral disagrees with cdf span");
    if (normalization_error() > tol) throw SpecError("mixed law: total mass != 1");
}

}  // namespace vacq
