#include "vacq/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "vacq/rng.hpp"

namespace vacq {

namespace {

struct RepTally {
    std::uint64_t cnt0 = 0;      // w == 0
    std::uint64_t lost = 0;      // reneged (w == K) / balked (w >= K)
    std::uint64_t boundary = 0;  // fell beyond the histogram window
    double sum_w = 0.0;
    std::vector<std::uint64_t> bins;
    std::vector<double> exceed;  // balking: w - K for w > K (pass 1 only)
};

// runs fn(r) for r in [0, reps) across worker threads; deterministic because
// each r writes only its own slot
template <typename Fn>
void parallel_reps(std::uint32_t reps, unsigned threads, Fn&& fn) {
    unsigned nt = threads == 0 ? std::thread::hardware_concurrency() : threads;
    nt = std::max(1u, std::min<unsigned>(nt, reps));
    if (nt == 1) {
        for (std::uint32_t r = 0; r < reps; ++r) fn(r);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nt);
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::uint32_t r = t; r < reps; r += nt) fn(r);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

Estimate pooled_estimate(const std::vector<double>& per_rep) {
    std::size_t R = per_rep.size();
    double mean = 0.0;
    for (double v : per_rep) mean += v;
    mean /= static_cast<double>(R);
    if (R < 2) return Estimate{mean, std::numeric_limits<double>::quiet_NaN()};
    double ss = 0.0;
    for (double v : per_rep) ss += (v - mean) * (v - mean);
    return Estimate{mean, std::sqrt(ss / (static_cast<double>(R) * static_cast<double>(R - 1)))};
}

}  // namespace

SimulationSummary estimate_stationary(const QueueConfig& config, std::uint64_t n_customers,
                                      std::uint64_t burn_in, std::uint32_t replications,
                                      std::uint64_t seed, std::size_t grid_size,
                                      unsigned threads, VacationIndexing indexing) {
    config.validate();
    if (n_customers <= burn_in) throw SpecError("estimate_stationary needs n_customers > burn_in");
    if (replications < 1) throw SpecError("estimate_stationary needs replications >= 1");
    if (grid_size < 2) throw SpecError("estimate_stationary needs grid_size >= 2");

    const bool reneging = config.discipline == Discipline::reneging;
    const double K = config.K;
    const std::size_t m = grid_size;
    const double h = K / static_cast<double>(m);
    const std::uint64_t N = n_customers - burn_in;
    const StabilityResult stab = check_stability(config);
    const CounterRng seeder(seed, 0);

    std::vector<RepTally> tally(replications);
    parallel_reps(replications, threads, [&](std::uint32_t r) {
        PathSimulator sim(config, seeder.child(r), indexing);
        for (std::uint64_t i = 0; i < burn_in; ++i) sim.step();
        RepTally& t = tally[r];
        if (reneging) {
            t.bins.assign(m, 0);
            for (std::uint64_t i = 0; i < N; ++i) {
                PathRecord rec = sim.step();
                t.sum_w += rec.w;
                if (rec.lost)
                    ++t.lost;
                else if (rec.w == 0.0)
                    ++t.cnt0;
                else
                    ++t.bins[std::min(static_cast<std::size_t>(rec.w / h), m - 1)];
            }
            t.boundary = t.lost;  // the deadline atom is the histogram boundary
        } else {
            for (std::uint64_t i = 0; i < N; ++i) {
                PathRecord rec = sim.step();
                t.sum_w += rec.w;
                if (rec.w == 0.0) ++t.cnt0;
                if (rec.lost) {
                    ++t.lost;
                    if (rec.w > K) t.exceed.push_back(rec.w - K);
                }
            }
        }
    });

    // balking: pick the window from the pooled exceedances, then re-run the
    // identical paths to bin them (counter RNG makes the second pass exact)
    std::size_t m_total = m;
    double x_max = K;
    if (!reneging) {
        std::vector<double> exceed;
        for (const auto& t : tally) exceed.insert(exceed.end(), t.exceed.begin(), t.exceed.end());
        if (!exceed.empty()) {
            std::sort(exceed.begin(), exceed.end());
            std::size_t qi = static_cast<std::size_t>(
                (1.0 - 1e-6) * static_cast<double>(exceed.size()));
            double q = exceed[std::min(qi, exceed.size() - 1)];
            x_max = h * std::ceil((K + q) / h - 1e-12);
            m_total = static_cast<std::size_t>(std::llround(x_max / h));
        }
        parallel_reps(replications, threads, [&](std::uint32_t r) {
            PathSimulator sim(config, seeder.child(r), indexing);
            for (std::uint64_t i = 0; i < burn_in; ++i) sim.step();
            RepTally& t = tally[r];
            t.bins.assign(m_total, 0);
            t.boundary = 0;
            for (std::uint64_t i = 0; i < N; ++i) {
                PathRecord rec = sim.step();
                if (rec.w == 0.0) continue;
                std::size_t idx = static_cast<std::size_t>(rec.w / h);
                if (idx >= m_total)
                    ++t.boundary;
                else
                    ++t.bins[idx];
            }
        });
    }

    // pooled counts (index-ordered, deterministic)
    std::uint64_t cnt0 = 0, lost = 0, boundary = 0;
    std::vector<std::uint64_t> bins(m_total, 0);
    std::vector<double> per_w0, per_bk, per_mean;
    for (const auto& t : tally) {
        cnt0 += t.cnt0;
        lost += t.lost;
        boundary += t.boundary;
        for (std::size_t j = 0; j < m_total; ++j) bins[j] += t.bins[j];
        per_w0.push_back(static_cast<double>(t.cnt0) / static_cast<double>(N));
        per_bk.push_back(static_cast<double>(t.lost) / static_cast<double>(N));
        per_mean.push_back(t.sum_w / static_cast<double>(N));
    }

    const double total = static_cast<double>(N) * static_cast<double>(replications);
    MixedDistribution emp;
    emp.x_max = x_max;
    emp.atom0 = static_cast<double>(cnt0) / total;
    emp.boundary_mass = static_cast<double>(boundary) / total;
    emp.boundary_kind = reneging ? BoundaryKind::deadline_atom : BoundaryKind::truncation_tail;
    std::vector<double> p(m_total);
    for (std::size_t j = 0; j < m_total; ++j) p[j] = static_cast<double>(bins[j]) / total;
    emp.density = node_density(p, h);
    emp.cdf.resize(m_total + 1);
    emp.cdf[0] = emp.atom0;
    for (std::size_t j = 0; j < m_total; ++j) emp.cdf[j + 1] = emp.cdf[j] + p[j];

    SimulationSummary out;
    out.n_customers = static_cast<long long>(n_customers);
    out.n_replications = static_cast<int>(replications);
    out.burn_in = static_cast<long long>(burn_in);
    out.W0_hat = pooled_estimate(per_w0);
    out.BK_hat = pooled_estimate(per_bk);
    out.mean_wait = pooled_estimate(per_mean);
    // equal-length replications: the pooled ratios are the same estimators
    // without the second rounding, so the summary matches the histogram exactly
    out.W0_hat.value = emp.atom0;
    out.BK_hat.value = static_cast<double>(lost) / total;
    out.empirical = std::move(emp);
    out.seed = seed;
    out.stable = stab.stable;
    return out;
}

TailEstimate estimate_transient_tail(const QueueConfig& config, std::uint64_t n, double x,
                                     std::uint64_t replications, std::uint64_t seed) {
    config.validate();
    if (n < 1) throw SpecError("estimate_transient_tail needs path position n >= 1");
    if (!(x >= 0.0)) throw SpecError("estimate_transient_tail needs x >= 0");
    if (replications < 1) throw SpecError("estimate_transient_tail needs replications >= 1");
    const CounterRng seeder(seed, 0);
    std::uint64_t hits = 0;
    for (std::uint64_t r = 0; r < replications; ++r) {
        PathSimulator sim(config, seeder.child(r));
        PathRecord rec{};
        for (std::uint64_t i = 0; i <= n; ++i) rec = sim.step();
        if (rec.w > x) ++hits;
    }
    double p = static_cast<double>(hits) / static_cast<double>(replications);
    double se = std::sqrt(p * (1.0 - p) / static_cast<double>(replications));
    return TailEstimate{p, se, replications};
}

std::vector<double> stationary_samples(const QueueConfig& config, std::uint64_t n_samples,
                                       std::uint64_t burn_in, std::uint64_t seed,
                                       std::uint64_t stride, VacationIndexing indexing) {
    config.validate();
    if (n_samples == 0) throw SpecError("stationary_samples needs n_samples >= 1");
    if (stride < 1) throw SpecError("stationary_samples needs stride >= 1");
    PathSimulator sim(config, CounterRng(seed, 0).child(0), indexing);
    for (std::uint64_t i = 0; i < burn_in; ++i) sim.step();
    std::vector<double> out;
    out.reserve(n_samples);
    while (out.size() < n_samples) {
        out.push_back(sim.step().w);
        for (std::uint64_t s = 1; s < stride && out.size() < n_samples; ++s) sim.step();
    }
    return out;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw SpecError("ks_two_sample needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    // once one sample is exhausted its ecdf sits at 1; the largest remaining
    // gap is at the exhaustion point
    if (i < a.size()) d = std::max(d, 1.0 - static_cast<double>(i) / na);
    if (j < b.size()) d = std::max(d, 1.0 - static_cast<double>(j) / nb);

    double ne = na * nb / (na + nb);
    double sq = std::sqrt(ne);
    double lam = (sq + 0.12 + 0.11 / sq) * d;
    double p = 1.0;
    if (lam > 1e-3) {
        double s = 0.0;
        for (int k = 1; k <= 100; ++k) {
            double term = std::exp(-2.0 * lam * lam * static_cast<double>(k) *
                                   static_cast<double>(k));
            s += (k % 2 == 1 ? term : -term);
            if (term < 1e-18) break;
        }
        p = std::clamp(2.0 * s, 0.0, 1.0);
    }
    return KsResult{d, p};
}

}  // namespace vacq
