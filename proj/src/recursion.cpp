#include "vacq/recursion.hpp"

#include <algorithm>

namespace vacq {

RenegingStep next_reneging(double w_last_served, int k, double sigma, double v,
                           double T, double K) {
    if (!(w_last_served >= 0.0) || w_last_served >= K)
        throw SpecError("next_reneging anchor wait must lie in [0, K): only served "
                        "customers anchor the recursion");
    if (k < 0 || !(sigma >= 0.0) || !(v >= 0.0) || !(T > 0.0) || !(K > 0.0))
        throw SpecError("next_reneging: bad arguments");
    double uncapped =
        std::max(w_last_served + sigma + v - static_cast<double>(k + 1) * T, 0.0);
    // a customer whose uncapped wait reaches K exactly cannot wait out the
    // deadline: lost, stored wait pinned at K
    if (uncapped >= K) return RenegingStep{K, true};
    return RenegingStep{uncapped, false};
}

double step_balking(double w, double sigma, double v, double T, double K) {
    if (!(w >= 0.0) || !(sigma >= 0.0) || !(v >= 0.0) || !(T > 0.0) || !(K > 0.0))
        throw SpecError("step_balking: bad arguments");
    double load = w < K ? w + sigma + v : w;
    return std::max(load - T, 0.0);
}

PathSimulator::PathSimulator(const QueueConfig& config, std::uint64_t seed,
                             VacationIndexing indexing)
    : config_(config),
      service_rng_(seed, 1),
      vacation_rng_(seed, 2),
      indexing_(indexing) {
    config_.validate();
}

double PathSimulator::service_draw(std::uint64_t i) {
    return config_.service.sample(service_rng_.uniform(i));
}

double PathSimulator::vacation_draw(std::uint64_t i) {
    return config_.vacation.sample(vacation_rng_.uniform(i));
}

PathRecord PathSimulator::step() {
    std::uint64_t pos = n_++;
    if (config_.discipline == Discipline::balking) {
        double cur = w_tilde_;
        bool balked = cur >= config_.K;
        if (balked) {
            w_tilde_ = std::max(cur - config_.T, 0.0);
        } else {
            // draws are indexed so a joining customer consumes exactly one
            // service and one vacation sample
            double sigma = service_draw(pos);
            double v = vacation_draw(indexing_ == VacationIndexing::fresh_draw ? pos : served_);
            ++served_;
            w_tilde_ = step_balking(cur, sigma, v, config_.T, config_.K);
        }
        return PathRecord{cur, balked};
    }

    // reneging
    if (!anchor_primed_) {
        // position 0: empty start, always served
        w_anchor_ = 0.0;
        sigma_anchor_ = service_draw(pos);
        v_anchor_ =
            vacation_draw(indexing_ == VacationIndexing::fresh_draw ? pos : served_);
        ++served_;
        k_ = 0;
        anchor_primed_ = true;
        return PathRecord{0.0, false};
    }
    RenegingStep s =
        next_reneging(w_anchor_, k_, sigma_anchor_, v_anchor_, config_.T, config_.K);
    if (s.lost) {
        // the anchor and its draws stay; only the loss count grows
        ++k_;
        return PathRecord{config_.K, true};
    }
    w_anchor_ = s.w_next;
    sigma_anchor_ = service_draw(pos);
    v_anchor_ = vacation_draw(indexing_ == VacationIndexing::fresh_draw ? pos : served_);
    ++served_;
    k_ = 0;
    return PathRecord{s.w_next, false};
}

std::vector<PathRecord> run_path(const QueueConfig& config, std::uint64_t n_customers,
                                 std::uint64_t seed, VacationIndexing indexing) {
    if (n_customers == 0) throw SpecError("run_path needs n_customers >= 1");
    PathSimulator sim(config, seed, indexing);
    std::vector<PathRecord> out;
    out.reserve(n_customers);
    for (std::uint64_t i = 0; i < n_customers; ++i) out.push_back(sim.step());
    return out;
}

}  // namespace vacq
