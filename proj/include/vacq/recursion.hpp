#pragma once

#include <cstdint>
#include <vector>

#include "vacq/model.hpp"
#include "vacq/rng.hpp"

namespace vacq {

// How vacation draws are indexed along a path. fresh_draw uses the customer
// (or loss-anchor) index, so the anchor's vacation is reused across the losses
// it absorbs; per_service draws one vacation per completed service.
// Both agree in law here because vacations are iid and exactly one vacation
// follows each service.
enum class VacationIndexing { fresh_draw, per_service };

struct PathRecord {
    double w;
    bool lost;
};

struct RenegingStep {
    double w_next;
    bool lost;
};

// One step of the reneging recursion from the last served customer:
// w_{n+1} = min[(w_anchor + sigma + v - (k+1)T)+, K], lost iff the uncapped
// value reaches K. k counts the consecutive losses since the anchor, and
// (sigma, v) are the anchor's own draws, reused while k grows.
// Requires w_last_served < K.
RenegingStep next_reneging(double w_last_served, int k, double sigma, double v,
                           double T, double K);

// One step of the balking recursion: the customer joins only if the current
// workload is below K, and the workload always drains by T.
double step_balking(double w, double sigma, double v, double T, double K);

// Sequential path generator; the single source of truth for stepping either
// discipline. Path positions are 0-based: the first step() emits w_0 = 0
// (empty start).
class PathSimulator {
public:
    PathSimulator(const QueueConfig& config, std::uint64_t seed,
                  VacationIndexing indexing = VacationIndexing::fresh_draw);

    // Advances to the next customer and returns its record.
    // Reneging: record.lost marks a reneged customer (w stored as K).
    // Balking: record.w is the workload found on arrival, record.lost marks
    // a customer who refused to join.
    PathRecord step();

    std::uint64_t steps_taken() const { return n_; }  // records emitted so far

private:
    double service_draw(std::uint64_t i);
    double vacation_draw(std::uint64_t i);

    QueueConfig config_;
    CounterRng service_rng_;
    CounterRng vacation_rng_;
    VacationIndexing indexing_;
    std::uint64_t n_ = 0;            // customers emitted
    std::uint64_t served_ = 0;       // completed services (per_service index)
    // reneging state: last served customer's wait, draws, and loss run length
    double w_anchor_ = 0.0;
    double sigma_anchor_ = 0.0;
    double v_anchor_ = 0.0;
    int k_ = 0;
    bool anchor_primed_ = false;
    // balking state
    double w_tilde_ = 0.0;
};

// First n_customers records of a path: positions 0 .. n_customers-1, with
// w_0 = 0 always first.
std::vector<PathRecord> run_path(const QueueConfig& config, std::uint64_t n_customers,
                                 std::uint64_t seed,
                                 VacationIndexing indexing = VacationIndexing::fresh_draw);

}  // namespace vacq
