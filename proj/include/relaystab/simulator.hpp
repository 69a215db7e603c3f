#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "relaystab/analytic.hpp"
#include "relaystab/policy.hpp"

namespace relaystab {

// Slot-level simulation setup. In dominant mode the relay transmits dummy
// packets whenever its drawn queue is empty; saturated sources are refilled
// every slot (their packets count as departures/arrivals but are excluded
// from delay statistics).
struct SimConfig {
    Policy policy;
    DemandVector demand;
    std::int64_t horizon = 1'000'000;
    std::int64_t warmup = 100'000;
    std::uint64_t seed = 1;
    bool dominant_mode = false;
    std::vector<int> saturated;

    void validate(int M) const;
};

struct SimStats {
    std::uint64_t seed = 0;
    std::int64_t horizon = 0;
    std::int64_t warmup = 0;

    std::vector<double> departure_rate;   // packets leaving the source queue, per slot
    std::vector<double> delivery_rate;    // packets reaching the destination, per slot
    std::vector<double> mean_source_queue;
    std::vector<double> mean_relay_queue;
    std::vector<double> mean_delay;       // end-to-end slots; NaN when nothing delivered
    std::vector<double> delay_std_error;  // batch-means standard error of the mean
    std::vector<std::map<std::int64_t, std::int64_t>> delay_histogram;

    // relay behaviour counters (whole run)
    std::int64_t slots_listening = 0;
    std::int64_t slots_transmit_idle = 0;
    std::int64_t slots_interfering = 0;
    std::int64_t slots_silent = 0;
    std::int64_t dummy_packets = 0;
    std::int64_t half_duplex_violations = 0;  // audited, must stay 0

    // packet conservation: arrivals (dummies excluded) == delivered + still queued
    std::vector<std::int64_t> arrivals_total;
    std::vector<std::int64_t> delivered_total;
    std::vector<std::int64_t> queued_at_end;

    // per-queue time averages over the post-warmup middle and final thirds,
    // for stability classification
    std::vector<double> source_queue_mid_third, source_queue_final_third;
    std::vector<double> relay_queue_mid_third, relay_queue_final_third;
};

SimStats simulate(const SimConfig& config, const LinkProbabilities& links);

enum class QueueVerdict { Bounded, Growing, Inconclusive };

struct ProbeResult {
    double factor = 0.0;
    std::vector<QueueVerdict> source_queue;  // per source; saturated ones marked Inconclusive
    std::vector<QueueVerdict> relay_queue;
    bool all_bounded = false;
    bool any_growing = false;
};

// Scales the demand of every non-saturated source by each factor and
// classifies each probed queue from the thirds averages. A queue is growing
// when the final third exceeds 1.4x the middle third by more than a
// horizon-scaled margin; saturated sources are not probed (their queues are
// artificial by construction).
std::vector<ProbeResult> stability_probe(const SimConfig& config, const LinkProbabilities& links,
                                         const std::vector<double>& factors);

struct DelayCurvePoint {
    DemandVector demand;
    bool stable = false;
    std::vector<double> mean_delay;
    std::vector<double> std_error;
};

// Empirical delay at each demand point; points that are analytically
// unstable are marked and not simulated.
std::vector<DelayCurvePoint> delay_measurement(const SimConfig& config,
                                               const LinkProbabilities& links,
                                               const std::vector<DemandVector>& demand_grid);

}  // namespace relaystab
