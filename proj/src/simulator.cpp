#include "relaystab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "relaystab/rng.hpp"

namespace relaystab {

namespace {

struct Packet {
    std::int64_t arrival = 0;
    bool synthetic = false;  // saturation refill; excluded from delay stats
};

struct BatchMeans {
    static constexpr int kBatches = 10;
    double sum[kBatches] = {};
    std::int64_t count[kBatches] = {};

    void add(int batch, double v) {
        sum[batch] += v;
        ++count[batch];
    }
    double mean() const {
        double s = 0.0;
        std::int64_t c = 0;
        for (int b = 0; b < kBatches; ++b) {
            s += sum[b];
            c += count[b];
        }
        return c ? s / static_cast<double>(c) : std::numeric_limits<double>::quiet_NaN();
    }
    double std_error() const {
        int used = 0;
        double m[kBatches];
        for (int b = 0; b < kBatches; ++b)
            if (count[b]) m[used++] = sum[b] / static_cast<double>(count[b]);
        if (used < 2) return std::numeric_limits<double>::quiet_NaN();
        double mu = 0.0;
        for (int b = 0; b < used; ++b) mu += m[b];
        mu /= used;
        double var = 0.0;
        for (int b = 0; b < used; ++b) var += (m[b] - mu) * (m[b] - mu);
        var /= (used - 1);
        return std::sqrt(var / used);
    }
};

}  // namespace

void SimConfig::validate(int M) const {
    policy.validate();
    demand.validate();
    if (policy.num_sources() != M || static_cast<int>(demand.lambda.size()) != M)
        throw std::invalid_argument("SimConfig: dimension mismatch");
    if (horizon <= warmup || warmup < 0)
        throw std::invalid_argument("SimConfig: need horizon > warmup >= 0");
    for (int s : saturated)
        if (s < 0 || s >= M) throw std::invalid_argument("SimConfig: saturated index out of range");
}

SimStats simulate(const SimConfig& config, const LinkProbabilities& links) {
    const int M = links.M;
    config.validate(M);
    const Policy& pol = config.policy;
    const auto eff = EffectiveLinks::make(pol.scheme, links);
    const bool sbc_like = eff.sbc_like();

    std::vector<bool> saturated(M, false);
    for (int s : config.saturated) saturated[s] = true;

    Rng rng(config.seed);
    std::vector<std::deque<Packet>> qs(M), qr(M);

    SimStats st;
    st.seed = config.seed;
    st.horizon = config.horizon;
    st.warmup = config.warmup;
    st.departure_rate.assign(M, 0.0);
    st.delivery_rate.assign(M, 0.0);
    st.mean_source_queue.assign(M, 0.0);
    st.mean_relay_queue.assign(M, 0.0);
    st.mean_delay.assign(M, 0.0);
    st.delay_std_error.assign(M, 0.0);
    st.delay_histogram.resize(M);
    st.arrivals_total.assign(M, 0);
    st.delivered_total.assign(M, 0);
    st.queued_at_end.assign(M, 0);
    st.source_queue_mid_third.assign(M, 0.0);
    st.source_queue_final_third.assign(M, 0.0);
    st.relay_queue_mid_third.assign(M, 0.0);
    st.relay_queue_final_third.assign(M, 0.0);

    std::vector<std::int64_t> departures(M, 0), deliveries(M, 0);
    std::vector<double> qs_sum(M, 0.0), qr_sum(M, 0.0);
    std::vector<double> qs_third(3 * M, 0.0), qr_third(3 * M, 0.0);
    std::vector<BatchMeans> delay_stats(M);

    const std::int64_t post = config.horizon - config.warmup;
    const std::int64_t third = post / 3;
    const std::int64_t stats_slots = config.horizon - config.warmup;

    auto record_delivery = [&](int src, const Packet& p, std::int64_t t) {
        ++deliveries[src];
        if (p.synthetic || p.arrival < config.warmup || t < config.warmup) return;
        const std::int64_t d = t - p.arrival + 1;
        ++st.delay_histogram[src][d];
        const std::int64_t pos = t - config.warmup;
        const int batch =
            static_cast<int>(std::min<std::int64_t>(BatchMeans::kBatches - 1,
                                                    pos * BatchMeans::kBatches / post));
        delay_stats[src].add(batch, static_cast<double>(d));
    };

    for (std::int64_t t = 0; t < config.horizon; ++t) {
        const int owner = static_cast<int>(rng.pick({pol.w.data(), pol.w.size()}));
        const int i = owner >= M ? M - 1 : owner;  // guard fp roundoff in the weights

        for (int j = 0; j < M; ++j) {
            if (rng.bernoulli(config.demand.lambda[j])) {
                qs[j].push_back({t, false});
                ++st.arrivals_total[j];
            }
            if (saturated[j] && qs[j].empty()) {
                qs[j].push_back({t, true});
                ++st.arrivals_total[j];
            }
        }

        const bool busy = !qs[i].empty();

        // relay action: kListen, kSilent, or j >= 0 meaning transmit from qr[j]
        constexpr int kListen = -1, kSilent = -2;
        int act = kListen;
        if (sbc_like && !busy) {
            act = (!qr[i].empty() || config.dominant_mode) ? i : kSilent;
        } else {
            const auto drawn = rng.pick({pol.action[i].data(), pol.action[i].size()});
            act = drawn >= static_cast<std::size_t>(M) ? kListen : static_cast<int>(drawn);
        }

        bool relay_tx = false, dummy = false;
        int relay_q = -1;
        if (act >= 0) {
            relay_q = act;
            if (!qr[relay_q].empty()) {
                relay_tx = true;
            } else if (config.dominant_mode) {
                relay_tx = true;
                dummy = true;
            } else {
                act = kSilent;  // nothing to send; stays quiet
            }
        }

        if (relay_tx) {
            if (busy) ++st.slots_interfering;
            else ++st.slots_transmit_idle;
            if (dummy) ++st.dummy_packets;
        } else if (act == kListen) {
            ++st.slots_listening;
        } else {
            ++st.slots_silent;
        }

        bool relay_received = false;
        if (busy) {
            if (relay_tx) {
                // independent marginal outcomes for the two packets
                if (rng.bernoulli(eff.g_sd_r(i))) {
                    const Packet p = qs[i].front();
                    qs[i].pop_front();
                    ++departures[i];
                    record_delivery(i, p, t);
                }
                if (!dummy && rng.bernoulli(eff.g_rd_s(i))) {
                    const Packet p = qr[relay_q].front();
                    qr[relay_q].pop_front();
                    record_delivery(relay_q, p, t);
                }
            } else {
                const bool dest_ok = rng.bernoulli(links.f_sd[i]);
                const bool relay_ok = act == kListen && rng.bernoulli(links.f_sr[i]);
                if (dest_ok) {
                    const Packet p = qs[i].front();
                    qs[i].pop_front();
                    ++departures[i];
                    record_delivery(i, p, t);
                } else if (relay_ok && eff.helped[i]) {
                    relay_received = true;
                    const Packet p = qs[i].front();
                    qs[i].pop_front();
                    ++departures[i];
                    qr[i].push_back(p);
                }
            }
        } else if (relay_tx) {
            if (dummy) {
                rng.bernoulli(links.f_rd);  // channel outcome of the dummy, discarded
            } else if (rng.bernoulli(links.f_rd)) {
                const Packet p = qr[relay_q].front();
                qr[relay_q].pop_front();
                record_delivery(relay_q, p, t);
            }
        }
        if (relay_received && relay_tx) ++st.half_duplex_violations;

        if (t >= config.warmup) {
            const std::int64_t pos = t - config.warmup;
            const int bucket = third > 0 ? static_cast<int>(std::min<std::int64_t>(2, pos / third))
                                         : 2;
            for (int j = 0; j < M; ++j) {
                qs_sum[j] += static_cast<double>(qs[j].size());
                qr_sum[j] += static_cast<double>(qr[j].size());
                qs_third[3 * j + bucket] += static_cast<double>(qs[j].size());
                qr_third[3 * j + bucket] += static_cast<double>(qr[j].size());
            }
        }
    }

    for (int j = 0; j < M; ++j) {
        st.departure_rate[j] = static_cast<double>(departures[j]) / config.horizon;
        st.delivery_rate[j] = static_cast<double>(deliveries[j]) / config.horizon;
        st.mean_source_queue[j] = qs_sum[j] / stats_slots;
        st.mean_relay_queue[j] = qr_sum[j] / stats_slots;
        st.mean_delay[j] = delay_stats[j].mean();
        st.delay_std_error[j] = delay_stats[j].std_error();
        st.delivered_total[j] = deliveries[j];
        st.queued_at_end[j] =
            static_cast<std::int64_t>(qs[j].size()) + static_cast<std::int64_t>(qr[j].size());
        if (third > 0) {
            st.source_queue_mid_third[j] = qs_third[3 * j + 1] / third;
            st.relay_queue_mid_third[j] = qr_third[3 * j + 1] / third;
            const std::int64_t last = post - 2 * third;
            st.source_queue_final_third[j] = qs_third[3 * j + 2] / last;
            st.relay_queue_final_third[j] = qr_third[3 * j + 2] / last;
        }
    }
    return st;
}

namespace {

QueueVerdict classify(double mid, double fin, std::int64_t post_slots) {
    // a queue growing linearly from zero shows fin/mid = 5/3; the margin term
    // rejects excursions of stable near-critical queues
    const double margin = std::max(2.0, 5e-5 * static_cast<double>(post_slots));
    return fin > 1.4 * mid + margin ? QueueVerdict::Growing : QueueVerdict::Bounded;
}

}  // namespace

std::vector<ProbeResult> stability_probe(const SimConfig& config, const LinkProbabilities& links,
                                         const std::vector<double>& factors) {
    const int M = links.M;
    std::vector<bool> saturated(M, false);
    for (int s : config.saturated) saturated[s] = true;

    std::vector<ProbeResult> out;
    for (double f : factors) {
        SimConfig c = config;
        for (int j = 0; j < M; ++j)
            if (!saturated[j]) c.demand.lambda[j] = std::min(0.999999, config.demand.lambda[j] * f);
        const auto st = simulate(c, links);
        ProbeResult r;
        r.factor = f;
        r.source_queue.assign(M, QueueVerdict::Inconclusive);
        r.relay_queue.assign(M, QueueVerdict::Inconclusive);
        const std::int64_t post = c.horizon - c.warmup;
        r.all_bounded = true;
        r.any_growing = false;
        for (int j = 0; j < M; ++j) {
            if (saturated[j]) continue;  // artificial queues, not probed
            r.source_queue[j] =
                classify(st.source_queue_mid_third[j], st.source_queue_final_third[j], post);
            r.relay_queue[j] =
                classify(st.relay_queue_mid_third[j], st.relay_queue_final_third[j], post);
            if (r.source_queue[j] != QueueVerdict::Bounded ||
                r.relay_queue[j] != QueueVerdict::Bounded)
                r.all_bounded = false;
            if (r.source_queue[j] == QueueVerdict::Growing ||
                r.relay_queue[j] == QueueVerdict::Growing)
                r.any_growing = true;
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<DelayCurvePoint> delay_measurement(const SimConfig& config,
                                               const LinkProbabilities& links,
                                               const std::vector<DemandVector>& demand_grid) {
    std::vector<DelayCurvePoint> out;
    for (const auto& demand : demand_grid) {
        DelayCurvePoint p;
        p.demand = demand;
        const auto ev = evaluate_rates(config.policy, links, demand);
        bool stable = true;
        std::vector<bool> saturated(links.M, false);
        for (int s : config.saturated) saturated[s] = true;
        for (int j = 0; j < links.M; ++j) {
            if (saturated[j]) continue;
            if (!ev.source_stable[j] || !ev.relay_stable[j]) stable = false;
        }
        p.stable = stable;
        if (stable) {
            SimConfig c = config;
            c.demand = demand;
            const auto st = simulate(c, links);
            p.mean_delay = st.mean_delay;
            p.std_error = st.delay_std_error;
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace relaystab
