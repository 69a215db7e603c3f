#include "relaystab/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "relaystab/rng.hpp"

namespace relaystab {

void PhyParams::validate() const {
    if (!(power > 0.0)) throw std::invalid_argument("PhyParams: power must be > 0");
    if (!(rate > 0.0)) throw std::invalid_argument("PhyParams: rate must be > 0");
}

double PhyParams::eta() const { return (std::exp2(rate) - 1.0) / power; }
double PhyParams::eta1() const { return (std::exp2(2.0 * rate) - 1.0) / power; }

void ChannelVariances::validate() const {
    if (source_dest.empty() || source_dest.size() != source_relay.size())
        throw std::invalid_argument("ChannelVariances: need matching s-d and s-r variance lists");
    for (double v : source_dest)
        if (!(v > 0.0)) throw std::invalid_argument("ChannelVariances: s-d variance must be > 0");
    for (double v : source_relay)
        if (!(v > 0.0)) throw std::invalid_argument("ChannelVariances: s-r variance must be > 0");
    if (!(relay_dest > 0.0))
        throw std::invalid_argument("ChannelVariances: r-d variance must be > 0");
}

SicIntegrationParams SicIntegrationParams::make(const PhyParams& phy, double rho2_desired,
                                                double rho2_interferer) {
    if (!(rho2_desired > 0.0) || !(rho2_interferer > 0.0))
        throw std::invalid_argument("SicIntegrationParams: variances must be > 0");
    SicIntegrationParams p;
    p.eta = phy.eta();
    p.eta1 = phy.eta1();
    p.gamma_desired = 1.0 / rho2_desired;
    p.gamma_interferer = 1.0 / rho2_interferer;
    p.validate();
    return p;
}

void SicIntegrationParams::validate() const {
    if (!(eta > 0.0) || !(eta1 > eta))
        throw std::invalid_argument("SicIntegrationParams: need 0 < eta < eta1");
    if (!(gamma_desired > 0.0) || !(gamma_interferer > 0.0))
        throw std::invalid_argument("SicIntegrationParams: gammas must be > 0");
}

double success_prob(const PhyParams& phy, double rho2) {
    phy.validate();
    if (!(rho2 > 0.0)) throw std::invalid_argument("success_prob: link variance missing or <= 0");
    return std::exp(-(std::exp2(phy.rate) - 1.0) / (phy.power * rho2));
}

double treat_as_noise_prob(const SicIntegrationParams& p, double power) {
    p.validate();
    const double g1 = p.gamma_desired, g2 = p.gamma_interferer;
    return g2 * std::exp(-p.eta * g1) / (g2 + power * g1 * p.eta);
}

double joint_decode_prob(const SicIntegrationParams& p) {
    p.validate();
    const double eta = p.eta, eta1 = p.eta1;
    const double g1 = p.gamma_desired, g2 = p.gamma_interferer;
    if (eta1 <= 2.0 * eta) {
        // the sum constraint is inactive on {x > eta, y > eta}
        return std::exp(-(g1 + g2) * eta);
    }
    const double d = g1 - g2;
    if (std::abs(d) < 1e-9 * std::max(g1, g2)) {
        const double g = 0.5 * (g1 + g2);
        return std::exp(-g * eta1) * (1.0 + g * (eta1 - 2.0 * eta));
    }
    // the exp(-g2*eta1) prefactor folded into both exponents so neither can
    // overflow for extreme rate ratios
    const double strip = g1 / d *
                         (std::exp(-g1 * eta - g2 * (eta1 - eta)) -
                          std::exp(-g1 * (eta1 - eta) - g2 * eta));
    const double tail = std::exp(-g1 * (eta1 - eta) - g2 * eta);
    return strip + tail;
}

InterferenceProb interference_success_prob(const PhyParams& phy, double rho2_desired,
                                           double rho2_interferer) {
    const auto p = SicIntegrationParams::make(phy, rho2_desired, rho2_interferer);
    InterferenceProb out;
    out.v = joint_decode_prob(p);
    out.h = treat_as_noise_prob(p, phy.power);
    out.g = out.v + (1.0 - out.v) * out.h;
    return out;
}

LinkProbabilities build_links(const PhyParams& phy, const ChannelVariances& var) {
    phy.validate();
    var.validate();
    LinkProbabilities L;
    L.M = var.num_sources();
    L.f_rd = success_prob(phy, var.relay_dest);
    for (int i = 0; i < L.M; ++i) {
        L.f_sd.push_back(success_prob(phy, var.source_dest[i]));
        L.f_sr.push_back(success_prob(phy, var.source_relay[i]));
        L.sd_r.push_back(interference_success_prob(phy, var.source_dest[i], var.relay_dest));
        L.rd_s.push_back(interference_success_prob(phy, var.relay_dest, var.source_dest[i]));
    }
    return L;
}

McEstimate mc_estimate_g(const PhyParams& phy, double rho2_desired, double rho2_interferer,
                         std::int64_t samples, std::uint64_t seed) {
    phy.validate();
    if (samples < 10000)
        throw std::invalid_argument("mc_estimate_g: need at least 1e4 samples, got " +
                                    std::to_string(samples));
    const double eta = phy.eta(), eta1 = phy.eta1(), P = phy.power;
    Rng rng(seed);
    std::int64_t hits = 0;
    for (std::int64_t n = 0; n < samples; ++n) {
        const double x = rng.exponential(rho2_desired);
        const double y = rng.exponential(rho2_interferer);
        const bool joint = x > eta && y > eta && x + y > eta1;
        const bool as_noise = x > eta * (P * y + 1.0);  // log2(1 + Px/(Py+1)) > R
        if (joint || as_noise) ++hits;
    }
    McEstimate e;
    e.samples = samples;
    e.estimate = static_cast<double>(hits) / static_cast<double>(samples);
    e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(samples));
    return e;
}

}  // namespace relaystab
