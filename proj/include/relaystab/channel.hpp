#pragma once

#include <cstdint>
#include <vector>

namespace relaystab {

// Transmit power P (linear SNR scale, unit noise variance) and spectral rate
// R in bits/slot/Hz, shared by every node.
struct PhyParams {
    double power = 10.0;
    double rate = 1.0;

    void validate() const;
    double eta() const;    // single-packet SNR threshold (2^R - 1)/P
    double eta1() const;   // sum-rate threshold (2^{2R} - 1)/P
};

// Rayleigh fading variances rho^2 per directed link. Sources are indexed
// 0..M-1; the relay never receives its own transmissions.
struct ChannelVariances {
    std::vector<double> source_dest;   // s_i -> d
    std::vector<double> source_relay;  // s_i -> r
    double relay_dest = 0.0;           // r -> d

    int num_sources() const { return static_cast<int>(source_dest.size()); }
    void validate() const;
};

// Inputs of the two Appendix-style integrals. gamma are the exponential
// rates 1/rho^2 of the desired and interfering link gains.
struct SicIntegrationParams {
    double eta = 0.0;
    double eta1 = 0.0;
    double gamma_desired = 0.0;
    double gamma_interferer = 0.0;

    static SicIntegrationParams make(const PhyParams& phy, double rho2_desired,
                                     double rho2_interferer);
    void validate() const;
};

struct InterferenceProb {
    double g = 0.0;  // compound success probability
    double v = 0.0;  // both packets jointly decodable
    double h = 0.0;  // desired packet decodable treating the interferer as noise
};

// Scenario-constant success probabilities consumed by every downstream
// module. Only the link/interferer combinations the protocols can create are
// materialized: a source interfered by the relay at d, and the relay
// interfered by the slot owner at d.
struct LinkProbabilities {
    int M = 0;
    std::vector<double> f_sd;          // f_{s_i d}
    std::vector<double> f_sr;          // f_{s_i r}
    double f_rd = 0.0;
    std::vector<InterferenceProb> sd_r;  // g_{s_i d}^{r}
    std::vector<InterferenceProb> rd_s;  // g_{r d}^{s_i}

    double g_sd_r(int i) const { return sd_r[i].g; }
    double g_rd_s(int i) const { return rd_s[i].g; }
};

// exp(-(2^R - 1)/(P rho^2)); throws on a nonpositive variance.
double success_prob(const PhyParams& phy, double rho2);

// H(eta, g1, g2) = g2 exp(-eta g1) / (g2 + P g1 eta)
double treat_as_noise_prob(const SicIntegrationParams& p, double power);

// V over the region {x > eta, y > eta, x + y > eta1} of the product
// exponential density. Handles eta1 <= 2 eta and the removable singularity
// at gamma_desired == gamma_interferer.
double joint_decode_prob(const SicIntegrationParams& p);

// g = v + (1 - v) h
InterferenceProb interference_success_prob(const PhyParams& phy, double rho2_desired,
                                           double rho2_interferer);

LinkProbabilities build_links(const PhyParams& phy, const ChannelVariances& var);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
};

// Monte Carlo oracle: draws the two channel gains and counts the slot a
// success when the pair is jointly decodable or the desired packet survives
// with the interferer treated as noise. Deterministic for a fixed seed.
// Refuses fewer than 10^4 samples.
McEstimate mc_estimate_g(const PhyParams& phy, double rho2_desired, double rho2_interferer,
                         std::int64_t samples, std::uint64_t seed);

}  // namespace relaystab
