#pragma once

#include <string>
#include <vector>

#include "relaystab/channel.hpp"

namespace relaystab {

enum class Scheme { SBC, DBC, CCMA, CM_DBC };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

// Relay operating policy: time-share vector w and the MxM action-probability
// matrix (beta for SBC, alpha for DBC; identically zero for CCMA). Row i is
// the distribution over "transmit from relay queue j" in s_i's slots, with
// the remainder 1 - sum_j action[i][j] spent listening.
struct Policy {
    Scheme scheme = Scheme::SBC;
    std::vector<double> w;
    std::vector<std::vector<double>> action;

    int num_sources() const { return static_cast<int>(w.size()); }
    double row_sum(int i) const;
    void validate() const;

    static Policy zeros(Scheme scheme, std::vector<double> w);
};

// Bernoulli arrival rates, packets per slot.
struct DemandVector {
    std::vector<double> lambda;
    void validate() const;
};

// Per-scheme view of the link probabilities: CM-DBC zeroes the interference
// probabilities, CCMA masks relaying for sources whose direct channel beats
// the relay's.
struct EffectiveLinks {
    const LinkProbabilities* base = nullptr;
    Scheme scheme = Scheme::SBC;
    std::vector<bool> helped;  // CCMA helping rule; all-true otherwise

    static EffectiveLinks make(Scheme scheme, const LinkProbabilities& links);
    double g_sd_r(int i) const;
    double g_rd_s(int i) const;
    // relay reception probability toward Q_{r_i}; zero for unhelped CCMA sources
    double relay_T(int i) const;
    bool sbc_like() const { return scheme == Scheme::SBC || scheme == Scheme::CCMA; }
};

}  // namespace relaystab
