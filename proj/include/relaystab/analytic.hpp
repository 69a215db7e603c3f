#pragma once

#include <optional>
#include <vector>

#include "relaystab/channel.hpp"
#include "relaystab/policy.hpp"

namespace relaystab {

// Closed-form rate evaluation for a fixed policy. mu_u is +inf when the
// relay-queue constraint can never bind (nonpositive denominator or no relay
// arrivals possible); lam_s = min(mu, mu_u) is then capped at mu.
struct StabilityEvaluation {
    std::vector<double> mu;      // source-queue service rates
    std::vector<double> lam_r;   // relay-queue arrival rates (at the given demand)
    std::vector<double> mu_r;    // relay-queue service rates (at the given demand)
    std::vector<double> mu_u;    // relay-stability throughput bounds
    std::vector<double> lam_s;   // min(mu, mu_u)
    std::vector<bool> source_stable;
    std::vector<bool> relay_stable;

    bool all_stable() const;
};

StabilityEvaluation evaluate_rates(const Policy& policy, const LinkProbabilities& links,
                                   const DemandVector& demand);

struct DelayPrediction {
    std::vector<double> direct_prob;            // eps_i (tau_i for DBC)
    std::vector<double> source_queue_size;      // N_i
    std::vector<double> relay_queue_size;       // N_{r_i}
    std::vector<double> source_delay;           // T_{s_i}
    std::vector<double> relay_delay;            // T_{r_i}
    std::vector<std::optional<double>> total;   // D_i; nullopt when a queue is unstable
};

DelayPrediction predict_delay(const Policy& policy, const LinkProbabilities& links,
                              const DemandVector& demand);

// Single-user (M = 1, w_1 = 1) optimum. When the scheme's monotonicity
// condition holds the optimum is T1/(T1 + g_rd^s1) in closed form; otherwise
// falls back to a fine 1-D scan and reports condition_holds = false.
struct SingleUserResult {
    double T1 = 0.0;
    double optimal_action = 0.0;
    double max_stable_throughput = 0.0;
    bool condition_holds = false;
};

SingleUserResult single_user_sbc_optimum(const LinkProbabilities& links);
SingleUserResult single_user_dbc_optimum(const LinkProbabilities& links);

// Combined condition under which both schemes reach the same closed-form
// optimum. A degenerate second branch (division by zero) is treated as an
// infinite bound and reported.
struct Theorem1Condition {
    bool holds = false;
    bool degenerate_branch = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

Theorem1Condition theorem1_condition(const LinkProbabilities& links);

// max over the action range of min(mu, mu_u) by scanning with the given step
// (used as the fallback and as the verification oracle for the closed forms).
double single_user_grid_optimum(Scheme scheme, const LinkProbabilities& links, double step,
                                double* argmax = nullptr);

}  // namespace relaystab
