#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relaystab/analytic.hpp"
#include "relaystab/hull.hpp"
#include "relaystab/qcqp.hpp"

namespace relaystab {

struct ScaOptions {
    double tolerance = 1e-6;     // infinity-norm change of the iterate
    int max_iters = 100;
    double slack_penalty = 1e4;
    double oracle_step = 0.02;
    bool polish = true;          // local pattern-search refinement of the action matrix
};

struct FppScaResult {
    bool success = false;
    std::vector<std::vector<double>> action;
    std::vector<double> lam_s;        // re-evaluated from the action matrix
    double objective = 0.0;           // weighted sum of lam_s
    int iterations = 0;
    double final_slack = 0.0;
    double max_residual = 0.0;        // original-problem violation at the solution
    double worst_kkt = 0.0;           // worst subproblem KKT residual
    std::vector<double> objective_history;
    std::vector<double> slack_history;
    std::string message;
};

FppScaResult fpp_sca(const QcqpProblem& problem, const LinkProbabilities& links,
                     const ScaOptions& opts = {});
FppScaResult fpp_sca(Scheme scheme, const LinkProbabilities& links, const std::vector<double>& w,
                     const std::vector<double>& weights, const ScaOptions& opts = {});

struct GridOracleResult {
    std::vector<std::vector<double>> action;
    std::vector<double> lam_s;
    double objective = 0.0;
};

// Exhaustive scan of the action grid (row sums <= 1), weighted-sum maximizer,
// lexicographically smallest matrix among exact ties. M <= 2, step <= 0.02.
GridOracleResult grid_oracle(Scheme scheme, const LinkProbabilities& links,
                             const std::vector<double>& w, const std::vector<double>& weights,
                             double step = 0.02);

// CCMA has no free parameters; its per-w throughput point.
std::vector<double> ccma_throughput(const LinkProbabilities& links, const std::vector<double>& w);

struct RegionSweepConfig {
    std::vector<double> w1_grid;                    // M = 2: w = (w1, 1-w1)
    std::vector<std::vector<double>> weight_grid;   // objective weights x
    bool with_oracle = false;
    ScaOptions opts;

    static RegionSweepConfig defaults();
};

struct RegionPoint {
    std::vector<double> w;
    std::vector<double> weights;
    std::vector<double> lam_s;
    double objective = 0.0;
    std::string solver_status;
    double oracle_objective = -1.0;  // < 0 when the oracle was not run
};

struct RegionSweepResult {
    std::vector<RegionPoint> points;
    std::vector<Point2> hull;  // convex hull of the lam_s points (M = 2)
};

RegionSweepResult region_sweep(Scheme scheme, const LinkProbabilities& links,
                               const RegionSweepConfig& config);

// Largest lam_s of the target source over the policy grid, subject to the
// other source sustaining the constrained throughput. nullopt when the
// constraint itself is infeasible everywhere.
struct ConstrainedMax {
    double value = 0.0;
    std::vector<double> w;
    std::vector<std::vector<double>> action;
};
std::optional<ConstrainedMax> constrained_max_throughput(Scheme scheme,
                                                         const LinkProbabilities& links,
                                                         int constrained_source, double rate,
                                                         int target_source, double grid_step = 0.02,
                                                         double w_step = 0.05);

struct MinDelayPoint {
    double demand = 0.0;
    bool feasible = false;
    double delay = 0.0;
    std::vector<double> w;
    std::vector<std::vector<double>> action;
};

// For each target demand, the policy grid point minimizing the target
// source's predicted delay subject to joint stability and the throughput
// constraint on the other source.
std::vector<MinDelayPoint> min_delay_search(Scheme scheme, const LinkProbabilities& links,
                                            int constrained_source, double rate, int target_source,
                                            const std::vector<double>& demand_grid,
                                            double action_step = 0.05, double w_step = 0.05);

}  // namespace relaystab
