#pragma once

#include <Eigen/Dense>
#include <vector>

#include "relaystab/analytic.hpp"
#include "relaystab/policy.hpp"

namespace relaystab {

// Standard-form throughput maximization. Decision vector z stacks the M*M
// action probabilities row-major followed by the M per-source throughputs:
//   z = [a_11..a_1M, ..., a_M1..a_MM, lam_1..lam_M],  dim = M(M+1).
// Objective is min c.z with c = [0...0, -x_1..-x_M]. Linear constraints are
// v.z + u <= 0; quadratic constraints z'A z + q.z + d <= 0 come from the
// relay-stability bound cleared of its denominator, with the denominator
// kept nonnegative by one of the linear cuts.
struct QcqpProblem {
    int M = 0;
    Scheme scheme = Scheme::SBC;
    std::vector<double> w;
    Eigen::VectorXd c;

    struct Linear {
        Eigen::VectorXd v;
        double u = 0.0;
    };
    struct Quadratic {
        Eigen::MatrixXd A;  // symmetric, generally indefinite
        Eigen::VectorXd q;
        double d = 0.0;
    };
    std::vector<Linear> linear;
    std::vector<Quadratic> quadratic;
    std::vector<bool> fixed_zero;  // variables pinned to 0 (degenerate time shares)

    int dim() const { return M * (M + 1); }
    int action_index(int i, int j) const { return i * M + j; }
    int lambda_index(int i) const { return M * M + i; }

    Eigen::VectorXd pack(const Policy& policy, const std::vector<double>& lam_s) const;
    // largest constraint violation (positive = infeasible), box included
    double max_violation(const Eigen::VectorXd& z) const;
};

QcqpProblem assemble_qcqp(Scheme scheme, const LinkProbabilities& links,
                          const std::vector<double>& w, const std::vector<double>& weights);

// Spectral split A = pos + neg with pos PSD and neg NSD.
void split_indefinite(const Eigen::MatrixXd& A, Eigen::MatrixXd& pos, Eigen::MatrixXd& neg);

}  // namespace relaystab
