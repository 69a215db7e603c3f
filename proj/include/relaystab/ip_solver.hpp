#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace relaystab {

// Inequality-form convex program
//   min c.x   s.t.   0.5 x'P_k x + q_k.x + r_k <= 0,   lb <= x <= ub
// with every P_k positive semidefinite (P_k may be empty for a linear
// constraint). Upper bounds may be +inf. Variables with lb == ub are
// eliminated before solving.
struct ConvexProgram {
    Eigen::VectorXd c;
    struct Constraint {
        Eigen::MatrixXd P;  // 0x0 for linear
        Eigen::VectorXd q;
        double r = 0.0;
    };
    std::vector<Constraint> constraints;
    Eigen::VectorXd lb, ub;

    int dim() const { return static_cast<int>(c.size()); }
    double eval_constraint(int k, const Eigen::VectorXd& x) const;
};

struct IpResult {
    Eigen::VectorXd x;
    bool converged = false;
    bool feasible = false;
    double objective = 0.0;
    double kkt_residual = 0.0;   // max of stationarity, complementarity, primal violation
    double max_violation = 0.0;
    int newton_iterations = 0;
    std::string message;
};

// Log-barrier method with Newton centering. Runs a phase-I minimization of
// the worst constraint value when the hint is not strictly feasible.
IpResult solve_convex(const ConvexProgram& prob, const Eigen::VectorXd& hint);

}  // namespace relaystab
