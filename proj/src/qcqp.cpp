#include "relaystab/qcqp.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace relaystab {

Eigen::VectorXd QcqpProblem::pack(const Policy& policy, const std::vector<double>& lam_s) const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(dim());
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) z[action_index(i, j)] = policy.action[i][j];
    for (int i = 0; i < M; ++i) z[lambda_index(i)] = lam_s[i];
    return z;
}

double QcqpProblem::max_violation(const Eigen::VectorXd& z) const {
    double worst = 0.0;
    for (const auto& l : linear) worst = std::max(worst, l.v.dot(z) + l.u);
    for (const auto& q : quadratic)
        worst = std::max(worst, z.dot(q.A * z) + q.q.dot(z) + q.d);
    for (int k = 0; k < z.size(); ++k) {
        worst = std::max(worst, -z[k]);
        worst = std::max(worst, z[k] - 1.0);
    }
    return worst;
}

QcqpProblem assemble_qcqp(Scheme scheme, const LinkProbabilities& links,
                          const std::vector<double>& w, const std::vector<double>& weights) {
    const int M = links.M;
    if (static_cast<int>(w.size()) != M || static_cast<int>(weights.size()) != M)
        throw std::invalid_argument("assemble_qcqp: dimension mismatch");
    if (scheme == Scheme::CCMA)
        throw std::invalid_argument("assemble_qcqp: CCMA has no free action matrix");

    const auto eff = EffectiveLinks::make(scheme, links);
    QcqpProblem P;
    P.M = M;
    P.scheme = scheme;
    P.w = w;
    const int n = P.dim();
    P.c = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < M; ++i) P.c[P.lambda_index(i)] = -weights[i];

    P.fixed_zero.assign(n, false);
    for (int i = 0; i < M; ++i) {
        if (w[i] > 0.0) continue;
        P.fixed_zero[P.lambda_index(i)] = true;
        for (int j = 0; j < M; ++j) P.fixed_zero[P.action_index(i, j)] = true;
    }

    const double f_rd = links.f_rd;
    for (int i = 0; i < M; ++i) {
        const double wi = w[i];
        const double T = eff.relay_T(i);
        const double a = links.f_sd[i] + T;
        const double b = eff.g_sd_r(i) - a;  // d(mu_i)/d(action row i), per unit w_i
        const double Gi = eff.g_rd_s(i);
        const int li = P.lambda_index(i);
        const bool sbc = eff.sbc_like();

        // row sum <= 1
        {
            QcqpProblem::Linear l;
            l.v = Eigen::VectorXd::Zero(n);
            for (int j = 0; j < M; ++j) l.v[P.action_index(i, j)] = 1.0;
            l.u = -1.0;
            P.linear.push_back(std::move(l));
        }
        // lam_i <= mu_i
        {
            QcqpProblem::Linear l;
            l.v = Eigen::VectorXd::Zero(n);
            l.v[li] = 1.0;
            for (int j = 0; j < M; ++j) l.v[P.action_index(i, j)] = -wi * b;
            l.u = -wi * a;
            P.linear.push_back(std::move(l));
        }
        // denominator cut: D_i(action) >= 0, so clearing it keeps the inequality direction
        {
            QcqpProblem::Linear l;
            l.v = Eigen::VectorXd::Zero(n);
            if (sbc) {
                for (int j = 0; j < M; ++j) l.v[P.action_index(i, j)] = wi * T;
                l.v[P.action_index(i, i)] += wi * Gi;
                l.u = -wi * (T + f_rd);
            } else {
                for (int j = 0; j < M; ++j) l.v[P.action_index(i, j)] = wi * T;
                l.v[P.action_index(i, i)] += -wi * (f_rd - Gi);
                l.u = -wi * T;
            }
            P.linear.push_back(std::move(l));
        }
        // lam_i * D_i(action) - N_i(action) * mu_i(action) <= 0
        {
            QcqpProblem::Quadratic qc;
            qc.A = Eigen::MatrixXd::Zero(n, n);
            qc.q = Eigen::VectorXd::Zero(n);
            qc.d = 0.0;
            if (sbc) {
                qc.q[li] += wi * (T + f_rd);
                for (int j = 0; j < M; ++j) qc.A(li, P.action_index(i, j)) += -wi * T;
                qc.A(li, P.action_index(i, i)) += -wi * Gi;
                // -(N * mu): N = w_i f_rd + sum_{j != i} w_j a_ji g_rd_j
                qc.d += -(wi * f_rd) * (wi * a);
                for (int j = 0; j < M; ++j)
                    qc.q[P.action_index(i, j)] += -(wi * f_rd) * wi * b;
                for (int j = 0; j < M; ++j) {
                    if (j == i) continue;
                    const double cj = w[j] * eff.g_rd_s(j);
                    qc.q[P.action_index(j, i)] += -cj * wi * a;
                    for (int k = 0; k < M; ++k)
                        qc.A(P.action_index(j, i), P.action_index(i, k)) += -cj * wi * b;
                }
            } else {
                qc.q[li] += wi * T;
                qc.A(li, P.action_index(i, i)) += wi * (f_rd - Gi);
                for (int j = 0; j < M; ++j) qc.A(li, P.action_index(i, j)) += -wi * T;
                // N = w_i a_ii f_rd + sum_{j != i} w_j a_ji g_rd_j
                qc.q[P.action_index(i, i)] += -(wi * f_rd) * wi * a;
                for (int k = 0; k < M; ++k)
                    qc.A(P.action_index(i, i), P.action_index(i, k)) += -(wi * f_rd) * wi * b;
                for (int j = 0; j < M; ++j) {
                    if (j == i) continue;
                    const double cj = w[j] * eff.g_rd_s(j);
                    qc.q[P.action_index(j, i)] += -cj * wi * a;
                    for (int k = 0; k < M; ++k)
                        qc.A(P.action_index(j, i), P.action_index(i, k)) += -cj * wi * b;
                }
            }
            qc.A = 0.5 * (qc.A + qc.A.transpose()).eval();
            P.quadratic.push_back(std::move(qc));
        }
    }
    return P;
}

void split_indefinite(const Eigen::MatrixXd& A, Eigen::MatrixXd& pos, Eigen::MatrixXd& neg) {
    if (A.rows() != A.cols()) throw std::invalid_argument("split_indefinite: square matrix required");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, A.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("split_indefinite: matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    const auto& V = es.eigenvectors();
    const auto& lam = es.eigenvalues();
    Eigen::VectorXd lp = lam.cwiseMax(0.0), ln = lam.cwiseMin(0.0);
    pos = V * lp.asDiagonal() * V.transpose();
    neg = V * ln.asDiagonal() * V.transpose();
}

}  // namespace relaystab
