#include "relaystab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "relaystab/ip_solver.hpp"

namespace relaystab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTiny = 1e-300;

std::vector<double> lam_s_of_action(Scheme scheme, const LinkProbabilities& links,
                                    const std::vector<double>& w,
                                    const std::vector<std::vector<double>>& action) {
    Policy p;
    p.scheme = scheme;
    p.w = w;
    p.action = action;
    DemandVector d;
    d.lambda.assign(links.M, 0.0);
    return evaluate_rates(p, links, d).lam_s;
}

double weighted(const std::vector<double>& weights, const std::vector<double>& lam) {
    double o = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) o += weights[i] * lam[i];
    return o;
}

// Scenario constants for the hand-rolled two-source scans. Mirrors
// evaluate_rates; kept allocation-free because the oracles sweep millions of
// policies.
struct Fast2 {
    bool sbc = true;
    double f_sd[2], T[2], a[2], g_sd[2], g_rd[2], f_rd;
    bool helped[2];

    static Fast2 make(Scheme scheme, const LinkProbabilities& links) {
        if (links.M != 2) throw std::invalid_argument("two-source scan requires M = 2");
        const auto eff = EffectiveLinks::make(scheme, links);
        Fast2 f;
        f.sbc = eff.sbc_like();
        f.f_rd = links.f_rd;
        for (int i = 0; i < 2; ++i) {
            f.f_sd[i] = links.f_sd[i];
            f.helped[i] = eff.helped[i];
            f.T[i] = eff.relay_T(i);
            f.a[i] = links.f_sd[i] + f.T[i];
            f.g_sd[i] = eff.g_sd_r(i);
            f.g_rd[i] = eff.g_rd_s(i);
        }
        return f;
    }

    double mu(int i, double wi, double s) const {
        if (!helped[i]) return wi * f_sd[i];
        return wi * (s * g_sd[i] + (1.0 - s) * a[i]);
    }

    // min(mu, mu_u); cross = w_j * a_ji of the other source's row
    double lam_s(int i, double wi, double aii, double s, double cross) const {
        const double m = mu(i, wi, s);
        if (!helped[i]) return m;
        double N, D;
        if (sbc) {
            N = wi * f_rd + cross * g_rd[1 - i];
            D = wi * ((1.0 - s) * T[i] + f_rd - aii * g_rd[i]);
        } else {
            N = wi * aii * f_rd + cross * g_rd[1 - i];
            D = wi * ((1.0 - s) * T[i] + aii * (f_rd - g_rd[i]));
        }
        if (wi * T[i] * (1.0 - s) <= kTiny) return m;
        if (D <= kTiny) return m;
        return std::min(m, N * m / D);
    }

    struct Queues {
        double mu, lam_r, mu_r, eps;
    };
    Queues queues(int i, double wi, double aii, double s, double cross, double lam) const {
        Queues q;
        q.mu = mu(i, wi, s);
        const double busy = q.mu > kTiny ? std::min(1.0, lam / q.mu) : (lam > 0.0 ? 1.0 : 0.0);
        q.lam_r = wi * T[i] * busy * (1.0 - s);
        if (sbc) {
            q.mu_r = wi * ((1.0 - busy) * f_rd + busy * aii * g_rd[i]) + cross * g_rd[1 - i];
        } else {
            q.mu_r = wi * aii * ((1.0 - busy) * f_rd + busy * g_rd[i]) + cross * g_rd[1 - i];
        }
        if (!helped[i]) {
            q.eps = 1.0;
        } else {
            const double num = (1.0 - s) * f_sd[i] + s * g_sd[i];
            const double den = (1.0 - s) * a[i] + s * g_sd[i];
            q.eps = den > kTiny ? std::min(1.0, num / den) : 1.0;
        }
        return q;
    }

    // total delay of source i, or +inf when a queue is unstable
    double delay(int i, double wi, double aii, double s, double cross, double lam) const {
        const auto q = queues(i, wi, aii, s, cross, lam);
        if (!(lam < q.mu)) return kInf;
        const double Ts = (1.0 - lam) / (q.mu - lam);
        const double via = 1.0 - q.eps;
        if (via <= 1e-15) return Ts;
        if (!(q.lam_r < q.mu_r)) return kInf;
        return Ts + via * (1.0 - q.lam_r) / (q.mu_r - q.lam_r);
    }
};

struct RowGrid {
    std::vector<double> own, other;  // (a_ii, a_ij), row sums <= 1, lexicographic
};

RowGrid make_row_grid(double step, bool diag_first) {
    RowGrid g;
    const long n = std::lround(1.0 / step);
    for (long p = 0; p <= n; ++p) {
        for (long q = 0; p + q <= n; ++q) {
            const double x = static_cast<double>(p) / n;
            const double y = static_cast<double>(q) / n;
            if (diag_first) {
                g.own.push_back(x);
                g.other.push_back(y);
            } else {
                g.own.push_back(y);
                g.other.push_back(x);
            }
        }
    }
    return g;
}

}  // namespace

std::vector<double> ccma_throughput(const LinkProbabilities& links, const std::vector<double>& w) {
    const auto p = Policy::zeros(Scheme::CCMA, w);
    DemandVector d;
    d.lambda.assign(links.M, 0.0);
    return evaluate_rates(p, links, d).lam_s;
}

GridOracleResult grid_oracle(Scheme scheme, const LinkProbabilities& links,
                             const std::vector<double>& w, const std::vector<double>& weights,
                             double step) {
    if (links.M > 2) throw std::invalid_argument("grid_oracle: refusing M > 2");
    if (step > 0.02 + 1e-12) throw std::invalid_argument("grid_oracle: step must be <= 0.02");
    GridOracleResult out;
    if (scheme == Scheme::CCMA) {
        out.action.assign(links.M, std::vector<double>(links.M, 0.0));
        out.lam_s = ccma_throughput(links, w);
        out.objective = weighted(weights, out.lam_s);
        return out;
    }
    if (links.M == 1) {
        const long n = std::lround(1.0 / step);
        double best = -kInf, bestb = 0.0;
        for (long k = 0; k <= n; ++k) {
            const double b = static_cast<double>(k) / n;
            const auto lam = lam_s_of_action(scheme, links, w, {{b}});
            const double obj = weights[0] * lam[0];
            if (obj > best) {
                best = obj;
                bestb = b;
            }
        }
        out.action = {{bestb}};
        out.lam_s = lam_s_of_action(scheme, links, w, out.action);
        out.objective = best;
        return out;
    }

    const auto f = Fast2::make(scheme, links);
    // row 1 entries are (a11, a12): a11 is the diagonal; row 2 entries (a21, a22)
    const auto r1 = make_row_grid(step, true);
    const auto r2 = make_row_grid(step, false);
    const std::size_t n1 = r1.own.size(), n2 = r2.own.size();

    double best = -kInf;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n1; ++i) {
        const double a11 = r1.own[i], a12 = r1.other[i];
        const double s1 = a11 + a12;
        for (std::size_t j = 0; j < n2; ++j) {
            const double a21 = r2.other[j], a22 = r2.own[j];
            const double s2 = a21 + a22;
            const double l1 = f.lam_s(0, w[0], a11, s1, w[1] * a21);
            const double l2 = f.lam_s(1, w[1], a22, s2, w[0] * a12);
            const double obj = weights[0] * l1 + weights[1] * l2;
            if (obj > best) {
                best = obj;
                bi = i;
                bj = j;
            }
        }
    }
    out.action = {{r1.own[bi], r1.other[bi]}, {r2.other[bj], r2.own[bj]}};
    out.lam_s = lam_s_of_action(scheme, links, w, out.action);
    out.objective = best;
    return out;
}

FppScaResult fpp_sca(Scheme scheme, const LinkProbabilities& links, const std::vector<double>& w,
                     const std::vector<double>& weights, const ScaOptions& opts) {
    return fpp_sca(assemble_qcqp(scheme, links, w, weights), links, opts);
}

FppScaResult fpp_sca(const QcqpProblem& problem, const LinkProbabilities& links,
                     const ScaOptions& opts) {
    const int n = problem.dim();
    const int K = static_cast<int>(problem.quadratic.size());
    FppScaResult res;

    // eigensplits are iteration constants
    std::vector<Eigen::MatrixXd> Apos(K), Aneg(K);
    for (int k = 0; k < K; ++k) split_indefinite(problem.quadratic[k].A, Apos[k], Aneg[k]);

    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd slacks = Eigen::VectorXd::Zero(K);

    ConvexProgram sub;
    sub.c = Eigen::VectorXd::Zero(n + K);
    sub.c.head(n) = problem.c;
    sub.c.tail(K).setConstant(opts.slack_penalty);
    sub.lb = Eigen::VectorXd::Zero(n + K);
    sub.ub = Eigen::VectorXd::Constant(n + K, kInf);
    for (int i = 0; i < n; ++i) sub.ub[i] = problem.fixed_zero[i] ? 0.0 : 1.0;

    for (const auto& l : problem.linear) {
        ConvexProgram::Constraint c;
        c.q = Eigen::VectorXd::Zero(n + K);
        c.q.head(n) = l.v;
        c.r = l.u;
        sub.constraints.push_back(std::move(c));
    }
    const std::size_t first_quad = sub.constraints.size();
    for (int k = 0; k < K; ++k) {
        ConvexProgram::Constraint c;
        c.P = Eigen::MatrixXd::Zero(n + K, n + K);
        c.P.topLeftCorner(n, n) = 2.0 * Apos[k];
        c.q = Eigen::VectorXd::Zero(n + K);  // filled per iteration
        sub.constraints.push_back(std::move(c));
    }

    int it = 0;
    for (; it < opts.max_iters; ++it) {
        for (int k = 0; k < K; ++k) {
            auto& c = sub.constraints[first_quad + k];
            c.q.head(n) = 2.0 * (Aneg[k] * y) + problem.quadratic[k].q;
            c.q[n + k] = -1.0;
            c.r = problem.quadratic[k].d - y.dot(Aneg[k] * y);
        }
        Eigen::VectorXd hint = Eigen::VectorXd::Zero(n + K);
        hint.head(n) = y;
        for (int k = 0; k < K; ++k) {
            const auto& c = sub.constraints[first_quad + k];
            const double viol = 0.5 * y.dot(c.P.topLeftCorner(n, n) * y) +
                                c.q.head(n).dot(y) + c.r;
            hint[n + k] = std::max(0.0, viol) + 1.0;
        }
        const auto sol = solve_convex(sub, hint);
        res.worst_kkt = std::max(res.worst_kkt, sol.kkt_residual);
        if (!sol.converged) {
            res.message = "subproblem solver failed: " + sol.message;
            res.iterations = it;
            return res;
        }
        Eigen::VectorXd z = sol.x.head(n);
        slacks = sol.x.tail(K);
        res.objective_history.push_back(problem.c.dot(z));
        res.slack_history.push_back(slacks.sum());
        const double move = (z - y).cwiseAbs().maxCoeff();
        y = z;
        if (move < opts.tolerance) {
            ++it;
            break;
        }
    }
    res.iterations = it;
    res.final_slack = slacks.size() ? slacks.sum() : 0.0;

    const int M = problem.M;
    std::vector<std::vector<double>> action(M, std::vector<double>(M, 0.0));
    for (int i = 0; i < M; ++i) {
        double s = 0.0;
        for (int j = 0; j < M; ++j) {
            action[i][j] = std::clamp(y[problem.action_index(i, j)], 0.0, 1.0);
            s += action[i][j];
        }
        if (s > 1.0) {
            for (int j = 0; j < M; ++j) action[i][j] /= s;
        }
    }

    std::vector<double> weights(M);
    for (int i = 0; i < M; ++i) weights[i] = -problem.c[problem.lambda_index(i)];

    Scheme scheme = problem.scheme;
    auto lam = lam_s_of_action(scheme, links, problem.w, action);

    if (opts.polish && M <= 2) {
        // greedy pattern search; keeps the returned point a true evaluate_rates image
        double cur = weighted(weights, lam);
        for (double step : {0.02, 0.005, 0.001, 2e-4}) {
            bool improved = true;
            while (improved) {
                improved = false;
                for (int i = 0; i < M; ++i) {
                    if (problem.w[i] <= 0.0) continue;
                    for (int j = 0; j < M; ++j) {
                        for (double dir : {+1.0, -1.0}) {
                            auto cand = action;
                            cand[i][j] += dir * step;
                            if (cand[i][j] < 0.0 || cand[i][j] > 1.0) continue;
                            double rs = 0.0;
                            for (int jj = 0; jj < M; ++jj) rs += cand[i][jj];
                            if (rs > 1.0 + 1e-12) continue;
                            const auto lam2 = lam_s_of_action(scheme, links, problem.w, cand);
                            const double o2 = weighted(weights, lam2);
                            if (o2 > cur + 1e-12) {
                                action = cand;
                                lam = lam2;
                                cur = o2;
                                improved = true;
                            }
                        }
                    }
                }
            }
        }
    }

    res.action = action;
    res.lam_s = lam;
    res.objective = weighted(weights, lam);
    Policy packed;
    packed.scheme = scheme;
    packed.w = problem.w;
    packed.action = action;
    res.max_residual = problem.max_violation(problem.pack(packed, lam));
    res.success = res.final_slack <= 1e-8 && res.max_residual <= 1e-9;
    if (!res.success && res.message.empty()) res.message = "did not reach a feasible point";
    return res;
}

RegionSweepConfig RegionSweepConfig::defaults() {
    RegionSweepConfig c;
    for (int k = 0; k <= 10; ++k) c.w1_grid.push_back(0.1 * k);
    c.weight_grid.push_back({1.0, 0.0});
    c.weight_grid.push_back({0.0, 1.0});
    for (int k = 0; k < 21; ++k) {
        const double r = std::pow(10.0, -2.0 + 4.0 * k / 20.0);  // x1/x2 ratio
        const double x1 = r >= 1.0 ? 1.0 : r;
        const double x2 = r >= 1.0 ? 1.0 / r : 1.0;
        c.weight_grid.push_back({x1, x2});
    }
    return c;
}

RegionSweepResult region_sweep(Scheme scheme, const LinkProbabilities& links,
                               const RegionSweepConfig& config) {
    if (links.M != 2) throw std::invalid_argument("region_sweep: M = 2 required");
    RegionSweepResult out;
    std::vector<Point2> pts{{0.0, 0.0}};
    for (double w1 : config.w1_grid) {
        const std::vector<double> w{w1, 1.0 - w1};
        std::vector<double> ccma_lam;
        if (scheme == Scheme::CCMA) ccma_lam = ccma_throughput(links, w);
        for (const auto& x : config.weight_grid) {
            RegionPoint p;
            p.w = w;
            p.weights = x;
            if (scheme == Scheme::CCMA) {
                p.lam_s = ccma_lam;
                p.objective = weighted(x, ccma_lam);
                p.solver_status = "closed-form";
            } else {
                const auto r = fpp_sca(scheme, links, w, x, config.opts);
                p.lam_s = r.lam_s;
                p.objective = r.objective;
                p.solver_status = r.success ? "ok" : ("failed: " + r.message);
            }
            if (config.with_oracle)
                p.oracle_objective = grid_oracle(scheme, links, w, x, config.opts.oracle_step)
                                         .objective;
            pts.push_back({p.lam_s[0], p.lam_s[1]});
            out.points.push_back(std::move(p));
        }
    }
    out.hull = convex_hull(pts);
    return out;
}

std::optional<ConstrainedMax> constrained_max_throughput(Scheme scheme,
                                                         const LinkProbabilities& links,
                                                         int constrained_source, double rate,
                                                         int target_source, double grid_step,
                                                         double w_step) {
    if (links.M != 2) throw std::invalid_argument("constrained_max_throughput: M = 2 required");
    std::optional<ConstrainedMax> best;
    const long nw = std::lround(1.0 / w_step);
    for (long kw = 1; kw < nw; ++kw) {
        const double w1 = static_cast<double>(kw) / nw;
        const std::vector<double> w{w1, 1.0 - w1};
        if (scheme == Scheme::CCMA) {
            const auto lam = ccma_throughput(links, w);
            if (lam[constrained_source] > rate) {
                if (!best || lam[target_source] > best->value) {
                    ConstrainedMax cm;
                    cm.value = lam[target_source];
                    cm.w = w;
                    cm.action.assign(2, std::vector<double>(2, 0.0));
                    best = cm;
                }
            }
            continue;
        }
        const auto f = Fast2::make(scheme, links);
        const auto r1 = make_row_grid(grid_step, true);
        const auto r2 = make_row_grid(grid_step, false);
        for (std::size_t i = 0; i < r1.own.size(); ++i) {
            const double a11 = r1.own[i], a12 = r1.other[i];
            const double s1 = a11 + a12;
            for (std::size_t j = 0; j < r2.own.size(); ++j) {
                const double a21 = r2.other[j], a22 = r2.own[j];
                const double s2 = a21 + a22;
                const double l1 = f.lam_s(0, w[0], a11, s1, w[1] * a21);
                const double l2 = f.lam_s(1, w[1], a22, s2, w[0] * a12);
                const double lc = constrained_source == 0 ? l1 : l2;
                const double lt = target_source == 0 ? l1 : l2;
                if (lc > rate && (!best || lt > best->value)) {
                    ConstrainedMax cm;
                    cm.value = lt;
                    cm.w = w;
                    cm.action = {{a11, a12}, {a21, a22}};
                    best = cm;
                }
            }
        }
    }
    return best;
}

std::vector<MinDelayPoint> min_delay_search(Scheme scheme, const LinkProbabilities& links,
                                            int constrained_source, double rate, int target_source,
                                            const std::vector<double>& demand_grid,
                                            double action_step, double w_step) {
    if (links.M != 2) throw std::invalid_argument("min_delay_search: M = 2 required");
    std::vector<MinDelayPoint> out;
    const auto f = Fast2::make(scheme, links);
    const auto r1 = make_row_grid(action_step, true);
    const auto r2 = make_row_grid(action_step, false);
    const long nw = std::lround(1.0 / w_step);
    const bool ccma = scheme == Scheme::CCMA;

    for (double lam_t : demand_grid) {
        MinDelayPoint pt;
        pt.demand = lam_t;
        double best = kInf;
        for (long kw = 1; kw < nw; ++kw) {
            const double w1 = static_cast<double>(kw) / nw;
            const double w[2] = {w1, 1.0 - w1};
            const std::size_t ni = ccma ? 1 : r1.own.size();
            const std::size_t nj = ccma ? 1 : r2.own.size();
            for (std::size_t i = 0; i < ni; ++i) {
                const double a11 = ccma ? 0.0 : r1.own[i];
                const double a12 = ccma ? 0.0 : r1.other[i];
                const double s1 = a11 + a12;
                for (std::size_t j = 0; j < nj; ++j) {
                    const double a21 = ccma ? 0.0 : r2.other[j];
                    const double a22 = ccma ? 0.0 : r2.own[j];
                    const double s2 = a21 + a22;
                    double lam[2];
                    lam[constrained_source] = rate;
                    lam[target_source] = lam_t;
                    const double d0 = f.delay(0, w[0], a11, s1, w[1] * a21, lam[0]);
                    if (d0 == kInf) continue;
                    const double d1 = f.delay(1, w[1], a22, s2, w[0] * a12, lam[1]);
                    if (d1 == kInf) continue;
                    const double dt = target_source == 0 ? d0 : d1;
                    if (dt < best) {
                        best = dt;
                        pt.w = {w[0], w[1]};
                        pt.action = {{a11, a12}, {a21, a22}};
                    }
                }
            }
        }
        pt.feasible = best < kInf;
        pt.delay = pt.feasible ? best : 0.0;
        out.push_back(std::move(pt));
    }
    return out;
}

}  // namespace relaystab
