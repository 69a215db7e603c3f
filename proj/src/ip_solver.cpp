#include "relaystab/ip_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relaystab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Cons {
    Eigen::MatrixXd P;  // may be 0x0
    Eigen::VectorXd q;
    double r = 0.0;

    double eval(const Eigen::VectorXd& x) const {
        double v = q.dot(x) + r;
        if (P.size()) v += 0.5 * x.dot(P * x);
        return v;
    }
    Eigen::VectorXd grad(const Eigen::VectorXd& x) const {
        if (P.size()) return P * x + q;
        return q;
    }
};

struct Centering {
    Eigen::VectorXd x;
    int iterations = 0;
    bool ok = false;
};

// Newton centering of t*c.x - sum log(-q_k(x)). Assumes x0 strictly feasible.
Centering center(const std::vector<Cons>& cons, const Eigen::VectorXd& c, double t,
                 Eigen::VectorXd x) {
    const int n = static_cast<int>(x.size());
    Centering out;
    for (int it = 0; it < 80; ++it) {
        Eigen::VectorXd g = t * c;
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
        for (const auto& k : cons) {
            const double fk = k.eval(x);
            const double inv = -1.0 / fk;  // fk < 0
            const Eigen::VectorXd gk = k.grad(x);
            g += inv * gk;
            H += (inv * inv) * (gk * gk.transpose());
            if (k.P.size()) H += inv * k.P;
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
        Eigen::VectorXd d;
        if (ldlt.info() == Eigen::Success) {
            d = ldlt.solve(-g);
        } else {
            d = (H + 1e-10 * Eigen::MatrixXd::Identity(n, n)).ldlt().solve(-g);
        }
        const double decr2 = -g.dot(d);  // Newton decrement squared
        ++out.iterations;
        if (!(decr2 > 0) || decr2 < 1e-13) {
            out.ok = true;
            break;
        }
        // backtrack into the domain, then Armijo
        double alpha = 1.0;
        auto phi = [&](const Eigen::VectorXd& y) {
            double v = t * c.dot(y);
            for (const auto& k : cons) {
                const double fk = k.eval(y);
                if (fk >= 0.0) return kInf;
                v -= std::log(-fk);
            }
            return v;
        };
        const double phi0 = phi(x);
        bool stepped = false;
        for (int ls = 0; ls < 60; ++ls) {
            Eigen::VectorXd xn = x + alpha * d;
            const double phin = phi(xn);
            if (phin < phi0 - 0.25 * alpha * decr2) {
                x = xn;
                stepped = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!stepped) {
            out.ok = true;  // stalled at numerical precision
            break;
        }
    }
    out.x = x;
    return out;
}

struct BarrierOut {
    Eigen::VectorXd x;
    double t = 0.0;
    int newton_iterations = 0;
};

BarrierOut barrier(const std::vector<Cons>& cons, const Eigen::VectorXd& c, Eigen::VectorXd x0,
                   double t_max) {
    BarrierOut out;
    double t = 1.0;
    Eigen::VectorXd x = std::move(x0);
    while (true) {
        auto r = center(cons, c, t, x);
        out.newton_iterations += r.iterations;
        x = r.x;
        if (t >= t_max) break;
        t = std::min(t * 20.0, t_max);
    }
    out.x = x;
    out.t = t;
    return out;
}

}  // namespace

double ConvexProgram::eval_constraint(int k, const Eigen::VectorXd& x) const {
    const auto& con = constraints[k];
    double v = con.q.dot(x) + con.r;
    if (con.P.size()) v += 0.5 * x.dot(con.P * x);
    return v;
}

IpResult solve_convex(const ConvexProgram& prob, const Eigen::VectorXd& hint) {
    const int n = prob.dim();
    IpResult res;

    // split variables into free and fixed-at-bound
    std::vector<int> free_idx;
    Eigen::VectorXd fixed_val = Eigen::VectorXd::Zero(n);
    std::vector<bool> fixed(n, false);
    for (int i = 0; i < n; ++i) {
        if (prob.ub[i] - prob.lb[i] <= 1e-14) {
            fixed[i] = true;
            fixed_val[i] = prob.lb[i];
        } else {
            free_idx.push_back(i);
        }
    }
    const int m = static_cast<int>(free_idx.size());

    auto expand = [&](const Eigen::VectorXd& xr) {
        Eigen::VectorXd x = fixed_val;
        for (int k = 0; k < m; ++k) x[free_idx[k]] = xr[k];
        return x;
    };

    if (m == 0) {
        res.x = fixed_val;
        res.converged = true;
        res.objective = prob.c.dot(res.x);
        for (std::size_t k = 0; k < prob.constraints.size(); ++k)
            res.max_violation = std::max(res.max_violation,
                                         prob.eval_constraint(static_cast<int>(k), res.x));
        res.feasible = res.max_violation <= 1e-9;
        res.kkt_residual = res.max_violation;
        return res;
    }

    // reduce to the free space
    Eigen::VectorXd cr(m);
    for (int k = 0; k < m; ++k) cr[k] = prob.c[free_idx[k]];

    std::vector<Cons> cons;
    for (const auto& con : prob.constraints) {
        Cons c2;
        c2.q = Eigen::VectorXd::Zero(m);
        c2.r = con.r + con.q.dot(fixed_val);
        if (con.P.size()) {
            c2.r += 0.5 * fixed_val.dot(con.P * fixed_val);
            const Eigen::VectorXd pq = con.P * fixed_val;
            Eigen::MatrixXd Pr(m, m);
            for (int a = 0; a < m; ++a) {
                c2.q[a] = con.q[free_idx[a]] + pq[free_idx[a]];
                for (int b = 0; b < m; ++b) Pr(a, b) = con.P(free_idx[a], free_idx[b]);
            }
            if (Pr.cwiseAbs().maxCoeff() > 0.0) c2.P = Pr;
        } else {
            for (int a = 0; a < m; ++a) c2.q[a] = con.q[free_idx[a]];
        }
        if (!c2.P.size() && c2.q.cwiseAbs().maxCoeff() <= 0.0) {
            if (c2.r > 1e-9) {
                res.message = "constraint infeasible after fixing variables";
                return res;
            }
            continue;  // constant, satisfied
        }
        cons.push_back(std::move(c2));
    }
    const std::size_t n_problem_cons = cons.size();
    // box constraints of the free variables
    for (int k = 0; k < m; ++k) {
        const double lo = prob.lb[free_idx[k]], hi = prob.ub[free_idx[k]];
        if (lo > -kInf) {
            Cons c2;
            c2.q = Eigen::VectorXd::Zero(m);
            c2.q[k] = -1.0;
            c2.r = lo;
            cons.push_back(std::move(c2));
        }
        if (hi < kInf) {
            Cons c2;
            c2.q = Eigen::VectorXd::Zero(m);
            c2.q[k] = 1.0;
            c2.r = -hi;
            cons.push_back(std::move(c2));
        }
    }

    // strictly feasible start: clamp the hint into the box, then phase-I if needed
    Eigen::VectorXd x0(m);
    for (int k = 0; k < m; ++k) {
        const double lo = prob.lb[free_idx[k]], hi = prob.ub[free_idx[k]];
        double v = hint.size() == n ? hint[free_idx[k]] : 0.0;
        const double pad = hi < kInf ? std::min(1e-4, 0.25 * (hi - lo)) : 1e-4;
        v = std::max(lo + pad, hi < kInf ? std::min(v, hi - pad) : std::max(v, lo + pad));
        x0[k] = v;
    }
    auto worst_of = [&](const Eigen::VectorXd& x) {
        double wv = -kInf;
        for (std::size_t k = 0; k < n_problem_cons; ++k) wv = std::max(wv, cons[k].eval(x));
        return wv;
    };
    if (n_problem_cons > 0 && worst_of(x0) >= -1e-12) {
        // phase-I: minimize the common slack t over (x, t)
        std::vector<Cons> pc;
        for (std::size_t k = 0; k < cons.size(); ++k) {
            Cons c2;
            c2.r = cons[k].r;
            c2.q = Eigen::VectorXd::Zero(m + 1);
            c2.q.head(m) = cons[k].q;
            if (k < n_problem_cons) c2.q[m] = -1.0;  // only problem constraints get the slack
            if (cons[k].P.size()) {
                c2.P = Eigen::MatrixXd::Zero(m + 1, m + 1);
                c2.P.topLeftCorner(m, m) = cons[k].P;
            }
            pc.push_back(std::move(c2));
        }
        {
            Cons tmin;  // t >= -1 keeps the phase-I problem bounded
            tmin.q = Eigen::VectorXd::Zero(m + 1);
            tmin.q[m] = -1.0;
            tmin.r = -1.0;
            pc.push_back(std::move(tmin));
        }
        Eigen::VectorXd cx = Eigen::VectorXd::Zero(m + 1);
        cx[m] = 1.0;
        Eigen::VectorXd px0(m + 1);
        px0.head(m) = x0;
        px0[m] = worst_of(x0) + 1.0;
        double t = 1.0;
        Eigen::VectorXd px = px0;
        bool found = false;
        while (true) {
            auto r = center(pc, cx, t, px);
            res.newton_iterations += r.iterations;
            px = r.x;
            if (px[m] < -1e-10 && worst_of(px.head(m)) < -1e-12) {
                found = true;
                break;
            }
            if (t >= 1e9) break;
            t *= 20.0;
        }
        if (!found) {
            res.x = expand(x0);
            res.message = "phase-I could not find a strictly feasible point";
            res.max_violation = worst_of(x0);
            return res;
        }
        x0 = px.head(m);
    }

    auto b = barrier(cons, cr, x0, 1e10);
    res.newton_iterations += b.newton_iterations;
    res.x = expand(b.x);
    res.converged = true;
    res.objective = prob.c.dot(res.x);

    // KKT residuals. The raw barrier multipliers 1/(-t f_k) certify the
    // duality gap; for the stationarity report they are refined by a
    // least-squares fit over the near-active constraints.
    std::vector<double> fvals(cons.size());
    std::vector<int> active;
    double viol = 0.0;
    for (std::size_t k = 0; k < cons.size(); ++k) {
        fvals[k] = cons[k].eval(b.x);
        viol = std::max(viol, fvals[k]);
        if (fvals[k] > -1e-6) active.push_back(static_cast<int>(k));
    }
    double stat_norm = cr.cwiseAbs().maxCoeff();
    double compl_max = 0.0;
    if (!active.empty()) {
        Eigen::MatrixXd J(m, static_cast<int>(active.size()));
        for (std::size_t a = 0; a < active.size(); ++a) J.col(a) = cons[active[a]].grad(b.x);
        Eigen::VectorXd mu = J.colPivHouseholderQr().solve(-cr);
        mu = mu.cwiseMax(0.0);  // dual feasibility enforced; misfit lands in the residual
        Eigen::VectorXd stat = cr;
        for (std::size_t a = 0; a < active.size(); ++a) {
            stat += mu[a] * J.col(a);
            compl_max = std::max(compl_max, std::abs(mu[a] * fvals[active[a]]));
        }
        stat_norm = stat.cwiseAbs().maxCoeff();
    }
    // inactive constraints carry the barrier multiplier 1/(-t f) <= 1/(t 1e-6)
    const double inactive_gap = 1.0 / b.t;
    res.max_violation = viol;
    res.kkt_residual =
        std::max({stat_norm, compl_max, inactive_gap, std::max(0.0, viol)});
    res.feasible = viol <= 1e-9;
    return res;
}

}  // namespace relaystab
