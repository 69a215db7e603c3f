#include "relaystab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relaystab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTiny = 1e-300;
}  // namespace

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::SBC: return "SBC";
        case Scheme::DBC: return "DBC";
        case Scheme::CCMA: return "CCMA";
        case Scheme::CM_DBC: return "CM-DBC";
    }
    return "?";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "SBC") return Scheme::SBC;
    if (name == "DBC") return Scheme::DBC;
    if (name == "CCMA") return Scheme::CCMA;
    if (name == "CM-DBC" || name == "CM_DBC" || name == "CMDBC") return Scheme::CM_DBC;
    throw std::invalid_argument("unknown scheme: " + name);
}

double Policy::row_sum(int i) const {
    double s = 0.0;
    for (double a : action[i]) s += a;
    return s;
}

void Policy::validate() const {
    const int M = num_sources();
    if (M == 0) throw std::invalid_argument("Policy: empty time-share vector");
    if (static_cast<int>(action.size()) != M)
        throw std::invalid_argument("Policy: action matrix must be MxM");
    double wsum = 0.0;
    for (double wi : w) {
        if (wi < -1e-12 || wi > 1.0 + 1e-12)
            throw std::invalid_argument("Policy: w entries must lie in [0,1]");
        wsum += wi;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("Policy: time shares must sum to 1");
    for (int i = 0; i < M; ++i) {
        if (static_cast<int>(action[i].size()) != M)
            throw std::invalid_argument("Policy: action matrix must be MxM");
        double s = 0.0;
        for (double a : action[i]) {
            if (a < -1e-12 || a > 1.0 + 1e-12)
                throw std::invalid_argument("Policy: action entries must lie in [0,1]");
            s += a;
        }
        if (s > 1.0 + 1e-9)
            throw std::invalid_argument("Policy: action row sums must not exceed 1");
    }
    if (scheme == Scheme::CCMA) {
        for (int i = 0; i < M; ++i)
            if (row_sum(i) > 1e-12)
                throw std::invalid_argument("Policy: CCMA requires an all-zero action matrix");
    }
}

Policy Policy::zeros(Scheme scheme, std::vector<double> w) {
    Policy p;
    p.scheme = scheme;
    const int M = static_cast<int>(w.size());
    p.w = std::move(w);
    p.action.assign(M, std::vector<double>(M, 0.0));
    return p;
}

void DemandVector::validate() const {
    for (double l : lambda)
        if (l < 0.0 || l >= 1.0)
            throw std::invalid_argument("DemandVector: arrival rates must lie in [0,1)");
}

EffectiveLinks EffectiveLinks::make(Scheme scheme, const LinkProbabilities& links) {
    EffectiveLinks e;
    e.base = &links;
    e.scheme = scheme;
    e.helped.assign(links.M, true);
    if (scheme == Scheme::CCMA) {
        for (int i = 0; i < links.M; ++i) e.helped[i] = links.f_rd > links.f_sd[i];
    }
    return e;
}

double EffectiveLinks::g_sd_r(int i) const {
    return scheme == Scheme::CM_DBC ? 0.0 : base->g_sd_r(i);
}

double EffectiveLinks::g_rd_s(int i) const {
    return scheme == Scheme::CM_DBC ? 0.0 : base->g_rd_s(i);
}

double EffectiveLinks::relay_T(int i) const {
    if (!helped[i]) return 0.0;
    return (1.0 - base->f_sd[i]) * base->f_sr[i];
}

bool StabilityEvaluation::all_stable() const {
    for (std::size_t i = 0; i < source_stable.size(); ++i)
        if (!source_stable[i] || !relay_stable[i]) return false;
    return true;
}

StabilityEvaluation evaluate_rates(const Policy& policy, const LinkProbabilities& links,
                                   const DemandVector& demand) {
    policy.validate();
    demand.validate();
    const int M = links.M;
    if (policy.num_sources() != M || static_cast<int>(demand.lambda.size()) != M)
        throw std::invalid_argument("evaluate_rates: dimension mismatch");

    const auto eff = EffectiveLinks::make(policy.scheme, links);
    const bool sbc_like = eff.sbc_like();
    StabilityEvaluation ev;
    ev.mu.resize(M);
    ev.lam_r.resize(M);
    ev.mu_r.resize(M);
    ev.mu_u.resize(M);
    ev.lam_s.resize(M);
    ev.source_stable.resize(M);
    ev.relay_stable.resize(M);

    for (int i = 0; i < M; ++i) {
        const double wi = policy.w[i];
        const double s = policy.row_sum(i);
        const double T = eff.relay_T(i);
        const double a = links.f_sd[i] + T;  // interference-free departure prob
        const double mu = eff.helped[i] ? wi * (s * eff.g_sd_r(i) + (1.0 - s) * a)
                                        : wi * links.f_sd[i];
        ev.mu[i] = mu;

        const double lam = demand.lambda[i];
        const double busy = mu > kTiny ? std::min(1.0, lam / mu) : (lam > 0.0 ? 1.0 : 0.0);

        // relay-queue arrival/service at the offered demand
        ev.lam_r[i] = wi * T * busy * (1.0 - s);
        double mu_r;
        if (sbc_like) {
            mu_r = wi * ((1.0 - busy) * links.f_rd + busy * policy.action[i][i] * eff.g_rd_s(i));
        } else {
            mu_r = wi * policy.action[i][i] *
                   ((1.0 - busy) * links.f_rd + busy * eff.g_rd_s(i));
        }
        for (int j = 0; j < M; ++j) {
            if (j == i) continue;
            mu_r += policy.w[j] * policy.action[j][i] * eff.g_rd_s(j);
        }
        ev.mu_r[i] = mu_r;

        // relay-stability bound, demand independent
        double N, D;
        if (sbc_like) {
            N = wi * links.f_rd;
            D = wi * ((1.0 - s) * T + links.f_rd - policy.action[i][i] * eff.g_rd_s(i));
        } else {
            N = wi * policy.action[i][i] * links.f_rd;
            D = wi * ((1.0 - s) * T + policy.action[i][i] * (links.f_rd - eff.g_rd_s(i)));
        }
        for (int j = 0; j < M; ++j) {
            if (j == i) continue;
            N += policy.w[j] * policy.action[j][i] * eff.g_rd_s(j);
        }
        const bool no_relay_arrivals = wi * T * (1.0 - s) <= kTiny;
        if (no_relay_arrivals) {
            ev.mu_u[i] = kInf;  // relay queue stays empty regardless of demand
        } else if (D <= kTiny) {
            ev.mu_u[i] = kInf;  // relay drains faster than it can fill
        } else {
            ev.mu_u[i] = N * mu / D;
        }
        ev.lam_s[i] = std::min(mu, ev.mu_u[i]);

        ev.source_stable[i] = lam < mu;
        ev.relay_stable[i] = ev.lam_r[i] <= kTiny || ev.lam_r[i] < ev.mu_r[i];
    }
    return ev;
}

DelayPrediction predict_delay(const Policy& policy, const LinkProbabilities& links,
                              const DemandVector& demand) {
    const auto ev = evaluate_rates(policy, links, demand);
    const auto eff = EffectiveLinks::make(policy.scheme, links);
    const int M = links.M;
    DelayPrediction dp;
    dp.direct_prob.resize(M);
    dp.source_queue_size.assign(M, 0.0);
    dp.relay_queue_size.assign(M, 0.0);
    dp.source_delay.assign(M, 0.0);
    dp.relay_delay.assign(M, 0.0);
    dp.total.resize(M);

    for (int i = 0; i < M; ++i) {
        const double s = policy.row_sum(i);
        const double T = eff.relay_T(i);
        const double a = links.f_sd[i] + T;
        if (eff.helped[i]) {
            const double num = (1.0 - s) * links.f_sd[i] + s * eff.g_sd_r(i);
            const double den = (1.0 - s) * a + s * eff.g_sd_r(i);
            dp.direct_prob[i] = den > kTiny ? std::min(1.0, num / den) : 1.0;
        } else {
            dp.direct_prob[i] = 1.0;  // unhelped CCMA packets only ever go direct
        }

        const double lam = demand.lambda[i];
        if (!ev.source_stable[i] || !ev.relay_stable[i]) {
            dp.total[i] = std::nullopt;
            continue;
        }
        const double mu = ev.mu[i];
        dp.source_queue_size[i] = (lam - lam * lam) / (mu - lam);
        dp.source_delay[i] = (1.0 - lam) / (mu - lam);

        const double via_relay = 1.0 - dp.direct_prob[i];
        if (via_relay <= 1e-15) {
            dp.total[i] = dp.source_delay[i];
            continue;
        }
        const double lr = ev.lam_r[i], mr = ev.mu_r[i];
        if (mr - lr <= kTiny) {
            dp.total[i] = std::nullopt;  // relayed packets would wait forever
            continue;
        }
        dp.relay_queue_size[i] = (lr - lr * lr) / (mr - lr);
        dp.relay_delay[i] = (1.0 - lr) / (mr - lr);
        dp.total[i] = dp.source_delay[i] + via_relay * dp.relay_delay[i];
    }
    return dp;
}

namespace {

struct SingleUserRates {
    double f_sd, T, a, g_sd, g_rd, f_rd;
};

SingleUserRates su_rates(Scheme scheme, const LinkProbabilities& links) {
    if (links.M != 1) throw std::invalid_argument("single-user analysis requires M = 1");
    SingleUserRates r;
    r.f_sd = links.f_sd[0];
    r.f_rd = links.f_rd;
    const auto eff = EffectiveLinks::make(scheme, links);
    r.g_sd = eff.g_sd_r(0);
    r.g_rd = eff.g_rd_s(0);
    r.T = (1.0 - links.f_sd[0]) * links.f_sr[0];
    r.a = r.f_sd + r.T;
    return r;
}

double su_lam(Scheme scheme, const SingleUserRates& r, double b) {
    const double mu = (1.0 - b) * r.a + b * r.g_sd;
    double N, D;
    if (scheme == Scheme::SBC) {
        N = r.f_rd;
        D = (1.0 - b) * r.T + r.f_rd - b * r.g_rd;
    } else {
        N = b * r.f_rd;
        D = (1.0 - b) * r.T + b * (r.f_rd - r.g_rd);
    }
    if ((1.0 - b) * r.T <= kTiny) return mu;  // relay queue never fills
    if (D <= kTiny) return mu;
    return std::min(mu, N * mu / D);
}

}  // namespace

double single_user_grid_optimum(Scheme scheme, const LinkProbabilities& links, double step,
                                double* argmax) {
    const auto r = su_rates(scheme, links);
    double best = -1.0, bestb = 0.0;
    const long n = std::lround(1.0 / step);
    for (long k = 0; k <= n; ++k) {
        const double b = static_cast<double>(k) / static_cast<double>(n);
        const double v = su_lam(scheme, r, b);
        if (v > best + 1e-15) {
            best = v;
            bestb = b;
        }
    }
    if (argmax) *argmax = bestb;
    return best;
}

SingleUserResult single_user_sbc_optimum(const LinkProbabilities& links) {
    const auto r = su_rates(Scheme::SBC, links);
    SingleUserResult out;
    out.T1 = r.T;
    if (r.T <= kTiny) {
        // relay never receives anything; serving direct-only is optimal
        out.optimal_action = 0.0;
        out.max_stable_throughput = r.f_sd;
        out.condition_holds = true;
        return out;
    }
    const double lhs = r.f_rd - r.g_rd;
    const double rhs = r.g_sd * (r.T + r.f_rd) / (r.T + r.f_sd);
    out.condition_holds = lhs <= rhs;
    if (out.condition_holds) {
        out.optimal_action = r.T / (r.T + r.g_rd);
        out.max_stable_throughput =
            (1.0 - out.optimal_action) * r.a + out.optimal_action * r.g_sd;
    } else {
        out.max_stable_throughput =
            single_user_grid_optimum(Scheme::SBC, links, 1e-4, &out.optimal_action);
    }
    return out;
}

SingleUserResult single_user_dbc_optimum(const LinkProbabilities& links) {
    const auto r = su_rates(Scheme::DBC, links);
    SingleUserResult out;
    out.T1 = r.T;
    if (r.T <= kTiny) {
        out.optimal_action = 0.0;
        out.max_stable_throughput = r.f_sd;
        out.condition_holds = true;
        return out;
    }
    const double lhs = r.f_rd - r.g_rd;
    const double den = r.T * (r.f_sd + r.T - r.g_sd);
    bool holds;
    if (std::abs(den) <= kTiny) {
        holds = true;  // degenerate branch: bound is infinite
    } else {
        const double rhs = (r.T + r.g_rd) * (r.T + r.g_rd) * (r.f_sd + r.T) / den -
                           (r.T + 2.0 * r.g_rd);
        holds = lhs <= rhs;
    }
    out.condition_holds = holds;
    if (holds) {
        out.optimal_action = r.T / (r.T + r.g_rd);
        out.max_stable_throughput =
            (1.0 - out.optimal_action) * r.a + out.optimal_action * r.g_sd;
    } else {
        out.max_stable_throughput =
            single_user_grid_optimum(Scheme::DBC, links, 1e-4, &out.optimal_action);
    }
    return out;
}

Theorem1Condition theorem1_condition(const LinkProbabilities& links) {
    const auto r = su_rates(Scheme::SBC, links);
    Theorem1Condition c;
    c.lhs = r.f_rd - r.g_rd;
    const double branch1 = r.g_sd * (r.T + r.f_rd) / (r.T + r.f_sd);
    const double den = r.T * (r.f_sd + r.T - r.g_sd);
    double branch2;
    if (std::abs(den) <= kTiny) {
        branch2 = kInf;
        c.degenerate_branch = true;
    } else {
        branch2 = (r.T + r.g_rd) * (r.T + r.g_rd) * (r.f_sd + r.T) / den -
                  (r.T + 2.0 * r.g_rd);
    }
    c.rhs = std::min(branch1, branch2);
    c.holds = c.lhs <= c.rhs;
    return c;
}

}  // namespace relaystab
