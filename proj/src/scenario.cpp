#include "relaystab/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "relaystab/version.hpp"

namespace relaystab {

using nlohmann::json;

namespace {

// "s<k>-d" / "s<k>-r" / "r-d"
struct ParsedKey {
    bool relay = false;
    int source = -1;  // 0-based
    char rx = 'd';
};

ParsedKey parse_variance_key(const std::string& key) {
    ParsedKey out;
    if (key == "r-d") {
        out.relay = true;
        return out;
    }
    const auto dash = key.find('-');
    if (key.size() >= 4 && key[0] == 's' && dash != std::string::npos &&
        dash + 2 == key.size() && (key.back() == 'd' || key.back() == 'r')) {
        const std::string num = key.substr(1, dash - 1);
        if (!num.empty() && num.find_first_not_of("0123456789") == std::string::npos) {
            out.source = std::stoi(num) - 1;
            out.rx = key.back();
            if (out.source >= 0) return out;
        }
    }
    throw ScenarioError("malformed variance key: \"" + key + "\"");
}

ChannelVariances parse_variances(const json& j) {
    int M = 0;
    for (const auto& [key, val] : j.items()) {
        (void)val;
        const auto k = parse_variance_key(key);
        if (!k.relay) M = std::max(M, k.source + 1);
    }
    if (M == 0) throw ScenarioError("channel.variances: no source links given");
    ChannelVariances var;
    var.source_dest.assign(M, -1.0);
    var.source_relay.assign(M, -1.0);
    var.relay_dest = -1.0;
    for (const auto& [key, val] : j.items()) {
        const auto k = parse_variance_key(key);
        const double v = val.get<double>();
        if (k.relay)
            var.relay_dest = v;
        else if (k.rx == 'd')
            var.source_dest[k.source] = v;
        else
            var.source_relay[k.source] = v;
    }
    for (int i = 0; i < M; ++i) {
        if (var.source_dest[i] < 0)
            throw ScenarioError("channel.variances: missing key \"s" + std::to_string(i + 1) +
                                "-d\"");
        if (var.source_relay[i] < 0)
            throw ScenarioError("channel.variances: missing key \"s" + std::to_string(i + 1) +
                                "-r\"");
    }
    if (var.relay_dest < 0) throw ScenarioError("channel.variances: missing key \"r-d\"");
    return var;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (j.contains(key)) return j.at(key).get<T>();
    return fallback;
}

}  // namespace

Scenario Scenario::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario JSON parse error: ") + e.what());
    }
    try {
        Scenario sc;
        sc.name = get_or<std::string>(j, "name", "scenario");
        if (!j.contains("channel")) throw ScenarioError("scenario: missing \"channel\" block");
        const auto& ch = j.at("channel");
        sc.phy.power = ch.at("P").get<double>();
        sc.phy.rate = ch.at("R").get<double>();
        sc.variances = parse_variances(ch.at("variances"));
        sc.phy.validate();
        sc.variances.validate();
        const int M = sc.variances.num_sources();

        sc.scheme = scheme_from_string(j.at("scheme").get<std::string>());

        const bool has_policy = j.contains("policy");
        const bool has_opt = j.contains("optimize");
        if (has_policy == has_opt)
            throw ScenarioError("scenario: exactly one of \"policy\" / \"optimize\" is required");
        if (has_policy) {
            Policy p;
            p.scheme = sc.scheme;
            p.w = j.at("policy").at("w").get<std::vector<double>>();
            p.action = j.at("policy").at("action").get<std::vector<std::vector<double>>>();
            if (p.num_sources() != M)
                throw ScenarioError("scenario: policy dimension does not match the channel block");
            p.validate();
            sc.policy = std::move(p);
        } else {
            Optimize o;
            o.w = j.at("optimize").at("w").get<std::vector<double>>();
            o.weights = get_or(j.at("optimize"), "weights", std::vector<double>(M, 1.0));
            if (static_cast<int>(o.w.size()) != M || static_cast<int>(o.weights.size()) != M)
                throw ScenarioError("scenario: optimize dimensions do not match the channel block");
            sc.optimize = std::move(o);
        }

        if (j.contains("demand")) {
            DemandVector d;
            d.lambda = j.at("demand").get<std::vector<double>>();
            if (static_cast<int>(d.lambda.size()) != M)
                throw ScenarioError("scenario: demand dimension does not match the channel block");
            d.validate();
            sc.demand = std::move(d);
        }

        if (j.contains("sweeps")) {
            RegionSweepConfig cfg = RegionSweepConfig::defaults();
            const auto& sw = j.at("sweeps");
            if (sw.contains("w1_grid")) cfg.w1_grid = sw.at("w1_grid").get<std::vector<double>>();
            if (sw.contains("weight_grid"))
                cfg.weight_grid = sw.at("weight_grid").get<std::vector<std::vector<double>>>();
            sc.sweeps = std::move(cfg);
        }

        if (j.contains("sim")) {
            Sim s;
            const auto& js = j.at("sim");
            s.horizon = get_or<std::int64_t>(js, "horizon", s.horizon);
            s.warmup = get_or<std::int64_t>(js, "warmup", s.warmup);
            s.seed = get_or<std::uint64_t>(js, "seed", s.seed);
            s.dominant = get_or<bool>(js, "dominant", false);
            s.saturated = get_or(js, "saturated", std::vector<int>{});
            sc.sim = s;
        }

        if (j.contains("optimizer")) {
            const auto& jo = j.at("optimizer");
            sc.optimizer_options.tolerance = get_or(jo, "tolerance", 1e-6);
            sc.optimizer_options.max_iters = get_or(jo, "max_iters", 100);
            sc.optimizer_options.slack_penalty = get_or(jo, "slack_penalty", 1e4);
            sc.optimizer_options.oracle_step = get_or(jo, "oracle_step", 0.02);
            sc.optimizer_options.polish = get_or(jo, "polish", true);
            sc.with_oracle = get_or(jo, "oracle", false);
        }
        if (sc.sweeps) sc.sweeps->opts = sc.optimizer_options;
        return sc;
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario: ") + e.what());
    }
}

Scenario Scenario::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string Scenario::canonical_text() const {
    json j;
    j["name"] = name;
    j["P"] = phy.power;
    j["R"] = phy.rate;
    j["sd"] = variances.source_dest;
    j["sr"] = variances.source_relay;
    j["rd"] = variances.relay_dest;
    j["scheme"] = to_string(scheme);
    if (policy) {
        j["w"] = policy->w;
        j["action"] = policy->action;
    }
    if (optimize) {
        j["opt_w"] = optimize->w;
        j["opt_x"] = optimize->weights;
    }
    if (demand) j["demand"] = demand->lambda;
    if (sim) {
        j["sim"] = {{"horizon", sim->horizon},
                    {"warmup", sim->warmup},
                    {"seed", sim->seed},
                    {"dominant", sim->dominant},
                    {"saturated", sim->saturated}};
    }
    return j.dump();
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

json rates_to_json(const StabilityEvaluation& ev) {
    json j;
    j["mu"] = ev.mu;
    j["lambda_r"] = ev.lam_r;
    j["mu_r"] = ev.mu_r;
    json muu = json::array();
    for (double v : ev.mu_u) muu.push_back(std::isinf(v) ? json("inf") : json(v));
    j["mu_u"] = muu;
    j["lambda_s"] = ev.lam_s;
    j["source_stable"] = ev.source_stable;
    j["relay_stable"] = ev.relay_stable;
    return j;
}

json delay_to_json(const DelayPrediction& dp) {
    json j;
    j["direct_prob"] = dp.direct_prob;
    json tot = json::array();
    for (const auto& d : dp.total) tot.push_back(d ? json(*d) : json("unstable"));
    j["total_delay"] = tot;
    j["source_delay"] = dp.source_delay;
    j["relay_delay"] = dp.relay_delay;
    return j;
}

json stats_to_json(const SimStats& st) {
    json j;
    j["seed"] = st.seed;
    j["horizon"] = st.horizon;
    j["warmup"] = st.warmup;
    j["departure_rate"] = st.departure_rate;
    j["delivery_rate"] = st.delivery_rate;
    j["mean_source_queue"] = st.mean_source_queue;
    j["mean_relay_queue"] = st.mean_relay_queue;
    json md = json::array(), se = json::array();
    for (double v : st.mean_delay) md.push_back(std::isnan(v) ? json(nullptr) : json(v));
    for (double v : st.delay_std_error) se.push_back(std::isnan(v) ? json(nullptr) : json(v));
    j["mean_delay"] = md;
    j["delay_std_error"] = se;
    j["slots_listening"] = st.slots_listening;
    j["slots_transmit_idle"] = st.slots_transmit_idle;
    j["slots_interfering"] = st.slots_interfering;
    j["slots_silent"] = st.slots_silent;
    j["dummy_packets"] = st.dummy_packets;
    j["half_duplex_violations"] = st.half_duplex_violations;
    j["arrivals_total"] = st.arrivals_total;
    j["delivered_total"] = st.delivered_total;
    j["queued_at_end"] = st.queued_at_end;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError("cannot write output file: " + path);
    out << text;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::vector<std::string> run_scenario(const Scenario& sc, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto links = build_links(sc.phy, sc.variances);
    std::vector<std::string> files;

    if (sc.policy && !sc.sweeps) {
        DemandVector demand;
        demand.lambda.assign(links.M, 0.0);
        if (sc.demand) demand = *sc.demand;
        const auto ev = evaluate_rates(*sc.policy, links, demand);
        const auto dp = predict_delay(*sc.policy, links, demand);
        json j;
        j["name"] = sc.name;
        j["scheme"] = to_string(sc.scheme);
        j["rates"] = rates_to_json(ev);
        j["delay"] = delay_to_json(dp);
        if (sc.sim) {
            SimConfig c;
            c.policy = *sc.policy;
            c.demand = demand;
            c.horizon = sc.sim->horizon;
            c.warmup = sc.sim->warmup;
            c.seed = sc.sim->seed;
            c.dominant_mode = sc.sim->dominant;
            c.saturated = sc.sim->saturated;
            j["sim"] = stats_to_json(simulate(c, links));
        }
        const std::string path = out_dir + "/scenario_result.json";
        write_text(path, j.dump(2) + "\n");
        files.push_back(path);
        return files;
    }

    if (sc.optimize && !sc.sweeps) {
        std::ostringstream csv;
        const int M = links.M;
        for (int i = 1; i <= M; ++i) csv << "w" << i << ",";
        for (int i = 1; i <= M; ++i) csv << "x" << i << ",";
        for (int i = 1; i <= M; ++i) csv << "lambda_s_" << i << ",";
        csv << "objective,solver_status";
        if (sc.with_oracle) csv << ",oracle_objective";
        csv << "\n";
        const auto r = sc.scheme == Scheme::CCMA
                           ? FppScaResult{}
                           : fpp_sca(sc.scheme, links, sc.optimize->w, sc.optimize->weights,
                                     sc.optimizer_options);
        std::vector<double> lam = r.lam_s;
        std::string status = r.success ? "ok" : "failed";
        double obj = r.objective;
        if (sc.scheme == Scheme::CCMA) {
            lam = ccma_throughput(links, sc.optimize->w);
            obj = 0.0;
            for (int i = 0; i < M; ++i) obj += sc.optimize->weights[i] * lam[i];
            status = "closed-form";
        }
        for (double v : sc.optimize->w) csv << fmt(v) << ",";
        for (double v : sc.optimize->weights) csv << fmt(v) << ",";
        for (double v : lam) csv << fmt(v) << ",";
        csv << fmt(obj) << "," << status;
        if (sc.with_oracle)
            csv << ","
                << fmt(grid_oracle(sc.scheme, links, sc.optimize->w, sc.optimize->weights,
                                   sc.optimizer_options.oracle_step)
                           .objective);
        csv << "\n";
        const std::string path = out_dir + "/optimize.csv";
        write_text(path, csv.str());
        files.push_back(path);
        return files;
    }

    // sweeps
    RegionSweepConfig cfg = sc.sweeps ? *sc.sweeps : RegionSweepConfig::defaults();
    cfg.opts = sc.optimizer_options;
    cfg.with_oracle = sc.with_oracle;
    const auto sweep = region_sweep(sc.scheme, links, cfg);
    std::ostringstream csv;
    csv << "w1,w2,x1,x2,lambda_s_1,lambda_s_2,objective,solver_status";
    if (cfg.with_oracle) csv << ",oracle_objective";
    csv << "\n";
    for (const auto& p : sweep.points) {
        csv << fmt(p.w[0]) << "," << fmt(p.w[1]) << "," << fmt(p.weights[0]) << ","
            << fmt(p.weights[1]) << "," << fmt(p.lam_s[0]) << "," << fmt(p.lam_s[1]) << ","
            << fmt(p.objective) << "," << p.solver_status;
        if (cfg.with_oracle) csv << "," << fmt(p.oracle_objective);
        csv << "\n";
    }
    const std::string path = out_dir + "/region_points.csv";
    write_text(path, csv.str());
    files.push_back(path);

    std::ostringstream hull;
    hull << "lambda_s_1,lambda_s_2\n";
    for (const auto& p : sweep.hull) hull << fmt(p.x) << "," << fmt(p.y) << "\n";
    const std::string hpath = out_dir + "/region_hull.csv";
    write_text(hpath, hull.str());
    files.push_back(hpath);
    return files;
}

std::vector<OracleCheckRow> oracle_check(const Scenario& sc) {
    const auto links = build_links(sc.phy, sc.variances);
    std::vector<std::pair<std::vector<double>, std::vector<double>>> runs;
    if (sc.optimize) {
        runs.push_back({sc.optimize->w, sc.optimize->weights});
    } else if (sc.sweeps) {
        for (double w1 : sc.sweeps->w1_grid)
            for (const auto& x : sc.sweeps->weight_grid) runs.push_back({{w1, 1.0 - w1}, x});
    } else if (sc.policy) {
        runs.push_back({sc.policy->w, std::vector<double>(links.M, 1.0)});
    }
    std::vector<OracleCheckRow> out;
    for (const auto& [w, x] : runs) {
        OracleCheckRow row;
        row.w = w;
        row.weights = x;
        const auto orc = grid_oracle(sc.scheme, links, w, x, sc.optimizer_options.oracle_step);
        row.oracle_objective = orc.objective;
        if (sc.scheme == Scheme::CCMA) {
            row.fpp_objective = orc.objective;
            row.solver_ok = true;
        } else {
            const auto r = fpp_sca(sc.scheme, links, w, x, sc.optimizer_options);
            row.fpp_objective = r.objective;
            row.solver_ok = r.success;
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace relaystab
