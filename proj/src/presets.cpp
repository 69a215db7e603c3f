#include "relaystab/presets.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "relaystab/optimizer.hpp"
#include "relaystab/scenario.hpp"
#include "relaystab/version.hpp"

namespace relaystab {

using nlohmann::json;

namespace {

ChannelVariances var2(double s1d, double s2d, double s1r, double s2r, double rd) {
    ChannelVariances v;
    v.source_dest = {s1d, s2d};
    v.source_relay = {s1r, s2r};
    v.relay_dest = rd;
    return v;
}

// the five channel configurations used across the experiments
ChannelVariances case1() { return var2(0.02, 0.84, 0.97, 0.93, 0.03); }
ChannelVariances case2() { return var2(0.8, 0.08, 0.85, 0.9, 0.97); }
ChannelVariances case3() { return var2(0.75, 0.8, 0.63, 0.73, 0.85); }
ChannelVariances rate_sweep_var() { return var2(0.8, 0.8, 0.95, 0.95, 0.96); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << text;
}

const std::vector<Scheme> kAllSchemes{Scheme::SBC, Scheme::DBC, Scheme::CCMA, Scheme::CM_DBC};

std::string scheme_file_tag(Scheme s) {
    std::string t = to_string(s);
    for (auto& c : t)
        if (c == '-') c = '_';
    return t;
}

void region_preset(const ChannelVariances& var, const std::string& out_dir,
                   std::vector<std::string>& files) {
    const PhyParams phy{10.0, 1.0};
    const auto links = build_links(phy, var);
    auto cfg = RegionSweepConfig::defaults();
    for (Scheme s : kAllSchemes) {
        const auto sweep = region_sweep(s, links, cfg);
        std::ostringstream csv;
        csv << "w1,w2,x1,x2,lambda_s_1,lambda_s_2,objective,solver_status\n";
        for (const auto& p : sweep.points) {
            csv << fmt(p.w[0]) << "," << fmt(p.w[1]) << "," << fmt(p.weights[0]) << ","
                << fmt(p.weights[1]) << "," << fmt(p.lam_s[0]) << "," << fmt(p.lam_s[1]) << ","
                << fmt(p.objective) << "," << p.solver_status << "\n";
        }
        std::string path = out_dir + "/region_" + scheme_file_tag(s) + ".csv";
        write_text(path, csv.str());
        files.push_back(path);

        std::ostringstream hull;
        hull << "lambda_s_1,lambda_s_2\n";
        for (const auto& p : sweep.hull) hull << fmt(p.x) << "," << fmt(p.y) << "\n";
        path = out_dir + "/hull_" + scheme_file_tag(s) + ".csv";
        write_text(path, hull.str());
        files.push_back(path);
    }
}

void aggregate_preset(const ChannelVariances& var, const std::string& out_dir,
                      std::vector<std::string>& files) {
    const PhyParams phy{10.0, 1.0};
    const auto links = build_links(phy, var);
    for (Scheme s : kAllSchemes) {
        std::ostringstream csv;
        csv << "w1,aggregate_throughput\n";
        for (int k = 0; k <= 10; ++k) {
            const double w1 = 0.1 * k;
            const std::vector<double> w{w1, 1.0 - w1};
            double obj;
            if (s == Scheme::CCMA) {
                const auto lam = ccma_throughput(links, w);
                obj = lam[0] + lam[1];
            } else {
                obj = fpp_sca(s, links, w, {1.0, 1.0}).objective;
            }
            csv << fmt(w1) << "," << fmt(obj) << "\n";
        }
        const std::string path = out_dir + "/aggregate_" + scheme_file_tag(s) + ".csv";
        write_text(path, csv.str());
        files.push_back(path);
    }
}

void rate_sweep_preset(const std::string& out_dir, std::vector<std::string>& files) {
    const auto var = rate_sweep_var();
    for (Scheme s : kAllSchemes) {
        std::ostringstream csv;
        csv << "R,aggregate_throughput\n";
        for (int k = 1; k <= 15; ++k) {
            const double R = 0.2 * k;
            const PhyParams phy{10.0, R};
            const auto links = build_links(phy, var);
            const std::vector<double> w{0.5, 0.5};
            double obj;
            if (s == Scheme::CCMA) {
                const auto lam = ccma_throughput(links, w);
                obj = lam[0] + lam[1];
            } else {
                obj = fpp_sca(s, links, w, {1.0, 1.0}).objective;
            }
            csv << fmt(R) << "," << fmt(obj) << "\n";
        }
        const std::string path = out_dir + "/rate_sweep_" + scheme_file_tag(s) + ".csv";
        write_text(path, csv.str());
        files.push_back(path);
    }
}

void delay_preset(const ChannelVariances& var, int constrained_source, double rate,
                  int target_source, const std::vector<Scheme>& schemes,
                  const std::string& out_dir, std::vector<std::string>& files, json& notes) {
    const PhyParams phy{10.0, 1.0};
    const auto links = build_links(phy, var);
    std::vector<double> grid;
    for (int k = 1; k <= 22; ++k) grid.push_back(0.04 * k);  // 0.04 .. 0.88

    for (Scheme s : schemes) {
        const auto curve =
            min_delay_search(s, links, constrained_source, rate, target_source, grid);
        std::ostringstream csv;
        csv << "demand,feasible,min_delay,w1,a11,a12,a21,a22\n";
        for (const auto& p : curve) {
            csv << fmt(p.demand) << "," << (p.feasible ? 1 : 0) << ","
                << (p.feasible ? fmt(p.delay) : "") << ",";
            if (p.feasible) {
                csv << fmt(p.w[0]) << "," << fmt(p.action[0][0]) << "," << fmt(p.action[0][1])
                    << "," << fmt(p.action[1][0]) << "," << fmt(p.action[1][1]);
            } else {
                csv << ",,,,";
            }
            csv << "\n";
        }
        const std::string path = out_dir + "/delay_" + scheme_file_tag(s) + ".csv";
        write_text(path, csv.str());
        files.push_back(path);

        // reachable throughput under the constraint, for the summary
        const auto cm = constrained_max_throughput(s, links, constrained_source, rate,
                                                   target_source);
        json note;
        note["constraint_source"] = constrained_source + 1;
        note["constraint_rate"] = rate;
        if (cm) {
            note["max_target_demand"] = cm->value;
        } else {
            note["constraint_infeasible"] = true;
            // the largest sustainable rate for the constrained source, over all policies
            double reach = 0.0;
            for (int k = 1; k < 20; ++k) {
                const double w1 = 0.05 * k;
                const auto orc = grid_oracle(s, links, {w1, 1.0 - w1},
                                             constrained_source == 0
                                                 ? std::vector<double>{1.0, 0.0}
                                                 : std::vector<double>{0.0, 1.0});
                reach = std::max(reach, orc.lam_s[constrained_source]);
            }
            note["max_achievable_constraint_rate"] = reach;
        }
        notes[to_string(s)] = note;
    }
}

void fig10_preset(const std::string& out_dir, std::vector<std::string>& files) {
    // middle r-d variance 0.3 is a chosen representative, not a quoted value
    const double rho_rd[3] = {0.05, 0.3, 0.8};
    for (double rd : rho_rd) {
        std::ostringstream csv;
        csv << "rho2_s1d,f_s1d,lambda_sbc,lambda_dbc,beta_opt,alpha_opt,sbc_condition,"
               "dbc_condition\n";
        for (int k = 0; k < 60; ++k) {
            const double rho = 0.018 * std::pow(1.0 / 0.018, k / 59.0);
            ChannelVariances v;
            v.source_dest = {rho};
            v.source_relay = {0.8};
            v.relay_dest = rd;
            const PhyParams phy{10.0, 1.0};
            const auto links = build_links(phy, v);
            const auto sbc = single_user_sbc_optimum(links);
            const auto dbc = single_user_dbc_optimum(links);
            csv << fmt(rho) << "," << fmt(links.f_sd[0]) << ","
                << fmt(sbc.max_stable_throughput) << "," << fmt(dbc.max_stable_throughput) << ","
                << fmt(sbc.optimal_action) << "," << fmt(dbc.optimal_action) << ","
                << (sbc.condition_holds ? 1 : 0) << "," << (dbc.condition_holds ? 1 : 0) << "\n";
        }
        std::ostringstream name;
        name << out_dir << "/single_user_rd" << fmt(rd) << ".csv";
        write_text(name.str(), csv.str());
        files.push_back(name.str());
    }
}

}  // namespace

const std::vector<std::string>& preset_ids() {
    static const std::vector<std::string> ids{
        "case1-region", "case1-aggregate", "case2-region", "case2-aggregate", "case3-region",
        "rate-sweep",   "delay-fig8",      "delay-fig9",   "single-user-fig10"};
    return ids;
}

PresetScenario preset_channel(const std::string& id) {
    PresetScenario p;
    p.id = id;
    p.phy = PhyParams{10.0, 1.0};
    if (id.rfind("case1", 0) == 0 || id == "delay-fig8")
        p.variances = case1();
    else if (id.rfind("case2", 0) == 0 || id == "delay-fig9")
        p.variances = case2();
    else if (id.rfind("case3", 0) == 0)
        p.variances = case3();
    else if (id == "rate-sweep")
        p.variances = rate_sweep_var();
    else if (id == "single-user-fig10") {
        p.variances.source_dest = {0.5};
        p.variances.source_relay = {0.8};
        p.variances.relay_dest = 0.05;
    } else {
        throw std::invalid_argument("unknown preset id: " + id);
    }
    return p;
}

PresetOutput run_preset(const std::string& id, const std::string& out_dir, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(out_dir);
    PresetOutput out;
    json notes = json::object();

    if (id == "case1-region")
        region_preset(case1(), out_dir, out.files);
    else if (id == "case2-region")
        region_preset(case2(), out_dir, out.files);
    else if (id == "case3-region")
        region_preset(case3(), out_dir, out.files);
    else if (id == "case1-aggregate")
        aggregate_preset(case1(), out_dir, out.files);
    else if (id == "case2-aggregate")
        aggregate_preset(case2(), out_dir, out.files);
    else if (id == "rate-sweep")
        rate_sweep_preset(out_dir, out.files);
    else if (id == "delay-fig8")
        delay_preset(case1(), 0, 0.29, 1, {Scheme::SBC, Scheme::DBC}, out_dir, out.files, notes);
    else if (id == "delay-fig9")
        delay_preset(case2(), 1, 0.81, 0, {Scheme::SBC, Scheme::DBC, Scheme::CCMA}, out_dir,
                     out.files, notes);
    else if (id == "single-user-fig10")
        fig10_preset(out_dir, out.files);
    else
        throw std::invalid_argument("unknown preset id: " + id);

    const auto t1 = std::chrono::steady_clock::now();
    json summary;
    summary["version"] = kVersion;
    summary["preset"] = id;
    summary["seed"] = seed;
    {
        const auto ch = preset_channel(id);
        json cj;
        cj["P"] = ch.phy.power;
        cj["R"] = ch.phy.rate;
        cj["sd"] = ch.variances.source_dest;
        cj["sr"] = ch.variances.source_relay;
        cj["rd"] = ch.variances.relay_dest;
        summary["scenario_hash"] = fnv1a(id + cj.dump());
    }
    summary["wall_clock_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    summary["files"] = out.files;
    if (!notes.empty()) summary["notes"] = notes;
    out.summary_path = out_dir + "/summary.json";
    write_text(out.summary_path, summary.dump(2) + "\n");
    return out;
}

}  // namespace relaystab
