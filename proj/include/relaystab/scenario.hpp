#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaystab/channel.hpp"
#include "relaystab/optimizer.hpp"
#include "relaystab/policy.hpp"
#include "relaystab/simulator.hpp"

namespace relaystab {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A runnable experiment description, normally loaded from JSON. Exactly one
// of `policy` / `optimize` is set.
struct Scenario {
    std::string name;
    PhyParams phy;
    ChannelVariances variances;
    Scheme scheme = Scheme::SBC;

    std::optional<Policy> policy;
    struct Optimize {
        std::vector<double> w;
        std::vector<double> weights;
    };
    std::optional<Optimize> optimize;

    std::optional<DemandVector> demand;
    std::optional<RegionSweepConfig> sweeps;

    struct Sim {
        std::int64_t horizon = 1'000'000;
        std::int64_t warmup = 100'000;
        std::uint64_t seed = 1;
        bool dominant = false;
        std::vector<int> saturated;
    };
    std::optional<Sim> sim;

    ScaOptions optimizer_options;
    bool with_oracle = false;

    static Scenario from_json_text(const std::string& text);
    static Scenario from_file(const std::string& path);
    std::string canonical_text() const;  // normalized parameter dump, hashed into summaries
};

std::uint64_t fnv1a(const std::string& text);

// Runs the scenario and writes its outputs (JSON/CSV) under out_dir.
// Returns the list of files written.
std::vector<std::string> run_scenario(const Scenario& sc, const std::string& out_dir);

struct OracleCheckRow {
    std::vector<double> w;
    std::vector<double> weights;
    double fpp_objective = 0.0;
    double oracle_objective = 0.0;
    bool solver_ok = false;
};

std::vector<OracleCheckRow> oracle_check(const Scenario& sc);

}  // namespace relaystab
