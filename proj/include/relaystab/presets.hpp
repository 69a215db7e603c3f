#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relaystab/channel.hpp"

namespace relaystab {

// Built-in experiment parameter sets. The channel variances and sweep shapes
// are fixed constants; seeds only affect simulation-based outputs.
struct PresetScenario {
    std::string id;
    PhyParams phy;
    ChannelVariances variances;
};

const std::vector<std::string>& preset_ids();
PresetScenario preset_channel(const std::string& id);  // throws on unknown id

struct PresetOutput {
    std::vector<std::string> files;
    std::string summary_path;
};

PresetOutput run_preset(const std::string& id, const std::string& out_dir, std::uint64_t seed);

}  // namespace relaystab
