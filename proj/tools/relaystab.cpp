#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "relaystab/presets.hpp"
#include "relaystab/scenario.hpp"
#include "relaystab/version.hpp"

namespace {
constexpr int kOk = 0;
constexpr int kValidationError = 2;
constexpr int kSolverFailure = 3;
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability-region and delay toolkit for cooperative relaying schemes"};
    app.set_version_flag("--version", relaystab::kVersion);
    app.require_subcommand(1);

    std::string preset_id, out_dir = "out", scenario_path;
    std::uint64_t seed = 1;

    auto* preset = app.add_subcommand("preset", "run a built-in experiment preset");
    preset->add_option("id", preset_id, "preset id")->required();
    preset->add_option("--out", out_dir, "output directory");
    preset->add_option("--seed", seed, "simulation seed");

    auto* run = app.add_subcommand("run", "run a scenario file");
    run->add_option("scenario", scenario_path, "scenario JSON path")->required();
    run->add_option("--out", out_dir, "output directory");

    auto* oracle = app.add_subcommand("oracle-check", "compare the solver against the grid oracle");
    oracle->add_option("scenario", scenario_path, "scenario JSON path")->required();

    auto* list = app.add_subcommand("list-presets", "print the available preset ids");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& id : relaystab::preset_ids()) std::printf("%s\n", id.c_str());
            return kOk;
        }
        if (preset->parsed()) {
            const auto out = relaystab::run_preset(preset_id, out_dir, seed);
            std::printf("wrote %zu files; summary: %s\n", out.files.size(),
                        out.summary_path.c_str());
            return kOk;
        }
        if (run->parsed()) {
            const auto sc = relaystab::Scenario::from_file(scenario_path);
            const auto files = relaystab::run_scenario(sc, out_dir);
            for (const auto& f : files) std::printf("%s\n", f.c_str());
            return kOk;
        }
        if (oracle->parsed()) {
            const auto sc = relaystab::Scenario::from_file(scenario_path);
            const auto rows = relaystab::oracle_check(sc);
            bool ok = true;
            for (const auto& r : rows) {
                const double ratio =
                    r.oracle_objective > 0 ? r.fpp_objective / r.oracle_objective : 1.0;
                std::printf("w1=%.3f x=(%.3g,%.3g) fpp=%.6f oracle=%.6f ratio=%.4f %s\n", r.w[0],
                            r.weights[0], r.weights.size() > 1 ? r.weights[1] : 0.0,
                            r.fpp_objective, r.oracle_objective, ratio,
                            r.solver_ok ? "ok" : "SOLVER-FAILED");
                ok = ok && r.solver_ok;
            }
            return ok ? kOk : kSolverFailure;
        }
    } catch (const relaystab::ScenarioError& e) {
        std::fprintf(stderr, "scenario error: %s\n", e.what());
        return kValidationError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kValidationError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kSolverFailure;
    }
    return kOk;
}
