#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "lpdp/config.hpp"
#include "lpdp/runner.hpp"
#include "lpdp/verify.hpp"
#include "lpdp/version.hpp"

namespace {

int cmd_run(const std::string& config_path, const lpdp::RunOverrides& overrides) {
    const auto cfg = lpdp::ExperimentConfig::from_file(config_path);
    const auto out = lpdp::run_experiment(cfg, overrides);
    std::cout << "wrote " << out.methods.size() << " method(s) to " << out.out_dir << "\n";
    for (const auto& m : out.methods) {
        std::printf("  %-24s reward_mean=%.6g calls/sample=%.6g\n", m.method.name.c_str(),
                    m.reward_mean, m.calls);
    }
    return 0;
}

int cmd_verify(const std::string& preset) {
    const auto results = lpdp::run_verification(preset);
    for (const auto& r : results) {
        std::printf("[%s] %-28s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
    }
    const bool ok = lpdp::all_passed(results);
    std::printf("verify: %zu/%zu checks passed (preset %s)\n",
                static_cast<std::size_t>(
                    std::count_if(results.begin(), results.end(),
                                  [](const lpdp::CheckResult& r) { return r.pass; })),
                results.size(), preset.c_str());
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reward-tilted re-solving for variable-length discrete sequence generation"};
    app.set_version_flag("--version", std::string(lpdp::kToolVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string preset = "default";
    std::string axis;
    std::string run_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;

    auto* run = app.add_subcommand("run", "execute every method block of an experiment config");
    run->add_option("--config", config_path, "experiment config file (JSON)")->required();
    run->add_option("--seed", seed, "override run.seed");
    run->add_option("--out", out_dir, "override run.out");
    run->add_option("--workers", workers, "override run.workers");

    auto* verify = app.add_subcommand("verify", "run the property suites");
    verify->add_option("--preset", preset, "tiny | default | fault");

    auto* diagnose = app.add_subcommand("diagnose", "same-type diagnostics for a run directory");
    diagnose->add_option("run_dir", run_dir, "directory written by `run`")->required();

    auto* ablate = app.add_subcommand("ablate", "sweep one axis of the first lpdp method");
    ablate->add_option("--config", config_path, "experiment config file (JSON)")->required();
    ablate->add_option("--axis", axis, "horizon | lambda | window_pos | window_len")->required();
    ablate->add_option("--seed", seed, "override run.seed");
    ablate->add_option("--out", out_dir, "override run.out");
    ablate->add_option("--workers", workers, "override run.workers");

    CLI11_PARSE(app, argc, argv);

    lpdp::RunOverrides overrides;
    overrides.seed = seed;
    if (!out_dir.empty()) overrides.out_dir = out_dir;
    overrides.workers = workers;

    try {
        if (run->parsed()) return cmd_run(config_path, overrides);
        if (verify->parsed()) return cmd_verify(preset);
        if (diagnose->parsed()) {
            const std::string csv = lpdp::diagnose_run(run_dir);
            std::cout << "wrote " << csv << "\n";
            return 0;
        }
        if (ablate->parsed()) {
            const std::string csv = lpdp::ablate_axis(
                lpdp::ExperimentConfig::from_file(config_path), axis, overrides);
            std::cout << "wrote " << csv << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
