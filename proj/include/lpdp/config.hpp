#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lpdp/baselines.hpp"
#include "lpdp/guidance.hpp"
#include "lpdp/oracle.hpp"
#include "lpdp/proposal.hpp"
#include "lpdp/rng.hpp"
#include "lpdp/window.hpp"

#include "json.hpp"

namespace lpdp {

struct ModelConfig {
    std::string name = "uniform";  // uniform | drift
    DriftParams drift{};
};

struct OracleConfig {
    std::string name;  // substring_count | pwm | splice_toy

    std::string pattern = "GT";  // substring_count

    std::vector<std::array<double, 4>> matrix;  // pwm, inline
    std::string file;                           // pwm, from file
    std::string mode = "best-window";           // best-window | sum-windows

    std::vector<std::array<double, 4>> donor_matrix, acceptor_matrix;  // splice_toy
    std::string donor_file, acceptor_file;
    std::size_t donor_index = 0;
    std::size_t acceptor_index = 0;  // acceptor window ends this far before the end
};

struct InitConfig {
    std::string kind = "random";  // literal | random | inpaint
    std::string sequence;         // literal
    std::size_t length = 32;      // random
    std::string left, middle, right;  // inpaint (literal middle...)
    std::size_t middle_length = 0;    // ...or random middle of this length
};

struct TaskConfig {
    ModelConfig model;
    OracleConfig oracle;
    LengthBounds bounds{};
    InitConfig init;
};

struct MethodConfig {
    std::string name;
    std::string type;  // lpdp | raw | beam | cem | smc | tds
    GuidanceConfig guidance{};
    double beta = 20.0;  // tilt used by beam/smc/tds
    BeamConfig beam{};
    CemConfig cem{};
    SmcConfig smc{};
    TdsConfig tds{};
    std::optional<WindowSpec> window;  // per-method override of run.window
};

struct RunConfig {
    int samples = 16;
    int total_steps = 256;
    WindowSpec window = WindowSpec::parse("first:16");
    std::uint64_t seed = 1;
    std::string cache_mode = "per_sample";  // per_sample | shared
    std::string out_dir = "out";
    int workers = 1;
};

struct ExperimentConfig {
    TaskConfig task;
    std::vector<MethodConfig> methods;
    RunConfig run;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
    nlohmann::json to_json() const;
};

std::shared_ptr<const ProposalModel> make_model(const ModelConfig& cfg);
std::shared_ptr<const RewardOracle> make_oracle(const OracleConfig& cfg);

// Model, oracle and action space assembled from a task block. The frozen
// prefix/suffix of the action space come from the inpaint init.
struct TaskContext {
    std::shared_ptr<const ProposalModel> model;
    std::shared_ptr<const RewardOracle> oracle;
    ActionSpace space{};
    InitConfig init;
};

TaskContext build_task(const TaskConfig& cfg);

// Per-sample initial sequence (random kinds consume the rng).
Sequence make_initial_sequence(const InitConfig& init, const ActionSpace& space, Rng& rng);

}  // namespace lpdp
