#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lpdp/config.hpp"
#include "lpdp/metrics.hpp"

namespace lpdp {

struct SampleOutput {
    int index = 0;
    std::uint64_t seed = 0;
    TrajectoryRecord record;
    double reward = 0.0;  // final-sequence reward (reporting evaluation)
    double traj_ll = 0.0;
};

struct MethodOutput {
    MethodConfig method;
    std::vector<SampleOutput> samples;
    double reward_mean = 0.0;
    double reward_median = 0.0;
    double reward_stderr = 0.0;
    double traj_ll_mean = 0.0;
    double jsd3 = 0.0;
    double calls = 0.0;  // mean misses per sample
    std::optional<SpliceSummary> splice;
};

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> workers;
};

struct RunOutput {
    std::vector<MethodOutput> methods;
    std::string out_dir;
};

// Execute one method block over run.samples seeded samples. Per-sample
// caches are fresh by default; in shared mode one cache serves the whole
// method run and samples execute sequentially so byte-identical reruns are
// preserved.
MethodOutput run_method(const TaskContext& ctx, const MethodConfig& method, const RunConfig& run,
                        const KmerDistribution& reference);

// Reference 3-mer distribution from base-proposal rollouts on the task
// (dedicated seed stream, independent of any method).
KmerDistribution reference_kmers(const TaskContext& ctx, const RunConfig& run, int k = 3);

// Full experiment: every method block, JSONL per method, summary.csv and a
// run manifest under run.out_dir.
RunOutput run_experiment(const ExperimentConfig& cfg, const RunOverrides& overrides = {});

// Appendix-style sweeps over one axis of the first lpdp method block.
// axis: horizon | lambda | window_pos | window_len. Writes one CSV.
std::string ablate_axis(const ExperimentConfig& cfg, const std::string& axis,
                        const RunOverrides& overrides = {});

// Replay a run directory (manifest + JSONL) and emit the same-type
// diagnostics CSV. Returns the CSV path.
std::string diagnose_run(const std::string& run_dir, std::size_t max_root_instances = 64,
                         std::size_t max_local_instances = 256);

}  // namespace lpdp
