#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "lpdp/guidance.hpp"

namespace lpdp {

// Reference inference-time allocators sharing the frozen proposal model and
// the cached oracle. At unguided steps every method samples the base
// proposal; the methods differ only in what they do inside the guided
// window.

struct BeamConfig {
    int width = 8;
    int depth = 2;
};

struct CemConfig {
    int population = 64;
    int elites = 8;
    int rounds = 2;  // number of refits; rounds+1 populations are sampled
};

struct SmcConfig {
    int particles = 64;
    int depth = 2;  // guided steps between resampling checks
    int proposal_top_k = 32;
};

struct TdsConfig {
    double temperature = 1.0;
    int support_top_k = 8;
};

// Pure base-proposal rollout; touches no oracle, so calls/sample is 0.
TrajectoryRecord raw_rollout(const Sequence& x0, int total_steps, const ProposalModel& model,
                             const ActionSpace& space, std::uint64_t seed);

struct BeamEntry {
    Sequence seq;
    double score = 0.0;  // cumulative tilted score from the step's start state
    std::optional<EditAction> first_edit;
};

// Expand every frontier entry over its full action set with the tilted
// one-step score, merge duplicate sequences keeping the best score, and keep
// the top `width`. The result is sorted best-first (score desc, then
// sequence, then first edit).
std::vector<BeamEntry> beam_step(const std::vector<BeamEntry>& frontier, int step, int width,
                                 double beta, const ProposalModel& model,
                                 const CachedOracle& oracle, const ActionSpace& space);

// Depth-D beam expansion from x; returns the first edit of the best path.
EditAction beam_choose(const Sequence& x, int step, const BeamConfig& cfg, double beta,
                       const ProposalModel& model, const CachedOracle& oracle,
                       const ActionSpace& space);

TrajectoryRecord beam_rollout(const Sequence& x0, int total_steps,
                              const std::vector<bool>& guided_mask, const ProposalModel& model,
                              const CachedOracle& oracle, const BeamConfig& cfg, double beta,
                              const ActionSpace& space, std::uint64_t seed);

struct CemDiag {
    // per-guided-step (sub, ins, del) log offsets after the last refit
    std::map<int, std::array<double, 3>> offsets;
    int refits = 0;
};

// Cross-entropy search over rollouts: repeatedly sample a population of
// trajectories from a kind-tilted proposal at guided steps, score final
// rewards, and refit the per-guided-step edit-kind offsets to the elites by
// (smoothed) maximum likelihood. Returns the best trajectory seen. A
// degenerate elite set (all identical edit lists) leaves offsets unchanged.
TrajectoryRecord cem_rollout(const Sequence& x0, int total_steps,
                             const std::vector<bool>& guided_mask, const ProposalModel& model,
                             const CachedOracle& oracle, const CemConfig& cfg,
                             const ActionSpace& space, std::uint64_t seed,
                             CemDiag* diag = nullptr);

struct SmcDiag {
    int resample_events = 0;
};

// (sum w)^2 / sum w^2 for nonnegative weights.
double effective_sample_size(std::span<const double> weights);

// Particle filter: at guided steps particles sample the base proposal
// restricted to its top-M actions and multiply weights by exp(beta * dR);
// every `depth` guided steps, systematic resampling fires when the effective
// sample size drops below P/2. Returns the best-reward final particle.
TrajectoryRecord smc_rollout(const Sequence& x0, int total_steps,
                             const std::vector<bool>& guided_mask, const ProposalModel& model,
                             const CachedOracle& oracle, const SmcConfig& cfg, double beta,
                             const ActionSpace& space, std::uint64_t seed,
                             SmcDiag* diag = nullptr);

// Twisted sampler: at guided steps, sample from the softmax of the tilted
// one-step scores over the top-K base-proposal support at the configured
// temperature (temperature 0 selects the argmax). Per-step importance
// log-weights (base vs twisted) are recorded for diagnostics.
TrajectoryRecord tds_rollout(const Sequence& x0, int total_steps,
                             const std::vector<bool>& guided_mask, const ProposalModel& model,
                             const CachedOracle& oracle, const TdsConfig& cfg, double beta,
                             const ActionSpace& space, std::uint64_t seed);

}  // namespace lpdp
