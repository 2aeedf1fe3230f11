#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpdp/oracle.hpp"
#include "lpdp/proposal.hpp"
#include "lpdp/sequence.hpp"

namespace lpdp {

enum class CandidateRule { Mixed, StAfter, StFirst };
enum class BackupKind { Max, Lse };

std::string_view to_string(CandidateRule r);
std::string_view to_string(BackupKind b);
CandidateRule candidate_rule_from_string(std::string_view s);
BackupKind backup_kind_from_string(std::string_view s);

// All scalar knobs of the guided re-solving step.
struct GuidanceConfig {
    double beta = 20.0;    // reward scale
    double delta = 2.0;    // root band width (may be +inf)
    int k_root = 16;       // root cap
    long radius = 1;       // site-local radius
    int k_loc = 8;         // local candidate cap
    int horizon = 2;       // total lookahead horizon H (H=1: pure one-step)
    double lambda = 0.5;   // future-correction damping
    double tau = 1.0;      // soft backup temperature
    double gamma = 1.0;    // local discount
    CandidateRule rule = CandidateRule::Mixed;
    BackupKind backup = BackupKind::Max;
    // When set, continuation edits at internal depth i are ranked and scored
    // with the proposal at step t+i instead of the root step t.
    bool advance_local_time = false;
};

void validate_config(const GuidanceConfig& cfg);

// A root edit with its one-step tilted score and, once the lookahead has
// run, the local continuation value and final re-solving score.
struct ScoredAction {
    EditAction action{};
    double log_p0 = 0.0;
    double delta_r = 0.0;
    double q = 0.0;  // log_p0 + beta * delta_r
    std::optional<double> v_local;
    std::optional<double> s_lpdp;  // q + lambda * v_local
};

// One-step tilted scores for every valid root edit, in canonical order.
std::vector<ScoredAction> root_scores(const Sequence& x, int step, const ProposalModel& model,
                                      const CachedOracle& oracle, const GuidanceConfig& cfg,
                                      const ActionSpace& space);

double max_q(const std::vector<ScoredAction>& scored);

// Keep q >= max q - delta, then the top k_root by q. Ties break by canonical
// action order; the result is sorted by (q desc, canonical asc).
std::vector<ScoredAction> root_band(std::vector<ScoredAction> scored, double delta, int k_root);

// Valid actions of z whose site is within `radius` of the anchor site of the
// edit that produced z.
std::vector<EditAction> local_neighborhood(const Sequence& z, const EditAction& prev, long radius,
                                           const ActionSpace& space);

// Neighborhood sorted by proposal rate descending (equivalently by p0), ties
// broken canonically. Shared by candidate selection and the rank diagnostics.
std::vector<EditAction> ranked_neighborhood(const Sequence& z, const EditAction& prev, long radius,
                                            const ProposalModel& model, int step,
                                            const ActionSpace& space);

// Stage-3 candidate rules. Mixed: local top-K by p0 across all edit types.
// StAfter: same-type members of the mixed shortlist, falling back to the
// full shortlist when none share the previous edit's type. StFirst: top-K by
// p0 within the same-type neighborhood, falling back to the mixed rule when
// the typed neighborhood is empty.
std::vector<EditAction> candidate_set(const Sequence& z, const EditAction& prev,
                                      CandidateRule rule, int k_loc, long radius,
                                      const ProposalModel& model, int step,
                                      const ActionSpace& space);

// Bounded local lookahead value below (y, prev). h=0 is terminal (value 0);
// otherwise the Max backup follows the best continuation and the LSE backup
// aggregates soft mass at temperature tau. An empty candidate set at any
// node is treated as terminal.
double backup_value(const Sequence& y, const EditAction& prev, int h, const GuidanceConfig& cfg,
                    const ProposalModel& model, const CachedOracle& oracle, int step,
                    const ActionSpace& space);

struct StepDecision {
    EditAction chosen{};
    std::vector<ScoredAction> band;  // with v_local / s_lpdp filled in
};

// One guided re-solving step: score all roots, keep the band, back up each
// retained root's local graph, and pick the root with the best final score.
StepDecision lpdp_step(const Sequence& x, int step, const ProposalModel& model,
                       const CachedOracle& oracle, const GuidanceConfig& cfg,
                       const ActionSpace& space);

struct StepRecord {
    int step = 0;
    bool guided = false;
    EditAction action{};
    double log_p0 = 0.0;  // base-model log-probability of the applied edit
    double reward_after = 0.0;
    bool has_reward = false;  // set only on guided steps (reward is cached there)
};

struct TrajectoryRecord {
    Sequence initial;
    Sequence final_seq;
    std::vector<StepRecord> steps;
    std::uint64_t oracle_misses = 0;  // misses incurred by this rollout
    std::uint64_t oracle_hits = 0;
    std::vector<double> importance_log_weights;  // twisted-sampler diagnostics
};

// Rollout of total_steps one-edit transitions; steps flagged in guided_mask
// use lpdp_step, the rest sample from the base proposal.
TrajectoryRecord guided_rollout(const Sequence& x0, int total_steps,
                                const std::vector<bool>& guided_mask, const ProposalModel& model,
                                const CachedOracle& oracle, const GuidanceConfig& cfg,
                                const ActionSpace& space, std::uint64_t seed);

}  // namespace lpdp
