#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lpdp/exactdp.hpp"
#include "lpdp/guidance.hpp"

namespace lpdp {

// Diagnostics comparing typed candidate rules against the mixed reference,
// evaluated on recorded guided-rollout states.

// A child-level diagnostic instance: a local state, the edit that produced
// it, and the rollout step it was visited at.
struct LocalInstance {
    Sequence state;
    EditAction prev{};
    int step = 0;
};

// A root-level diagnostic instance (state before the guided edit).
struct RootInstance {
    Sequence state;
    int step = 0;
};

// |C_rule| / |C_mixed| at one instance.
double cand_ratio(const LocalInstance& inst, CandidateRule rule, const GuidanceConfig& cfg,
                  const ProposalModel& model, const ActionSpace& space);

// enumerated local path-count ratio at horizon cfg.horizon - 1
double path_ratio(const LocalInstance& inst, CandidateRule rule, const GuidanceConfig& cfg,
                  const ProposalModel& model, const CachedOracle& oracle,
                  const ActionSpace& space);

// fraction of instances where the rule's re-solving argmax equals the mixed
// argmax, for the given backup
double top1_agreement(std::span<const RootInstance> instances, CandidateRule rule,
                      BackupKind backup, const GuidanceConfig& cfg, const ProposalModel& model,
                      const CachedOracle& oracle, const ActionSpace& space);

// 1-indexed rank of each retained candidate under the mixed base-prior
// ordering of the neighborhood; the tail is the fraction with rank > k_loc.
double mixed_rank_tail(std::span<const LocalInstance> instances, CandidateRule rule,
                       const GuidanceConfig& cfg, const ProposalModel& model,
                       const ActionSpace& space);

// (Z_rule / Z_mixed) / (|T_rule| / |T_mixed|) at gamma = 1. For st_after the
// typed path set is a subset of the mixed one; for st_first this is only a
// relative soft-value diagnostic. Absent when the rule admits no paths.
std::optional<double> mass_efficiency(const LocalInstance& inst, CandidateRule rule,
                                      const GuidanceConfig& cfg, const ProposalModel& model,
                                      const CachedOracle& oracle, const ActionSpace& space);

struct RuleDiagnostics {
    CandidateRule rule = CandidateRule::Mixed;
    double cand_ratio = 0.0;
    double path_ratio = 0.0;
    double top1_agreement_max = 0.0;
    double top1_agreement_lse = 0.0;
    double mixed_rank_tail = 0.0;
    std::optional<double> mass_eff;
    std::size_t local_instances = 0;
    std::size_t root_instances = 0;
};

// Mean diagnostics for one rule over instance sets.
RuleDiagnostics aggregate_diagnostics(CandidateRule rule,
                                      std::span<const LocalInstance> local_instances,
                                      std::span<const RootInstance> root_instances,
                                      const GuidanceConfig& cfg, const ProposalModel& model,
                                      const CachedOracle& oracle, const ActionSpace& space);

}  // namespace lpdp
