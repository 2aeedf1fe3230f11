#include "lpdp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lpdp {

namespace {

GuidanceConfig with_rule(GuidanceConfig cfg, CandidateRule rule) {
    cfg.rule = rule;
    return cfg;
}

}  // namespace

double cand_ratio(const LocalInstance& inst, CandidateRule rule, const GuidanceConfig& cfg,
                  const ProposalModel& model, const ActionSpace& space) {
    const auto mixed = candidate_set(inst.state, inst.prev, CandidateRule::Mixed, cfg.k_loc,
                                     cfg.radius, model, inst.step, space);
    if (mixed.empty()) throw std::invalid_argument("cand_ratio: empty mixed candidate set");
    const auto typed =
        candidate_set(inst.state, inst.prev, rule, cfg.k_loc, cfg.radius, model, inst.step, space);
    return static_cast<double>(typed.size()) / static_cast<double>(mixed.size());
}

double path_ratio(const LocalInstance& inst, CandidateRule rule, const GuidanceConfig& cfg,
                  const ProposalModel& model, const CachedOracle& oracle,
                  const ActionSpace& space) {
    const int h = cfg.horizon - 1;
    const auto mixed = enumerate_paths(inst.state, inst.prev, h, CandidateRule::Mixed, cfg, model,
                                       oracle, inst.step, space);
    if (mixed.empty()) throw std::invalid_argument("path_ratio: no mixed paths");
    const auto typed =
        enumerate_paths(inst.state, inst.prev, h, rule, cfg, model, oracle, inst.step, space);
    return static_cast<double>(typed.size()) / static_cast<double>(mixed.size());
}

namespace {

EditAction resolve_argmax(const RootInstance& inst, CandidateRule rule, BackupKind backup,
                          const GuidanceConfig& cfg, const ProposalModel& model,
                          const CachedOracle& oracle, const ActionSpace& space) {
    GuidanceConfig c = with_rule(cfg, rule);
    c.backup = backup;
    return lpdp_step(inst.state, inst.step, model, oracle, c, space).chosen;
}

}  // namespace

double top1_agreement(std::span<const RootInstance> instances, CandidateRule rule,
                      BackupKind backup, const GuidanceConfig& cfg, const ProposalModel& model,
                      const CachedOracle& oracle, const ActionSpace& space) {
    if (instances.empty()) throw std::invalid_argument("top1_agreement: no instances");
    std::size_t agree = 0;
    for (const RootInstance& inst : instances) {
        const EditAction a_rule = resolve_argmax(inst, rule, backup, cfg, model, oracle, space);
        const EditAction a_mixed =
            resolve_argmax(inst, CandidateRule::Mixed, backup, cfg, model, oracle, space);
        if (a_rule == a_mixed) ++agree;
    }
    return static_cast<double>(agree) / static_cast<double>(instances.size());
}

double mixed_rank_tail(std::span<const LocalInstance> instances, CandidateRule rule,
                       const GuidanceConfig& cfg, const ProposalModel& model,
                       const ActionSpace& space) {
    std::size_t retained = 0;
    std::size_t beyond = 0;
    for (const LocalInstance& inst : instances) {
        const auto ranked =
            ranked_neighborhood(inst.state, inst.prev, cfg.radius, model, inst.step, space);
        const auto cands = candidate_set(inst.state, inst.prev, rule, cfg.k_loc, cfg.radius, model,
                                         inst.step, space);
        for (const EditAction& b : cands) {
            const auto it = std::find(ranked.begin(), ranked.end(), b);
            if (it == ranked.end()) {
                throw std::logic_error("mixed_rank_tail: candidate missing from neighborhood");
            }
            const std::size_t rank = static_cast<std::size_t>(it - ranked.begin()) + 1;
            ++retained;
            if (rank > static_cast<std::size_t>(cfg.k_loc)) ++beyond;
        }
    }
    if (retained == 0) throw std::invalid_argument("mixed_rank_tail: no retained candidates");
    return static_cast<double>(beyond) / static_cast<double>(retained);
}

std::optional<double> mass_efficiency(const LocalInstance& inst, CandidateRule rule,
                                      const GuidanceConfig& cfg, const ProposalModel& model,
                                      const CachedOracle& oracle, const ActionSpace& space) {
    const int h = cfg.horizon - 1;
    const auto mixed = enumerate_paths(inst.state, inst.prev, h, CandidateRule::Mixed, cfg, model,
                                       oracle, inst.step, space);
    const auto typed =
        enumerate_paths(inst.state, inst.prev, h, rule, cfg, model, oracle, inst.step, space);
    if (typed.empty() || mixed.empty()) return std::nullopt;

    const double log_z_mixed = partition_value(mixed, cfg.tau) / cfg.tau;
    const double log_z_typed = partition_value(typed, cfg.tau) / cfg.tau;
    const double mass_frac = std::exp(log_z_typed - log_z_mixed);
    const double count_frac =
        static_cast<double>(typed.size()) / static_cast<double>(mixed.size());
    return mass_frac / count_frac;
}

RuleDiagnostics aggregate_diagnostics(CandidateRule rule,
                                      std::span<const LocalInstance> local_instances,
                                      std::span<const RootInstance> root_instances,
                                      const GuidanceConfig& cfg, const ProposalModel& model,
                                      const CachedOracle& oracle, const ActionSpace& space) {
    RuleDiagnostics out;
    out.rule = rule;
    out.local_instances = local_instances.size();
    out.root_instances = root_instances.size();

    double cand_sum = 0.0, path_sum = 0.0, mass_sum = 0.0;
    std::size_t mass_n = 0;
    for (const LocalInstance& inst : local_instances) {
        cand_sum += cand_ratio(inst, rule, cfg, model, space);
        path_sum += path_ratio(inst, rule, cfg, model, oracle, space);
        if (const auto me = mass_efficiency(inst, rule, cfg, model, oracle, space)) {
            mass_sum += *me;
            ++mass_n;
        }
    }
    if (!local_instances.empty()) {
        const double n = static_cast<double>(local_instances.size());
        out.cand_ratio = cand_sum / n;
        out.path_ratio = path_sum / n;
        out.mixed_rank_tail = mixed_rank_tail(local_instances, rule, cfg, model, space);
    }
    if (mass_n > 0) out.mass_eff = mass_sum / static_cast<double>(mass_n);
    if (!root_instances.empty()) {
        out.top1_agreement_max = top1_agreement(root_instances, rule, BackupKind::Max, cfg, model,
                                                oracle, space);
        out.top1_agreement_lse = top1_agreement(root_instances, rule, BackupKind::Lse, cfg, model,
                                                oracle, space);
    }
    return out;
}

}  // namespace lpdp
