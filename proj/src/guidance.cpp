#include "lpdp/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <utility>

#include "lpdp/numeric.hpp"

namespace lpdp {

std::string_view to_string(CandidateRule r) {
    switch (r) {
        case CandidateRule::Mixed: return "mixed";
        case CandidateRule::StAfter: return "st_after";
        case CandidateRule::StFirst: return "st_first";
    }
    throw std::invalid_argument("invalid candidate rule value");
}

std::string_view to_string(BackupKind b) {
    switch (b) {
        case BackupKind::Max: return "max";
        case BackupKind::Lse: return "lse";
    }
    throw std::invalid_argument("invalid backup kind value");
}

CandidateRule candidate_rule_from_string(std::string_view s) {
    if (s == "mixed") return CandidateRule::Mixed;
    if (s == "st_after") return CandidateRule::StAfter;
    if (s == "st_first") return CandidateRule::StFirst;
    throw std::invalid_argument("unknown candidate rule '" + std::string(s) +
                                "' (expected mixed|st_after|st_first)");
}

BackupKind backup_kind_from_string(std::string_view s) {
    if (s == "max") return BackupKind::Max;
    if (s == "lse") return BackupKind::Lse;
    throw std::invalid_argument("unknown backup kind '" + std::string(s) +
                                "' (expected max|lse)");
}

void validate_config(const GuidanceConfig& cfg) {
    if (!(cfg.beta > 0.0)) throw std::invalid_argument("guidance: beta must be > 0");
    if (cfg.delta < 0.0) throw std::invalid_argument("guidance: delta must be >= 0");
    if (cfg.k_root < 1) throw std::invalid_argument("guidance: k_root must be >= 1");
    if (cfg.radius < 0) throw std::invalid_argument("guidance: radius must be >= 0");
    if (cfg.k_loc < 1) throw std::invalid_argument("guidance: k_loc must be >= 1");
    if (cfg.horizon < 1) throw std::invalid_argument("guidance: horizon must be >= 1");
    if (cfg.lambda < 0.0) throw std::invalid_argument("guidance: lambda must be >= 0");
    if (!(cfg.tau > 0.0)) throw std::invalid_argument("guidance: tau must be > 0");
    if (cfg.gamma < 0.0 || cfg.gamma > 1.0) {
        throw std::invalid_argument("guidance: gamma must be in [0, 1]");
    }
}

std::vector<ScoredAction> root_scores(const Sequence& x, int step, const ProposalModel& model,
                                      const CachedOracle& oracle, const GuidanceConfig& cfg,
                                      const ActionSpace& space) {
    const ActionDistribution dist = normalized_proposal(model, x, step, space);
    const double r_x = oracle.reward(x);
    std::vector<ScoredAction> out;
    out.reserve(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        ScoredAction sa;
        sa.action = dist.actions[i];
        sa.log_p0 = dist.log_probs[i];
        sa.delta_r = oracle.reward(apply_edit(x, sa.action)) - r_x;
        sa.q = sa.log_p0 + cfg.beta * sa.delta_r;
        out.push_back(sa);
    }
    return out;
}

double max_q(const std::vector<ScoredAction>& scored) {
    if (scored.empty()) throw std::invalid_argument("max_q: no scored actions");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& sa : scored) best = std::max(best, sa.q);
    return best;
}

std::vector<ScoredAction> root_band(std::vector<ScoredAction> scored, double delta, int k_root) {
    if (scored.empty()) throw std::invalid_argument("root_band: no scored actions");
    const double q_star = max_q(scored);
    std::erase_if(scored, [&](const ScoredAction& sa) { return sa.q < q_star - delta; });
    std::sort(scored.begin(), scored.end(), [](const ScoredAction& a, const ScoredAction& b) {
        if (a.q != b.q) return a.q > b.q;
        return a.action < b.action;
    });
    if (std::cmp_greater(scored.size(), k_root)) {
        scored.resize(static_cast<std::size_t>(k_root));
    }
    return scored;
}

std::vector<EditAction> local_neighborhood(const Sequence& z, const EditAction& prev, long radius,
                                           const ActionSpace& space) {
    const long anchor = static_cast<long>(anchor_site(prev, z));
    std::vector<EditAction> out;
    for (const EditAction& a : enumerate_actions(z, space)) {
        const long s = static_cast<long>(a.site);
        if (std::labs(s - anchor) <= radius) out.push_back(a);
    }
    return out;
}

std::vector<EditAction> ranked_neighborhood(const Sequence& z, const EditAction& prev, long radius,
                                            const ProposalModel& model, int step,
                                            const ActionSpace& space) {
    std::vector<EditAction> hood = local_neighborhood(z, prev, radius, space);
    // rate ordering equals p0 ordering (shared normalizer)
    std::vector<std::pair<double, EditAction>> rated;
    rated.reserve(hood.size());
    for (const EditAction& a : hood) {
        rated.emplace_back(model.rate(z, a, step), a);
    }
    std::sort(rated.begin(), rated.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<EditAction> out;
    out.reserve(rated.size());
    for (const auto& [r, a] : rated) out.push_back(a);
    return out;
}

namespace {

std::vector<EditAction> take_top(const std::vector<EditAction>& ranked, int k) {
    const std::size_t n = std::min(ranked.size(), static_cast<std::size_t>(std::max(k, 0)));
    return {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace

std::vector<EditAction> candidate_set(const Sequence& z, const EditAction& prev,
                                      CandidateRule rule, int k_loc, long radius,
                                      const ProposalModel& model, int step,
                                      const ActionSpace& space) {
    const std::vector<EditAction> ranked = ranked_neighborhood(z, prev, radius, model, step, space);
    if (ranked.empty()) return {};
    const std::vector<EditAction> mixed = take_top(ranked, k_loc);

    switch (rule) {
        case CandidateRule::Mixed:
            return mixed;
        case CandidateRule::StAfter: {
            std::vector<EditAction> typed;
            for (const EditAction& a : mixed) {
                if (a.kind == prev.kind) typed.push_back(a);
            }
            return typed.empty() ? mixed : typed;
        }
        case CandidateRule::StFirst: {
            std::vector<EditAction> typed;
            for (const EditAction& a : ranked) {
                if (a.kind == prev.kind) typed.push_back(a);
            }
            if (typed.empty()) return mixed;
            return take_top(typed, k_loc);
        }
    }
    throw std::invalid_argument("invalid candidate rule value");
}

double backup_value(const Sequence& y, const EditAction& prev, int h, const GuidanceConfig& cfg,
                    const ProposalModel& model, const CachedOracle& oracle, int step,
                    const ActionSpace& space) {
    if (h <= 0) return 0.0;
    const std::vector<EditAction> cands =
        candidate_set(y, prev, cfg.rule, cfg.k_loc, cfg.radius, model, step, space);
    if (cands.empty()) return 0.0;

    const ActionDistribution dist = normalized_proposal(model, y, step, space);
    const double r_y = oracle.reward(y);
    const int next_step = cfg.advance_local_time ? step + 1 : step;

    std::vector<double> values;
    values.reserve(cands.size());
    for (const EditAction& b : cands) {
        const Sequence child = apply_edit(y, b);
        const double q = dist.log_probs[dist.index_of(b)] +
                         cfg.beta * (oracle.reward(child) - r_y);
        const double v_child = backup_value(child, b, h - 1, cfg, model, oracle, next_step, space);
        values.push_back(q + cfg.gamma * v_child);
    }
    if (cfg.backup == BackupKind::Max) {
        return *std::max_element(values.begin(), values.end());
    }
    return log_sum_exp_tempered(values, cfg.tau);
}

StepDecision lpdp_step(const Sequence& x, int step, const ProposalModel& model,
                       const CachedOracle& oracle, const GuidanceConfig& cfg,
                       const ActionSpace& space) {
    validate_config(cfg);
    std::vector<ScoredAction> scored = root_scores(x, step, model, oracle, cfg, space);
    StepDecision dec;
    dec.band = root_band(std::move(scored), cfg.delta, cfg.k_root);

    const bool lookahead = cfg.horizon > 1 && cfg.lambda != 0.0;
    const int child_step = cfg.advance_local_time ? step + 1 : step;
    for (ScoredAction& sa : dec.band) {
        double v = 0.0;
        if (lookahead) {
            v = backup_value(apply_edit(x, sa.action), sa.action, cfg.horizon - 1, cfg, model,
                             oracle, child_step, space);
        }
        sa.v_local = v;
        sa.s_lpdp = sa.q + cfg.lambda * v;
    }

    const ScoredAction* best = &dec.band.front();
    for (const ScoredAction& sa : dec.band) {
        if (*sa.s_lpdp > *best->s_lpdp ||
            (*sa.s_lpdp == *best->s_lpdp && sa.action < best->action)) {
            best = &sa;
        }
    }
    dec.chosen = best->action;
    return dec;
}

TrajectoryRecord guided_rollout(const Sequence& x0, int total_steps,
                                const std::vector<bool>& guided_mask, const ProposalModel& model,
                                const CachedOracle& oracle, const GuidanceConfig& cfg,
                                const ActionSpace& space, std::uint64_t seed) {
    validate_sequence(x0, space);
    if (std::cmp_less(guided_mask.size(), total_steps)) {
        throw std::invalid_argument("guided_rollout: mask shorter than total_steps");
    }
    const CacheStats before = oracle.stats();

    TrajectoryRecord rec;
    rec.initial = x0;
    rec.steps.reserve(static_cast<std::size_t>(total_steps));
    Rng rng(seed);
    Sequence x = x0;
    for (int t = 0; t < total_steps; ++t) {
        StepRecord sr;
        sr.step = t;
        if (guided_mask[static_cast<std::size_t>(t)]) {
            const StepDecision dec = lpdp_step(x, t, model, oracle, cfg, space);
            sr.guided = true;
            sr.action = dec.chosen;
            for (const ScoredAction& sa : dec.band) {
                if (sa.action == dec.chosen) {
                    sr.log_p0 = sa.log_p0;
                    break;
                }
            }
            x = apply_edit(x, sr.action);
            sr.reward_after = oracle.reward(x);  // cached from root scoring
            sr.has_reward = true;
        } else {
            const ActionDistribution dist = normalized_proposal(model, x, t, space);
            const std::size_t i = rng.categorical(dist.probs);
            sr.action = dist.actions[i];
            sr.log_p0 = dist.log_probs[i];
            x = apply_edit(x, sr.action);
        }
        rec.steps.push_back(sr);
    }
    rec.final_seq = x;

    const CacheStats after = oracle.stats();
    rec.oracle_misses = after.misses - before.misses;
    rec.oracle_hits = after.hits - before.hits;
    return rec;
}

}  // namespace lpdp
