#include "lpdp/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

#include "lpdp/numeric.hpp"

namespace lpdp {

namespace {

StepRecord make_step(int t, bool guided, const EditAction& a, double log_p0) {
    StepRecord sr;
    sr.step = t;
    sr.guided = guided;
    sr.action = a;
    sr.log_p0 = log_p0;
    return sr;
}

std::size_t kind_index(EditKind k) { return static_cast<std::size_t>(k); }

// top-k support of the proposal by probability, ties canonical
std::vector<std::size_t> top_support(const ActionDistribution& dist, int k) {
    std::vector<std::size_t> idx(dist.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (dist.probs[a] != dist.probs[b]) return dist.probs[a] > dist.probs[b];
        return dist.actions[a] < dist.actions[b];
    });
    if (std::cmp_greater(idx.size(), k)) idx.resize(static_cast<std::size_t>(k));
    return idx;
}

}  // namespace

TrajectoryRecord raw_rollout(const Sequence& x0, int total_steps, const ProposalModel& model,
                             const ActionSpace& space, std::uint64_t seed) {
    validate_sequence(x0, space);
    TrajectoryRecord rec;
    rec.initial = x0;
    Rng rng(seed);
    Sequence x = x0;
    for (int t = 0; t < total_steps; ++t) {
        const ActionDistribution dist = normalized_proposal(model, x, t, space);
        const std::size_t i = rng.categorical(dist.probs);
        rec.steps.push_back(make_step(t, false, dist.actions[i], dist.log_probs[i]));
        x = apply_edit(x, dist.actions[i]);
    }
    rec.final_seq = x;
    return rec;
}

std::vector<BeamEntry> beam_step(const std::vector<BeamEntry>& frontier, int step, int width,
                                 double beta, const ProposalModel& model,
                                 const CachedOracle& oracle, const ActionSpace& space) {
    if (frontier.empty()) throw std::invalid_argument("beam_step: empty frontier");
    if (width < 1) throw std::invalid_argument("beam_step: width must be >= 1");

    std::vector<BeamEntry> expanded;
    for (const BeamEntry& e : frontier) {
        const ActionDistribution dist = normalized_proposal(model, e.seq, step, space);
        const double r_parent = oracle.reward(e.seq);
        for (std::size_t i = 0; i < dist.size(); ++i) {
            const Sequence child = apply_edit(e.seq, dist.actions[i]);
            const double q = dist.log_probs[i] + beta * (oracle.reward(child) - r_parent);
            BeamEntry next;
            next.seq = child;
            next.score = e.score + q;
            next.first_edit = e.first_edit ? e.first_edit : std::optional<EditAction>(dist.actions[i]);
            expanded.push_back(std::move(next));
        }
    }
    std::sort(expanded.begin(), expanded.end(), [](const BeamEntry& a, const BeamEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.seq != b.seq) return a.seq < b.seq;
        return *a.first_edit < *b.first_edit;
    });
    // merge identical sequences keeping the best-scoring entry
    std::vector<BeamEntry> merged;
    for (BeamEntry& e : expanded) {
        const bool seen = std::any_of(merged.begin(), merged.end(),
                                      [&](const BeamEntry& m) { return m.seq == e.seq; });
        if (!seen) merged.push_back(std::move(e));
        if (std::cmp_greater_equal(merged.size(), width)) break;
    }
    return merged;
}

EditAction beam_choose(const Sequence& x, int step, const BeamConfig& cfg, double beta,
                       const ProposalModel& model, const CachedOracle& oracle,
                       const ActionSpace& space) {
    if (cfg.depth < 1) throw std::invalid_argument("beam: depth must be >= 1");
    std::vector<BeamEntry> frontier{BeamEntry{x, 0.0, std::nullopt}};
    for (int d = 0; d < cfg.depth; ++d) {
        frontier = beam_step(frontier, step, cfg.width, beta, model, oracle, space);
    }
    return *frontier.front().first_edit;
}

TrajectoryRecord beam_rollout(const Sequence& x0, int total_steps,
                              const std::vector<bool>& guided_mask, const ProposalModel& model,
                              const CachedOracle& oracle, const BeamConfig& cfg, double beta,
                              const ActionSpace& space, std::uint64_t seed) {
    validate_sequence(x0, space);
    const CacheStats before = oracle.stats();
    TrajectoryRecord rec;
    rec.initial = x0;
    Rng rng(seed);
    Sequence x = x0;
    for (int t = 0; t < total_steps; ++t) {
        const ActionDistribution dist = normalized_proposal(model, x, t, space);
        StepRecord sr;
        if (guided_mask[static_cast<std::size_t>(t)]) {
            const EditAction a = beam_choose(x, t, cfg, beta, model, oracle, space);
            sr = make_step(t, true, a, dist.log_probs[dist.index_of(a)]);
            x = apply_edit(x, a);
            sr.reward_after = oracle.reward(x);
            sr.has_reward = true;
        } else {
            const std::size_t i = rng.categorical(dist.probs);
            sr = make_step(t, false, dist.actions[i], dist.log_probs[i]);
            x = apply_edit(x, dist.actions[i]);
        }
        rec.steps.push_back(sr);
    }
    rec.final_seq = x;
    const CacheStats after = oracle.stats();
    rec.oracle_misses = after.misses - before.misses;
    rec.oracle_hits = after.hits - before.hits;
    return rec;
}

namespace {

struct CemTrajectory {
    std::vector<StepRecord> steps;
    Sequence final_seq;
    double reward = 0.0;
};

CemTrajectory cem_sample(const Sequence& x0, int total_steps, const std::vector<bool>& mask,
                         const ProposalModel& model, const CachedOracle& oracle,
                         const std::map<int, std::array<double, 3>>& offsets,
                         const ActionSpace& space, Rng& rng) {
    CemTrajectory traj;
    Sequence x = x0;
    for (int t = 0; t < total_steps; ++t) {
        const ActionDistribution dist = normalized_proposal(model, x, t, space);
        std::size_t i = 0;
        if (mask[static_cast<std::size_t>(t)]) {
            const auto it = offsets.find(t);
            std::vector<double> w(dist.size());
            for (std::size_t j = 0; j < dist.size(); ++j) {
                const double off =
                    it == offsets.end() ? 0.0 : it->second[kind_index(dist.actions[j].kind)];
                w[j] = std::exp(dist.log_probs[j] + off);
            }
            i = rng.categorical(w);
            traj.steps.push_back(make_step(t, true, dist.actions[i], dist.log_probs[i]));
        } else {
            i = rng.categorical(dist.probs);
            traj.steps.push_back(make_step(t, false, dist.actions[i], dist.log_probs[i]));
        }
        x = apply_edit(x, dist.actions[i]);
    }
    traj.final_seq = x;
    traj.reward = oracle.reward(x);
    return traj;
}

bool same_edits(const CemTrajectory& a, const CemTrajectory& b) {
    if (a.steps.size() != b.steps.size()) return false;
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        if (a.steps[i].action != b.steps[i].action) return false;
    }
    return true;
}

}  // namespace

TrajectoryRecord cem_rollout(const Sequence& x0, int total_steps,
                             const std::vector<bool>& guided_mask, const ProposalModel& model,
                             const CachedOracle& oracle, const CemConfig& cfg,
                             const ActionSpace& space, std::uint64_t seed, CemDiag* diag) {
    validate_sequence(x0, space);
    if (cfg.population < 1 || cfg.elites < 1 || cfg.elites > cfg.population || cfg.rounds < 0) {
        throw std::invalid_argument("cem: need 1 <= elites <= population and rounds >= 0");
    }
    const CacheStats before = oracle.stats();

    std::map<int, std::array<double, 3>> offsets;
    CemTrajectory best;
    bool have_best = false;

    for (int round = 0; round <= cfg.rounds; ++round) {
        std::vector<CemTrajectory> pop;
        pop.reserve(static_cast<std::size_t>(cfg.population));
        for (int j = 0; j < cfg.population; ++j) {
            Rng rng(mix_seed(seed, static_cast<std::uint64_t>(round) * 0x10000ULL +
                                       static_cast<std::uint64_t>(j)));
            pop.push_back(
                cem_sample(x0, total_steps, guided_mask, model, oracle, offsets, space, rng));
            if (!have_best || pop.back().reward > best.reward) {
                best = pop.back();
                have_best = true;
            }
        }
        if (round == cfg.rounds) break;

        // elites: top-E by reward, earlier sample wins ties
        std::vector<std::size_t> order(pop.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return pop[a].reward > pop[b].reward;
        });
        order.resize(static_cast<std::size_t>(cfg.elites));

        bool degenerate = true;
        for (std::size_t i = 1; i < order.size(); ++i) {
            if (!same_edits(pop[order[0]], pop[order[i]])) {
                degenerate = false;
                break;
            }
        }
        if (degenerate) continue;  // nothing to refit toward

        // smoothed MLE of elite edit kinds per guided step, as log-offsets
        // relative to a uniform kind profile
        for (int t = 0; t < total_steps; ++t) {
            if (!guided_mask[static_cast<std::size_t>(t)]) continue;
            std::array<double, 3> counts{0.0, 0.0, 0.0};
            double total = 0.0;
            for (std::size_t e : order) {
                counts[kind_index(pop[e].steps[static_cast<std::size_t>(t)].action.kind)] += 1.0;
                total += 1.0;
            }
            std::array<double, 3> theta{};
            for (std::size_t k = 0; k < 3; ++k) {
                const double freq = (counts[k] + 0.5) / (total + 1.5);
                theta[k] = std::log(3.0 * freq);
            }
            offsets[t] = theta;
        }
        if (diag) ++diag->refits;
    }
    if (diag) diag->offsets = offsets;

    TrajectoryRecord rec;
    rec.initial = x0;
    rec.steps = std::move(best.steps);
    rec.final_seq = std::move(best.final_seq);
    const CacheStats after = oracle.stats();
    rec.oracle_misses = after.misses - before.misses;
    rec.oracle_hits = after.hits - before.hits;
    return rec;
}

double effective_sample_size(std::span<const double> weights) {
    double sum = 0.0, sum_sq = 0.0;
    for (double w : weights) {
        sum += w;
        sum_sq += w * w;
    }
    if (sum_sq <= 0.0) return 0.0;
    return sum * sum / sum_sq;
}

namespace {

struct Particle {
    Sequence seq;
    double log_weight = 0.0;
    std::vector<StepRecord> steps;
};

std::vector<double> normalized_weights(const std::vector<Particle>& particles) {
    std::vector<double> logs;
    logs.reserve(particles.size());
    for (const Particle& p : particles) logs.push_back(p.log_weight);
    const double norm = log_sum_exp(logs);
    std::vector<double> w(particles.size());
    if (!std::isfinite(norm)) {
        // all-zero weights: fall back to uniform
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(particles.size()));
        return w;
    }
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(logs[i] - norm);
    return w;
}

}  // namespace

TrajectoryRecord smc_rollout(const Sequence& x0, int total_steps,
                             const std::vector<bool>& guided_mask, const ProposalModel& model,
                             const CachedOracle& oracle, const SmcConfig& cfg, double beta,
                             const ActionSpace& space, std::uint64_t seed, SmcDiag* diag) {
    validate_sequence(x0, space);
    if (cfg.particles < 1 || cfg.depth < 1 || cfg.proposal_top_k < 1) {
        throw std::invalid_argument("smc: particles, depth and proposal_top_k must be >= 1");
    }
    const CacheStats before = oracle.stats();
    Rng rng(seed);

    std::vector<Particle> particles(static_cast<std::size_t>(cfg.particles));
    for (Particle& p : particles) p.seq = x0;

    int guided_seen = 0;
    for (int t = 0; t < total_steps; ++t) {
        const bool guided = guided_mask[static_cast<std::size_t>(t)];
        for (Particle& p : particles) {
            const ActionDistribution dist = normalized_proposal(model, p.seq, t, space);
            std::size_t pick = 0;
            if (guided) {
                const std::vector<std::size_t> support = top_support(dist, cfg.proposal_top_k);
                std::vector<double> probs;
                probs.reserve(support.size());
                for (std::size_t j : support) probs.push_back(dist.probs[j]);
                pick = support[rng.categorical(probs)];
                const double r_old = oracle.reward(p.seq);
                const Sequence child = apply_edit(p.seq, dist.actions[pick]);
                p.log_weight += beta * (oracle.reward(child) - r_old);
                p.steps.push_back(make_step(t, true, dist.actions[pick], dist.log_probs[pick]));
                p.steps.back().reward_after = oracle.reward(child);
                p.steps.back().has_reward = true;
                p.seq = child;
            } else {
                pick = rng.categorical(dist.probs);
                p.steps.push_back(make_step(t, false, dist.actions[pick], dist.log_probs[pick]));
                p.seq = apply_edit(p.seq, dist.actions[pick]);
            }
        }
        if (guided && ++guided_seen % cfg.depth == 0 && cfg.particles > 1) {
            const std::vector<double> w = normalized_weights(particles);
            if (effective_sample_size(w) < static_cast<double>(cfg.particles) / 2.0) {
                if (diag) ++diag->resample_events;
                // systematic resampling
                std::vector<double> cum(w.size());
                double acc = 0.0;
                for (std::size_t i = 0; i < w.size(); ++i) {
                    acc += w[i];
                    cum[i] = acc;
                }
                const double u0 = rng.uniform() / static_cast<double>(cfg.particles);
                std::vector<Particle> next;
                next.reserve(particles.size());
                std::size_t j = 0;
                for (int i = 0; i < cfg.particles; ++i) {
                    const double u =
                        u0 + static_cast<double>(i) / static_cast<double>(cfg.particles);
                    while (j + 1 < cum.size() && cum[j] < u) ++j;
                    next.push_back(particles[j]);
                    next.back().log_weight = 0.0;
                }
                particles = std::move(next);
            }
        }
    }

    // highest-reward final particle, earliest index on ties
    std::size_t best = 0;
    double best_reward = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < particles.size(); ++i) {
        const double r = oracle.reward(particles[i].seq);
        if (r > best_reward) {
            best_reward = r;
            best = i;
        }
    }

    TrajectoryRecord rec;
    rec.initial = x0;
    rec.steps = std::move(particles[best].steps);
    rec.final_seq = std::move(particles[best].seq);
    const CacheStats after = oracle.stats();
    rec.oracle_misses = after.misses - before.misses;
    rec.oracle_hits = after.hits - before.hits;
    return rec;
}

TrajectoryRecord tds_rollout(const Sequence& x0, int total_steps,
                             const std::vector<bool>& guided_mask, const ProposalModel& model,
                             const CachedOracle& oracle, const TdsConfig& cfg, double beta,
                             const ActionSpace& space, std::uint64_t seed) {
    validate_sequence(x0, space);
    if (cfg.support_top_k < 1) throw std::invalid_argument("tds: support_top_k must be >= 1");
    if (cfg.temperature < 0.0) throw std::invalid_argument("tds: temperature must be >= 0");
    const CacheStats before = oracle.stats();

    TrajectoryRecord rec;
    rec.initial = x0;
    Rng rng(seed);
    Sequence x = x0;
    for (int t = 0; t < total_steps; ++t) {
        const ActionDistribution dist = normalized_proposal(model, x, t, space);
        StepRecord sr;
        if (guided_mask[static_cast<std::size_t>(t)]) {
            const std::vector<std::size_t> support = top_support(dist, cfg.support_top_k);
            const double r_x = oracle.reward(x);
            std::vector<double> scores;
            scores.reserve(support.size());
            for (std::size_t j : support) {
                const double dr = oracle.reward(apply_edit(x, dist.actions[j])) - r_x;
                scores.push_back(dist.log_probs[j] + beta * dr);
            }
            std::size_t pick_in_support = 0;
            double log_pi = 0.0;  // log-prob of the chosen action under the twisted dist
            if (cfg.temperature == 0.0) {
                for (std::size_t j = 1; j < support.size(); ++j) {
                    if (scores[j] > scores[pick_in_support] ||
                        (scores[j] == scores[pick_in_support] &&
                         dist.actions[support[j]] < dist.actions[support[pick_in_support]])) {
                        pick_in_support = j;
                    }
                }
            } else {
                std::vector<double> logits(scores.size());
                for (std::size_t j = 0; j < scores.size(); ++j) {
                    logits[j] = scores[j] / cfg.temperature;
                }
                const double norm = log_sum_exp(logits);
                std::vector<double> probs(logits.size());
                for (std::size_t j = 0; j < logits.size(); ++j) {
                    probs[j] = std::exp(logits[j] - norm);
                }
                pick_in_support = rng.categorical(probs);
                log_pi = logits[pick_in_support] - norm;
            }
            const std::size_t pick = support[pick_in_support];
            sr = make_step(t, true, dist.actions[pick], dist.log_probs[pick]);
            rec.importance_log_weights.push_back(dist.log_probs[pick] - log_pi);
            x = apply_edit(x, dist.actions[pick]);
            sr.reward_after = oracle.reward(x);
            sr.has_reward = true;
        } else {
            const std::size_t i = rng.categorical(dist.probs);
            sr = make_step(t, false, dist.actions[i], dist.log_probs[i]);
            x = apply_edit(x, dist.actions[i]);
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
