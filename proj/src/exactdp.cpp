#include "lpdp/exactdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "lpdp/numeric.hpp"

namespace lpdp {

namespace {

struct PathEnumerator {
    const GuidanceConfig& cfg;
    CandidateRule rule;
    const ProposalModel& model;
    const CachedOracle& oracle;
    const ActionSpace& space;
    std::uint64_t guard;

    std::vector<LocalPath> done;
    std::vector<EditAction> edits;
    std::vector<Sequence> states;
    double running_score = 0.0;

    void expand(const Sequence& z, const EditAction& prev, int h, int step) {
        if (h == 0) {
            if (done.size() >= guard) {
                throw std::runtime_error("enumerate_paths: path count exceeds guard of " +
                                         std::to_string(guard));
            }
            LocalPath p;
            p.edits = edits;
            p.states = states;
            p.score = running_score;
            done.push_back(std::move(p));
            return;
        }
        const std::vector<EditAction> cands =
            candidate_set(z, prev, rule, cfg.k_loc, cfg.radius, model, step, space);
        if (cands.empty()) {
            // terminal node: the (possibly shorter) path still counts once
            if (done.size() >= guard) {
                throw std::runtime_error("enumerate_paths: path count exceeds guard of " +
                                         std::to_string(guard));
            }
            LocalPath p;
            p.edits = edits;
            p.states = states;
            p.score = running_score;
            done.push_back(std::move(p));
            return;
        }
        const ActionDistribution dist = normalized_proposal(model, z, step, space);
        const double r_z = oracle.reward(z);
        const int next_step = cfg.advance_local_time ? step + 1 : step;
        for (const EditAction& b : cands) {
            const Sequence child = apply_edit(z, b);
            const double q =
                dist.log_probs[dist.index_of(b)] + cfg.beta * (oracle.reward(child) - r_z);
            edits.push_back(b);
            states.push_back(child);
            running_score += q;
            expand(child, b, h - 1, next_step);
            running_score -= q;
            states.pop_back();
            edits.pop_back();
        }
    }
};

}  // namespace

std::vector<LocalPath> enumerate_paths(const Sequence& z, const EditAction& prev, int h,
                                       CandidateRule rule, const GuidanceConfig& cfg,
                                       const ProposalModel& model, const CachedOracle& oracle,
                                       int step, const ActionSpace& space, std::uint64_t guard) {
    if (h < 0) throw std::invalid_argument("enumerate_paths: negative horizon");
    // Per-node branching is bounded by the local cap, by the radius window
    // (at most 2r+1 sites, up to 8 actions per site), and by the action count
    // of the longest reachable sequence. predicted = branching^h.
    const double len_bound =
        8.0 * static_cast<double>(std::min<std::uint64_t>(
                  space.bounds.max_len, static_cast<std::uint64_t>(z.length()) +
                                            static_cast<std::uint64_t>(h))) +
        4.0;
    const double radius_bound = 8.0 * (2.0 * static_cast<double>(cfg.radius) + 1.0) + 8.0;
    const double branching =
        std::min({static_cast<double>(cfg.k_loc), radius_bound, len_bound});
    double predicted = 1.0;
    for (int i = 0; i < h && predicted <= static_cast<double>(guard); ++i) {
        predicted *= branching;
    }
    if (predicted > static_cast<double>(guard)) {
        throw std::runtime_error("enumerate_paths: predicted path count " +
                                 std::to_string(predicted) + " exceeds guard of " +
                                 std::to_string(guard));
    }

    PathEnumerator en{cfg, rule, model, oracle, space, guard, {}, {}, {}, 0.0};
    en.states.push_back(z);
    en.expand(z, prev, h, step);

    // pull the root state out so states[0] is the path's own start
    std::vector<LocalPath> out = std::move(en.done);
    std::sort(out.begin(), out.end(),
              [](const LocalPath& a, const LocalPath& b) { return a.edits < b.edits; });
    return out;
}

double partition_value(std::span<const LocalPath> paths, double tau) {
    if (paths.empty()) return 0.0;
    if (!(tau > 0.0)) throw std::invalid_argument("partition_value: tau must be > 0");
    std::vector<double> scores;
    scores.reserve(paths.size());
    for (const LocalPath& p : paths) scores.push_back(p.score);
    return log_sum_exp_tempered(scores, tau);
}

double max_path_value(std::span<const LocalPath> paths) {
    if (paths.empty()) return 0.0;
    double best = paths.front().score;
    for (const LocalPath& p : paths) best = std::max(best, p.score);
    return best;
}

namespace {

class FullDp {
  public:
    FullDp(int step, double beta, const ProposalModel& model, const CachedOracle& oracle,
           const ActionSpace& space, std::uint64_t guard)
        : step_(step), beta_(beta), model_(model), oracle_(oracle), space_(space), guard_(guard) {}

    double value(const Sequence& z, int h) {
        if (h <= 0) return 0.0;
        const auto key = std::make_pair(h, z.str());
        const auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        if (++expanded_ > guard_) {
            throw std::runtime_error("full_graph_dp: expanded state count exceeds guard of " +
                                     std::to_string(guard_));
        }
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& [a, q] : action_scores(z)) {
            best = std::max(best, q + value(apply_edit(z, a), h - 1));
        }
        memo_.emplace(key, best);
        return best;
    }

    std::vector<std::pair<EditAction, double>> action_scores(const Sequence& z) {
        const ActionDistribution dist = normalized_proposal(model_, z, step_, space_);
        const double r_z = oracle_.reward(z);
        std::vector<std::pair<EditAction, double>> out;
        out.reserve(dist.size());
        for (std::size_t i = 0; i < dist.size(); ++i) {
            const double q =
                dist.log_probs[i] + beta_ * (oracle_.reward(apply_edit(z, dist.actions[i])) - r_z);
            out.emplace_back(dist.actions[i], q);
        }
        return out;
    }

  private:
    int step_;
    double beta_;
    const ProposalModel& model_;
    const CachedOracle& oracle_;
    const ActionSpace& space_;
    std::uint64_t guard_;
    std::uint64_t expanded_ = 0;
    std::map<std::pair<int, std::string>, double> memo_;
};

}  // namespace

DpResult full_graph_dp(const Sequence& x, int step, int horizon, double beta,
                       const ProposalModel& model, const CachedOracle& oracle,
                       const ActionSpace& space, std::uint64_t guard) {
    if (horizon < 1) throw std::invalid_argument("full_graph_dp: horizon must be >= 1");
    FullDp dp(step, beta, model, oracle, space, guard);

    DpResult best;
    bool have = false;
    for (const auto& [a, q] : dp.action_scores(x)) {
        const double total = q + dp.value(apply_edit(x, a), horizon - 1);
        if (!have || total > best.total || (total == best.total && a < best.first)) {
            best.total = total;
            best.first = a;
            have = true;
        }
    }
    if (!have) throw std::runtime_error("full_graph_dp: no valid actions at root");
    return best;
}

}  // namespace lpdp
