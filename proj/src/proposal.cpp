#include "lpdp/proposal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lpdp/numeric.hpp"

namespace lpdp {

DriftProposal::DriftProposal(DriftParams p) : params_(p) {
    if (params_.target_length == 0) {
        throw std::invalid_argument("drift model: target_length must be positive");
    }
    if (params_.gain < 0.0) {
        throw std::invalid_argument("drift model: gain must be nonnegative");
    }
}

double DriftProposal::rate(const Sequence& x, const EditAction& a, int /*step*/) const {
    double w = 0.0;
    double sign = 0.0;
    switch (a.kind) {
        case EditKind::Sub: w = params_.w_sub; sign = 0.0; break;
        case EditKind::Ins: w = params_.w_ins; sign = 1.0; break;
        case EditKind::Del: w = params_.w_del; sign = -1.0; break;
    }
    const double target = static_cast<double>(params_.target_length);
    const double drift = params_.gain * sign * (target - static_cast<double>(x.length())) / target;
    return std::exp(w + drift);
}

std::size_t ActionDistribution::index_of(const EditAction& a) const {
    const auto it = std::lower_bound(actions.begin(), actions.end(), a);
    if (it == actions.end() || *it != a) {
        throw std::invalid_argument("action " + to_string(a) + " not in valid action set");
    }
    return static_cast<std::size_t>(it - actions.begin());
}

ActionDistribution normalized_proposal(const ProposalModel& model, const Sequence& x, int step,
                                       const ActionSpace& space) {
    ActionDistribution dist;
    dist.actions = enumerate_actions(x, space);
    if (dist.actions.empty()) {
        throw std::invalid_argument("normalized_proposal: empty action set");
    }
    std::vector<double> log_rates;
    log_rates.reserve(dist.actions.size());
    for (const EditAction& a : dist.actions) {
        const double r = model.rate(x, a, step);
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw std::invalid_argument("proposal model returned non-positive rate for " +
                                        to_string(a));
        }
        log_rates.push_back(std::log(r));
    }
    const double norm = log_sum_exp(log_rates);
    dist.log_probs.reserve(log_rates.size());
    dist.probs.reserve(log_rates.size());
    for (double lr : log_rates) {
        const double lp = lr - norm;
        dist.log_probs.push_back(lp);
        dist.probs.push_back(std::exp(lp));
    }
    return dist;
}

double log_p0(const ProposalModel& model, const Sequence& x, const EditAction& a, int step,
              const ActionSpace& space) {
    const ActionDistribution dist = normalized_proposal(model, x, step, space);
    return dist.log_probs[dist.index_of(a)];
}

EditAction sample_action(const ProposalModel& model, const Sequence& x, int step,
                         const ActionSpace& space, Rng& rng) {
    const ActionDistribution dist = normalized_proposal(model, x, step, space);
    return dist.actions[rng.categorical(dist.probs)];
}

}  // namespace lpdp
