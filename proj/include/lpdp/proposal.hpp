#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lpdp/rng.hpp"
#include "lpdp/sequence.hpp"

namespace lpdp {

// Base edit-proposal model: positive transition rate for every valid edit.
// Rates are consumed only through the normalized one-edit proposal below.
class ProposalModel {
  public:
    virtual ~ProposalModel() = default;
    virtual double rate(const Sequence& x, const EditAction& a, int step) const = 0;
    virtual std::string name() const = 0;
};

class UniformProposal final : public ProposalModel {
  public:
    double rate(const Sequence&, const EditAction&, int) const override { return 1.0; }
    std::string name() const override { return "uniform"; }
};

struct DriftParams {
    double w_sub = 0.0;
    double w_ins = 0.0;
    double w_del = 0.0;
    std::size_t target_length = 32;
    double gain = 0.0;  // >= 0
};

// rate(s,e,v | x,t) = exp(w_e + gain * sign(e) * (target - |x|) / target)
// with sign(ins) = +1, sign(del) = -1, sign(sub) = 0. Below target length the
// insertion mass grows and deletion mass shrinks, and vice versa above it.
class DriftProposal final : public ProposalModel {
  public:
    explicit DriftProposal(DriftParams p);
    double rate(const Sequence& x, const EditAction& a, int step) const override;
    std::string name() const override { return "drift"; }
    const DriftParams& params() const { return params_; }

  private:
    DriftParams params_;
};

// Normalized proposal over the full valid action set of x, aligned with the
// canonical enumerate_actions order. probs sum to 1 up to rounding;
// log_probs are computed with a max-shifted normalizer so they stay finite
// whenever the underlying rate is positive.
struct ActionDistribution {
    std::vector<EditAction> actions;
    std::vector<double> probs;
    std::vector<double> log_probs;

    std::size_t size() const { return actions.size(); }
    // index of a within actions (canonical order); throws if absent
    std::size_t index_of(const EditAction& a) const;
};

ActionDistribution normalized_proposal(const ProposalModel& model, const Sequence& x, int step,
                                       const ActionSpace& space);

double log_p0(const ProposalModel& model, const Sequence& x, const EditAction& a, int step,
              const ActionSpace& space);

EditAction sample_action(const ProposalModel& model, const Sequence& x, int step,
                         const ActionSpace& space, Rng& rng);

}  // namespace lpdp
