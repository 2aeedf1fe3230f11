#pragma once

#include <functional>
#include <memory>
#include <string>
#include <unordered_map>

#include "lpdp/oracle.hpp"
#include "lpdp/proposal.hpp"

namespace lpdp::test {

// Proposal model with arbitrary caller-supplied rates.
class CallbackModel final : public ProposalModel {
  public:
    using Fn = std::function<double(const Sequence&, const EditAction&, int)>;
    explicit CallbackModel(Fn fn) : fn_(std::move(fn)) {}
    double rate(const Sequence& x, const EditAction& a, int step) const override {
        return fn_(x, a, step);
    }
    std::string name() const override { return "callback"; }

  private:
    Fn fn_;
};

// Reward oracle backed by an explicit table; unlisted sequences score fallback.
class MapOracle final : public RewardOracle {
  public:
    explicit MapOracle(std::unordered_map<std::string, double> table, double fallback = 0.0)
        : table_(std::move(table)), fallback_(fallback) {}
    double reward(const Sequence& x) const override {
        const auto it = table_.find(x.str());
        return it == table_.end() ? fallback_ : it->second;
    }

  private:
    std::unordered_map<std::string, double> table_;
    double fallback_;
};

class ZeroOracle final : public RewardOracle {
  public:
    double reward(const Sequence&) const override { return 0.0; }
};

}  // namespace lpdp::test
