#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lpdp/guidance.hpp"

namespace lpdp {

// One exhaustively enumerated local continuation path of length h.
// states has h+1 entries, states[i+1] = apply_edit(states[i], edits[i]),
// and score is the sum of the per-edge tilted scores.
struct LocalPath {
    std::vector<EditAction> edits;
    std::vector<Sequence> states;
    double score = 0.0;
};

inline constexpr std::uint64_t kDefaultPathGuard = 1'000'000;

// Exhaustive, duplicate-free enumeration of all length-h local edit paths
// below (z, prev) under the given candidate rule. Throws when the predicted
// or realized path count exceeds the guard; an oracle never truncates.
// Output is ordered lexicographically by edit list (canonical action order).
std::vector<LocalPath> enumerate_paths(const Sequence& z, const EditAction& prev, int h,
                                       CandidateRule rule, const GuidanceConfig& cfg,
                                       const ProposalModel& model, const CachedOracle& oracle,
                                       int step, const ActionSpace& space,
                                       std::uint64_t guard = kDefaultPathGuard);

// tau * log sum exp(score / tau) over paths; empty input is the terminal
// convention and yields 0.
double partition_value(std::span<const LocalPath> paths, double tau);

// max path score; empty input yields 0.
double max_path_value(std::span<const LocalPath> paths);

struct DpResult {
    double total = 0.0;
    EditAction first{};
};

inline constexpr std::uint64_t kDefaultDpGuard = 1'000'000;

// Finite-horizon dynamic programming over the full, unrestricted edit graph:
// V_0 = 0 and V_h(z) = max over all valid a of q(z, a) + V_{h-1}(f(z, a)),
// with the proposal evaluated at the fixed step index. Returns the best
// depth-H total and the canonical argmax first edit. Throws when the number
// of expanded states exceeds the guard.
DpResult full_graph_dp(const Sequence& x, int step, int horizon, double beta,
                       const ProposalModel& model, const CachedOracle& oracle,
                       const ActionSpace& space, std::uint64_t guard = kDefaultDpGuard);

}  // namespace lpdp
