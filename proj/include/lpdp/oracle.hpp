#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "lpdp/sequence.hpp"

namespace lpdp {

// Frozen scalar reward oracle R: sequences -> reals. Deterministic and
// defined for every valid sequence (a task misconfiguration may still make
// an oracle throw, e.g. a splice window that does not fit).
class RewardOracle {
  public:
    virtual ~RewardOracle() = default;
    virtual double reward(const Sequence& x) const = 0;
};

struct CacheStats {
    std::uint64_t misses = 0;
    std::uint64_t hits = 0;
};

// Memoizing wrapper with miss/hit accounting. miss_count equals the number
// of distinct sequences evaluated since construction or the last reset.
// Thread-safe: evaluations are serialized, so concurrent first evaluations
// of the same sequence record exactly one miss.
class CachedOracle {
  public:
    explicit CachedOracle(std::shared_ptr<const RewardOracle> inner);

    double reward(const Sequence& x) const;
    CacheStats stats() const;
    void reset();

    const RewardOracle& inner() const { return *inner_; }

  private:
    std::shared_ptr<const RewardOracle> inner_;
    mutable std::mutex mu_;
    mutable std::unordered_map<std::string, double> cache_;
    mutable CacheStats stats_;
};

// R(f(x,a)) - R(x), both evaluations routed through the cache.
double delta_reward(const CachedOracle& oracle, const Sequence& x, const EditAction& a);

// Counts (possibly overlapping) occurrences of a fixed pattern.
class SubstringCountOracle final : public RewardOracle {
  public:
    explicit SubstringCountOracle(std::string pattern);
    double reward(const Sequence& x) const override;

  private:
    std::string pattern_;
};

// Position-probability matrix over ACGT. Entries are floored at kProbFloor
// and rows renormalized at construction so log-space scores stay finite.
class Pwm {
  public:
    static constexpr double kProbFloor = 1e-3;

    explicit Pwm(std::vector<std::array<double, 4>> rows);
    static Pwm from_file(const std::string& path);

    std::size_t width() const { return log_rows_.size(); }
    double log_prob(std::size_t row, Nucleotide n) const;
    // sum over rows of the per-row max log-probability
    double consensus_log_prob() const { return consensus_log_prob_; }
    // log-probability of the window of x starting at `start`
    double window_log_prob(const Sequence& x, std::size_t start) const;

  private:
    std::vector<std::array<double, 4>> log_rows_;
    double consensus_log_prob_ = 0.0;
};

// Motif-match reward. best-window: exp(best window log-probability minus the
// consensus log-probability), in (0, 1], or 0 when no window fits.
// sum-windows: the same consensus-rescaled window score summed over all
// window placements.
class PwmOracle final : public RewardOracle {
  public:
    enum class Mode { BestWindow, SumWindows };

    PwmOracle(Pwm pwm, Mode mode);
    double reward(const Sequence& x) const override;

  private:
    Pwm pwm_;
    Mode mode_;
};

// Toy splice reward: sqrt(D(x) * A(x)) where D and A are PWM window
// probabilities at the two intended junctions. The donor window is anchored
// from the left end (it starts at donor_index); the acceptor window is
// anchored from the right end (it ends acceptor_offset bases before the end
// of the sequence), so both junctions stay put as the middle changes length.
class SpliceToyOracle final : public RewardOracle {
  public:
    SpliceToyOracle(Pwm donor, Pwm acceptor, std::size_t donor_index,
                    std::size_t acceptor_offset);

    double reward(const Sequence& x) const override;
    double donor_prob(const Sequence& x) const;
    double acceptor_prob(const Sequence& x) const;
    // literal "GT" at the donor junction
    bool donor_has_gt(const Sequence& x) const;

    std::size_t donor_index() const { return donor_index_; }
    std::size_t acceptor_offset() const { return acceptor_offset_; }

  private:
    void check_windows(const Sequence& x) const;

    Pwm donor_;
    Pwm acceptor_;
    std::size_t donor_index_;
    std::size_t acceptor_offset_;
};

}  // namespace lpdp
