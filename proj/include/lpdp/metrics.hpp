#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "lpdp/guidance.hpp"
#include "lpdp/oracle.hpp"

namespace lpdp {

// Pooled k-mer counts over a sample set, using overlapping windows.
struct KmerDistribution {
    int k = 3;
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;

    void add(const Sequence& x);
    static KmerDistribution from_sequences(int k, std::span<const Sequence> xs);
};

// Jensen-Shannon divergence between the normalized count distributions, in
// nats (so the value lies in [0, ln 2]). Zero-count cells contribute nothing
// to their own KL term. Throws if either distribution is empty.
double jsd(const KmerDistribution& p, const KmerDistribution& q);

// Mean over steps of the recorded base-model log-probabilities.
double base_traj_ll(const TrajectoryRecord& rec);

struct SpliceSummary {
    double geomean = 0.0;  // mean over samples of sqrt(D * A)
    double minimum = 0.0;  // mean over samples of min(D, A)
    double gt_rate = 0.0;  // fraction with the literal GT donor dinucleotide
};

SpliceSummary splice_metrics(std::span<const Sequence> samples, const SpliceToyOracle& oracle);

// Mean oracle misses per trajectory record.
double calls_per_sample(std::span<const TrajectoryRecord> records);

}  // namespace lpdp
