#include "lpdp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lpdp {

void KmerDistribution::add(const Sequence& x) {
    const std::string& s = x.str();
    const std::size_t kk = static_cast<std::size_t>(k);
    if (s.size() < kk) return;
    for (std::size_t i = 0; i + kk <= s.size(); ++i) {
        ++counts[s.substr(i, kk)];
        ++total;
    }
}

KmerDistribution KmerDistribution::from_sequences(int k, std::span<const Sequence> xs) {
    if (k < 1) throw std::invalid_argument("kmer distribution: k must be >= 1");
    KmerDistribution d;
    d.k = k;
    for (const Sequence& x : xs) d.add(x);
    return d;
}

double jsd(const KmerDistribution& p, const KmerDistribution& q) {
    if (p.k != q.k) throw std::invalid_argument("jsd: k mismatch");
    if (p.total == 0 || q.total == 0) throw std::invalid_argument("jsd: empty distribution");

    auto prob = [](const KmerDistribution& d, const std::string& key) {
        const auto it = d.counts.find(key);
        return it == d.counts.end()
                   ? 0.0
                   : static_cast<double>(it->second) / static_cast<double>(d.total);
    };

    // walk the union of supports exactly once
    std::map<std::string, bool> support;
    for (const auto& [key, cnt] : p.counts) support.emplace(key, true);
    for (const auto& [key, cnt] : q.counts) support.emplace(key, true);

    double kl_pm = 0.0, kl_qm = 0.0;
    for (const auto& [key, unused] : support) {
        (void)unused;
        const double pi = prob(p, key);
        const double qi = prob(q, key);
        const double mi = 0.5 * (pi + qi);
        if (pi > 0.0) kl_pm += pi * std::log(pi / mi);
        if (qi > 0.0) kl_qm += qi * std::log(qi / mi);
    }
    return 0.5 * kl_pm + 0.5 * kl_qm;
}

double base_traj_ll(const TrajectoryRecord& rec) {
    if (rec.steps.empty()) throw std::invalid_argument("base_traj_ll: empty trajectory");
    double sum = 0.0;
    for (const StepRecord& sr : rec.steps) sum += sr.log_p0;
    return sum / static_cast<double>(rec.steps.size());
}

SpliceSummary splice_metrics(std::span<const Sequence> samples, const SpliceToyOracle& oracle) {
    if (samples.empty()) throw std::invalid_argument("splice_metrics: no samples");
    SpliceSummary out;
    for (const Sequence& x : samples) {
        const double d = oracle.donor_prob(x);
        const double a = oracle.acceptor_prob(x);
        out.geomean += std::sqrt(d * a);
        out.minimum += std::min(d, a);
        out.gt_rate += oracle.donor_has_gt(x) ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(samples.size());
    out.geomean /= n;
    out.minimum /= n;
    out.gt_rate /= n;
    return out;
}

double calls_per_sample(std::span<const TrajectoryRecord> records) {
    if (records.empty()) throw std::invalid_argument("calls_per_sample: no records");
    double sum = 0.0;
    for (const TrajectoryRecord& r : records) {
        sum += static_cast<double>(r.oracle_misses);
    }
    return sum / static_cast<double>(records.size());
}

}  // namespace lpdp
