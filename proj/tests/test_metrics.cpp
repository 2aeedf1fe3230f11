#include "doctest.h"

#include <cmath>

#include "lpdp/baselines.hpp"
#include "lpdp/metrics.hpp"
#include "test_support.hpp"

using namespace lpdp;

namespace {

// independent JSD evaluation from raw count maps, written the long way
double jsd_reference(const std::map<std::string, std::uint64_t>& pc, std::uint64_t pt,
                     const std::map<std::string, std::uint64_t>& qc, std::uint64_t qt) {
    std::map<std::string, std::pair<double, double>> cells;
    for (const auto& [k, c] : pc) cells[k].first = static_cast<double>(c) / static_cast<double>(pt);
    for (const auto& [k, c] : qc) {
        cells[k].second = static_cast<double>(c) / static_cast<double>(qt);
    }
    double out = 0.0;
    for (const auto& [k, pq] : cells) {
        const double m = 0.5 * (pq.first + pq.second);
        if (pq.first > 0) out += 0.5 * pq.first * std::log(pq.first / m);
        if (pq.second > 0) out += 0.5 * pq.second * std::log(pq.second / m);
    }
    return out;
}

KmerDistribution from_counts(int k, std::map<std::string, std::uint64_t> counts) {
    KmerDistribution d;
    d.k = k;
    d.counts = std::move(counts);
    d.total = 0;
    for (const auto& [key, c] : d.counts) d.total += c;
    return d;
}

}  // namespace

TEST_CASE("kmer counting uses overlapping windows pooled over samples") {
    const std::vector<Sequence> xs{Sequence("ACGTA"), Sequence("AC")};
    const auto d = KmerDistribution::from_sequences(3, xs);
    CHECK(d.total == 3);  // ACG, CGT, GTA; "AC" is too short
    CHECK(d.counts.at("ACG") == 1);
    CHECK(d.counts.at("CGT") == 1);
    CHECK(d.counts.at("GTA") == 1);
}

TEST_CASE("jsd of identical distributions is zero") {
    const auto d = KmerDistribution::from_sequences(
        3, std::vector<Sequence>{Sequence("ACGTACGT"), Sequence("GGGTTT")});
    CHECK(jsd(d, d) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("jsd of disjoint supports is ln 2") {
    const auto p = from_counts(3, {{"AAA", 5}, {"CCC", 3}});
    const auto q = from_counts(3, {{"GGG", 2}, {"TTT", 6}});
    CHECK(jsd(p, q) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("jsd matches an independent evaluation, symmetric and bounded") {
    Rng rng(15);
    for (int trial = 0; trial < 60; ++trial) {
        std::map<std::string, std::uint64_t> pc, qc;
        const char* keys[] = {"AAA", "AAC", "ACA", "CCA", "GGT", "TTT"};
        for (const char* k : keys) {
            if (rng.next() % 3 != 0) pc[k] = 1 + rng.next() % 9;
            if (rng.next() % 3 != 0) qc[k] = 1 + rng.next() % 9;
        }
        if (pc.empty()) pc["AAA"] = 1;
        if (qc.empty()) qc["TTT"] = 1;
        const auto p = from_counts(3, pc);
        const auto q = from_counts(3, qc);
        const double v = jsd(p, q);
        CHECK(v == doctest::Approx(jsd_reference(pc, p.total, qc, q.total)).epsilon(1e-12));
        CHECK(v == doctest::Approx(jsd(q, p)).epsilon(1e-12));
        CHECK(v >= 0.0);
        CHECK(v <= std::log(2.0) + 1e-12);
    }
}

TEST_CASE("jsd rejects mismatched or empty inputs") {
    const auto p = from_counts(3, {{"AAA", 1}});
    const auto q2 = from_counts(2, {{"AA", 1}});
    CHECK_THROWS(jsd(p, q2));
    KmerDistribution empty;
    empty.k = 3;
    CHECK_THROWS(jsd(p, empty));
}

TEST_CASE("base trajectory log-likelihood of a uniform rollout") {
    UniformProposal model;
    const ActionSpace space{LengthBounds{1, 12}};
    const Sequence x0("ACGT");
    const auto rec = raw_rollout(x0, 20, model, space, 3);
    // under the uniform model each step's log p0 is -log |A(x_t)|
    double expect = 0.0;
    Sequence x = x0;
    for (const StepRecord& sr : rec.steps) {
        expect += -std::log(static_cast<double>(enumerate_actions(x, space).size()));
        x = apply_edit(x, sr.action);
    }
    expect /= static_cast<double>(rec.steps.size());
    CHECK(base_traj_ll(rec) == doctest::Approx(expect).epsilon(1e-12));

    TrajectoryRecord empty;
    CHECK_THROWS(base_traj_ll(empty));
}

TEST_CASE("splice metrics aggregate donor/acceptor scores") {
    Pwm donor({{0.1, 0.1, 0.7, 0.1}});
    Pwm acceptor({{0.25, 0.25, 0.25, 0.25}});
    SpliceToyOracle oracle(std::move(donor), std::move(acceptor), 0, 0);
    const std::vector<Sequence> xs{Sequence("GA"), Sequence("CA")};
    const auto s = splice_metrics(xs, oracle);
    const double d1 = 0.7, d2 = 0.1, a = 0.25;
    CHECK(s.geomean ==
          doctest::Approx(0.5 * (std::sqrt(d1 * a) + std::sqrt(d2 * a))).epsilon(1e-12));
    CHECK(s.minimum == doctest::Approx(0.5 * (a + d2)).epsilon(1e-12));
    CHECK(s.gt_rate == 0.0);
}

TEST_CASE("splice geomean stays between min and max of the pair") {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const double d = 0.05 + 0.9 * rng.uniform();
        const double a = 0.05 + 0.9 * rng.uniform();
        const double g = std::sqrt(d * a);
        CHECK(g <= std::max(d, a) + 1e-15);
        CHECK(g >= std::min(d, a) - 1e-15);
    }
}

TEST_CASE("calls per sample averages recorded misses") {
    TrajectoryRecord a, b;
    a.oracle_misses = 10;
    b.oracle_misses = 4;
    const std::vector<TrajectoryRecord> recs{a, b};
    CHECK(calls_per_sample(recs) == doctest::Approx(7.0));
    // raw rollouts report zero
    UniformProposal model;
    const auto raw = raw_rollout(Sequence("ACGT"), 8, model, ActionSpace{LengthBounds{1, 8}}, 1);
    const std::vector<TrajectoryRecord> raws{raw};
    CHECK(calls_per_sample(raws) == 0.0);
}

TEST_CASE("warm shared cache can only reduce misses") {
    UniformProposal model;
    const ActionSpace space{LengthBounds{1, 10}};
    const Sequence x0("ACGT");
    GuidanceConfig cfg;
    cfg.k_root = 4;
    cfg.horizon = 2;
    std::vector<bool> mask(4, true);

    CachedOracle fresh(std::make_shared<SubstringCountOracle>("GT"));
    const auto cold = guided_rollout(x0, 4, mask, model, fresh, cfg, space, 11);

    CachedOracle warm(std::make_shared<SubstringCountOracle>("GT"));
    guided_rollout(x0, 4, mask, model, warm, cfg, space, 11);  // warm it up
    const auto second = guided_rollout(x0, 4, mask, model, warm, cfg, space, 11);
    CHECK(second.oracle_misses <= cold.oracle_misses);
}
