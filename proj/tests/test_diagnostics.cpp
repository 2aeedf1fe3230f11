#include "doctest.h"

#include <cmath>

#include "lpdp/diagnostics.hpp"
#include "test_support.hpp"

using namespace lpdp;

namespace {

const ActionSpace kSmall{LengthBounds{1, 8}};

GuidanceConfig diag_config() {
    GuidanceConfig cfg;
    cfg.beta = 2.0;
    cfg.k_loc = 4;
    cfg.radius = 1;
    cfg.horizon = 2;
    cfg.tau = 1.0;
    cfg.gamma = 1.0;
    return cfg;
}

LocalInstance make_local(const Sequence& parent, const EditAction& prev) {
    return LocalInstance{apply_edit(parent, prev), prev, 0};
}

}  // namespace

TEST_CASE("cand_ratio is one for mixed and for fallback st_after") {
    UniformProposal model;
    const GuidanceConfig cfg = diag_config();
    const auto inst = make_local(Sequence("ACGT"), make_sub(1, Nucleotide::G));
    CHECK(cand_ratio(inst, CandidateRule::Mixed, cfg, model, kSmall) == 1.0);

    // sub-dominated rates with an insertion parent: typed intersection empty,
    // fallback returns the mixed shortlist
    DriftParams p;
    p.w_sub = 5.0;
    p.target_length = 8;
    DriftProposal drift(p);
    const auto ins_inst = make_local(Sequence("ACGTAC"), make_ins(3, Nucleotide::A));
    CHECK(cand_ratio(ins_inst, CandidateRule::StAfter, cfg, drift, ActionSpace{{1, 12}}) == 1.0);
}

TEST_CASE("cand_ratio never exceeds one for st_after") {
    Rng rng(3);
    UniformProposal model;
    const GuidanceConfig cfg = diag_config();
    for (int trial = 0; trial < 60; ++trial) {
        std::string s;
        for (std::size_t i = 0; i < 2 + rng.next() % 4; ++i) s += "ACGT"[rng.next() % 4];
        const Sequence parent(s);
        const auto acts = enumerate_actions(parent, kSmall);
        const auto inst = make_local(parent, acts[rng.next() % acts.size()]);
        CHECK(cand_ratio(inst, CandidateRule::StAfter, cfg, model, kSmall) <= 1.0);
    }
}

TEST_CASE("path_ratio of st_after is at most one") {
    UniformProposal model;
    CachedOracle oracle(std::make_shared<SubstringCountOracle>("GT"));
    const GuidanceConfig cfg = diag_config();
    const auto inst = make_local(Sequence("ACGT"), make_del(2));
    const double r = path_ratio(inst, CandidateRule::StAfter, cfg, model, oracle, kSmall);
    CHECK(r <= 1.0);
    CHECK(r > 0.0);
    CHECK(path_ratio(inst, CandidateRule::Mixed, cfg, model, oracle, kSmall) == 1.0);
}

TEST_CASE("top1 agreement of mixed with itself is one") {
    UniformProposal model;
    CachedOracle oracle(std::make_shared<SubstringCountOracle>("GT"));
    const GuidanceConfig cfg = diag_config();
    const std::vector<RootInstance> roots{{Sequence("ACGT"), 0}, {Sequence("GGAC"), 1}};
    CHECK(top1_agreement(roots, CandidateRule::Mixed, BackupKind::Max, cfg, model, oracle,
                         kSmall) == 1.0);
    CHECK(top1_agreement(roots, CandidateRule::Mixed, BackupKind::Lse, cfg, model, oracle,
                         kSmall) == 1.0);
}

TEST_CASE("single-root bands force agreement for every rule") {
    UniformProposal model;
    CachedOracle oracle(std::make_shared<SubstringCountOracle>("GT"));
    GuidanceConfig cfg = diag_config();
    cfg.k_root = 1;  // the band is a single action, so every rule agrees
    const std::vector<RootInstance> roots{{Sequence("ACGT"), 0}, {Sequence("TTAC"), 3}};
    for (CandidateRule rule :
         {CandidateRule::Mixed, CandidateRule::StAfter, CandidateRule::StFirst}) {
        for (BackupKind b : {BackupKind::Max, BackupKind::Lse}) {
            CHECK(top1_agreement(roots, rule, b, cfg, model, oracle, kSmall) == 1.0);
        }
    }
}

TEST_CASE("mixed rank tail: zero for st_after and mixed, positive for the witness") {
    const GuidanceConfig cfg = diag_config();
    UniformProposal uni;
    Rng rng(9);
    std::vector<LocalInstance> insts;
    for (int trial = 0; trial < 40; ++trial) {
        std::string s;
        for (std::size_t i = 0; i < 2 + rng.next() % 4; ++i) s += "ACGT"[rng.next() % 4];
        const Sequence parent(s);
        const auto acts = enumerate_actions(parent, kSmall);
        insts.push_back(make_local(parent, acts[rng.next() % acts.size()]));
    }
    CHECK(mixed_rank_tail(insts, CandidateRule::Mixed, cfg, uni, kSmall) == 0.0);
    CHECK(mixed_rank_tail(insts, CandidateRule::StAfter, cfg, uni, kSmall) == 0.0);

    DriftParams p;
    p.w_sub = 5.0;
    p.target_length = 8;
    DriftProposal drift(p);
    const std::vector<LocalInstance> witness{
        make_local(Sequence("ACGTAC"), make_ins(3, Nucleotide::A))};
    CHECK(mixed_rank_tail(witness, CandidateRule::StFirst, cfg, drift, ActionSpace{{1, 12}}) >
          0.0);
}

TEST_CASE("mass efficiency is one on identical rules and equal-score subsets") {
    UniformProposal model;
    const GuidanceConfig cfg = diag_config();
    CachedOracle zero(std::make_shared<test::ZeroOracle>());
    const auto inst = make_local(Sequence("ACGT"), make_sub(1, Nucleotide::G));
    const auto same = mass_efficiency(inst, CandidateRule::Mixed, cfg, model, zero, kSmall);
    REQUIRE(same.has_value());
    CHECK(*same == doctest::Approx(1.0).epsilon(1e-12));

    // equal path scores: mass fraction equals count fraction exactly.
    // rewards cancel each edge's log p0, so every path scores zero.
    GuidanceConfig flat_cfg = diag_config();
    flat_cfg.horizon = 2;
    const Sequence parent("ACGT");
    const EditAction prev = make_sub(1, Nucleotide::G);
    const Sequence z = apply_edit(parent, prev);
    std::unordered_map<std::string, double> table;
    std::function<void(const Sequence&, const EditAction&, int)> fill =
        [&](const Sequence& node, const EditAction& from, int depth) {
            if (depth == 0) return;
            const auto dist = normalized_proposal(model, node, 0, kSmall);
            const auto cands = candidate_set(node, from, CandidateRule::Mixed, flat_cfg.k_loc,
                                             flat_cfg.radius, model, 0, kSmall);
            for (const EditAction& b : cands) {
                const Sequence child = apply_edit(node, b);
                table[child.str()] = table[node.str()] -
                                     dist.log_probs[dist.index_of(b)] / flat_cfg.beta;
                fill(child, b, depth - 1);
            }
        };
    table[z.str()] = 0.0;
    fill(z, prev, flat_cfg.horizon - 1);
    CachedOracle flat(std::make_shared<test::MapOracle>(std::move(table)));
    const auto subset = mass_efficiency(inst, CandidateRule::StAfter, flat_cfg, model, flat,
                                        kSmall);
    REQUIRE(subset.has_value());
    CHECK(*subset == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("mass efficiency exceeds one when the kept path dominates") {
    // two candidates: the same-kind one carries a large reward bump, the
    // other a penalty; keeping the top path concentrates the mass
    UniformProposal model;
    GuidanceConfig cfg = diag_config();
    cfg.horizon = 2;
    cfg.k_loc = 8;
    cfg.radius = 0;
    const Sequence parent("ACGT");
    const EditAction prev = make_sub(1, Nucleotide::G);
    const Sequence z = apply_edit(parent, prev);  // "AGGT", anchor 1

    std::unordered_map<std::string, double> table;
    const auto cands =
        candidate_set(z, prev, CandidateRule::Mixed, cfg.k_loc, cfg.radius, model, 0, kSmall);
    REQUIRE(cands.size() >= 2);
    for (const EditAction& b : cands) {
        const Sequence child = apply_edit(z, b);
        table[child.str()] = b.kind == prev.kind ? 3.0 : -3.0;
    }
    CachedOracle oracle(std::make_shared<test::MapOracle>(std::move(table)));
    const auto me = mass_efficiency(LocalInstance{z, prev, 0}, CandidateRule::StAfter, cfg, model,
                                    oracle, kSmall);
    REQUIRE(me.has_value());
    CHECK(*me > 1.0);
}

TEST_CASE("aggregate diagnostics cover every field") {
    UniformProposal model;
    CachedOracle oracle(std::make_shared<SubstringCountOracle>("GT"));
    const GuidanceConfig cfg = diag_config();
    std::vector<LocalInstance> locals;
    std::vector<RootInstance> roots;
    Rng rng(21);
    for (int i = 0; i < 6; ++i) {
        std::string s;
        for (std::size_t j = 0; j < 3 + rng.next() % 2; ++j) s += "ACGT"[rng.next() % 4];
        const Sequence parent(s);
        const auto acts = enumerate_actions(parent, kSmall);
        locals.push_back(make_local(parent, acts[rng.next() % acts.size()]));
        roots.push_back(RootInstance{parent, i});
    }
    const auto d =
        aggregate_diagnostics(CandidateRule::StAfter, locals, roots, cfg, model, oracle, kSmall);
    CHECK(d.rule == CandidateRule::StAfter);
    CHECK(d.cand_ratio > 0.0);
    CHECK(d.cand_ratio <= 1.0);
    CHECK(d.path_ratio > 0.0);
    CHECK(d.mixed_rank_tail == 0.0);
    CHECK(d.top1_agreement_max >= 0.0);
    CHECK(d.top1_agreement_lse <= 1.0);
    CHECK(d.local_instances == 6);
    CHECK(d.root_instances == 6);
}
