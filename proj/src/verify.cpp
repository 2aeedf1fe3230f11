#include "lpdp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "lpdp/baselines.hpp"
#include "lpdp/exactdp.hpp"
#include "lpdp/guidance.hpp"
#include "lpdp/numeric.hpp"
#include "lpdp/oracle.hpp"
#include "lpdp/proposal.hpp"
#include "lpdp/rng.hpp"

namespace lpdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(3);
    ss << std::scientific << v;
    return ss.str();
}

Sequence random_sequence(Rng& rng, std::size_t len) {
    static constexpr char kBases[] = {'A', 'C', 'G', 'T'};
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += kBases[rng.next() % 4];
    return Sequence(std::move(s));
}

// Randomized small instance: a parent state, the edit that produced the
// local child, a proposal model, a reward oracle, and scalar settings within
// the enumeration-safe ranges (lengths <= 4, k_loc <= 4).
struct Instance {
    std::shared_ptr<const ProposalModel> model;
    std::shared_ptr<const RewardOracle> inner;
    ActionSpace space;
    Sequence parent;
    EditAction prev{};
    Sequence child;
    GuidanceConfig cfg;
    int step = 0;
};

std::shared_ptr<const ProposalModel> random_model(Rng& rng) {
    if (rng.next() % 2 == 0) return std::make_shared<UniformProposal>();
    DriftParams p;
    p.w_sub = rng.uniform() * 2.0 - 1.0;
    p.w_ins = rng.uniform() * 2.0 - 1.0;
    p.w_del = rng.uniform() * 2.0 - 1.0;
    p.gain = rng.uniform() * 1.5;
    p.target_length = 4;
    return std::make_shared<DriftProposal>(p);
}

std::shared_ptr<const RewardOracle> random_oracle(Rng& rng) {
    if (rng.next() % 2 == 0) return std::make_shared<SubstringCountOracle>("GT");
    std::vector<std::array<double, 4>> rows;
    const std::size_t width = 2 + rng.next() % 2;
    for (std::size_t r = 0; r < width; ++r) {
        std::array<double, 4> row{};
        double sum = 0.0;
        for (double& p : row) {
            p = 0.05 + rng.uniform();
            sum += p;
        }
        for (double& p : row) p /= sum;
        rows.push_back(row);
    }
    return std::make_shared<PwmOracle>(Pwm(rows), PwmOracle::Mode::BestWindow);
}

template <typename T, std::size_t N>
T pick(Rng& rng, const T (&options)[N]) {
    return options[rng.next() % N];
}

Instance make_instance(Rng& rng) {
    Instance ins;
    ins.space.bounds = LengthBounds{1, 6};
    ins.parent = random_sequence(rng, 2 + rng.next() % 3);
    ins.model = random_model(rng);
    ins.inner = random_oracle(rng);
    const auto actions = enumerate_actions(ins.parent, ins.space);
    ins.prev = actions[rng.next() % actions.size()];
    ins.child = apply_edit(ins.parent, ins.prev);

    ins.cfg.beta = pick(rng, {0.5, 1.0, 5.0});
    ins.cfg.delta = pick(rng, {0.0, 0.5, 2.0});
    ins.cfg.tau = pick(rng, {1.0, 0.3});
    ins.cfg.radius = static_cast<long>(rng.next() % 3);
    ins.cfg.k_loc = 1 + static_cast<int>(rng.next() % 4);
    ins.cfg.k_root = pick(rng, {2, 4, 1000});
    ins.cfg.horizon = 2 + static_cast<int>(rng.next() % 2);
    ins.cfg.lambda = 0.5;
    ins.cfg.gamma = 1.0;
    ins.cfg.advance_local_time = rng.next() % 2 == 0;
    return ins;
}

struct Failure {
    bool failed = false;
    std::string detail;

    void set(const std::string& msg) {
        if (!failed) {
            failed = true;
            detail = msg;
        }
    }
};

}  // namespace

VerifyScale scale_for_preset(const std::string& preset) {
    VerifyScale s;
    if (preset == "default") return s;
    if (preset == "tiny") {
        s.band_instances = 150;
        s.partition_bases = 30;
        s.rank_candidate_sets = 2000;
        s.recovery_instances = 120;
        s.gap_instances = 60;
        s.reduction_instances = 80;
        s.dp_instances = 40;
        s.invariance_instances = 30;
        return s;
    }
    if (preset == "fault") {
        s = scale_for_preset("tiny");
        s.fault_tau = true;
        return s;
    }
    throw std::invalid_argument("unknown verify preset '" + preset +
                                "' (tiny|default|fault)");
}

CheckResult check_band_truncation(const VerifyScale& s) {
    Rng rng(mix_seed(s.seed, hash_label("band")));
    Failure fail;
    double min_margin = kInf;
    for (int i = 0; i < s.band_instances && !fail.failed; ++i) {
        const Instance ins = make_instance(rng);
        CachedOracle oracle(ins.inner);
        const auto scored = root_scores(ins.parent, 0, *ins.model, oracle, ins.cfg, ins.space);
        const double q_star = max_q(scored);
        const double delta = ins.cfg.delta;
        const auto kept = root_band(scored, delta, 1 << 30);  // uncapped
        for (const ScoredAction& sa : kept) {
            if (sa.q < q_star - delta) {
                fail.set("retained action " + to_string(sa.action) + " below the band at " +
                         fmt(sa.q));
            }
        }
        for (const ScoredAction& sa : scored) {
            const bool in_band = std::any_of(kept.begin(), kept.end(), [&](const ScoredAction& k) {
                return k.action == sa.action;
            });
            if (in_band) continue;
            const double margin = (q_star - delta) - sa.q;
            min_margin = std::min(min_margin, margin);
            if (!(sa.q < q_star - delta)) {
                fail.set("excluded action " + to_string(sa.action) + " not strictly below band");
            }
        }
    }
    CheckResult r;
    r.name = "band-truncation";
    r.pass = !fail.failed;
    r.detail = fail.failed ? fail.detail
                           : std::to_string(s.band_instances) + " instances; min excluded margin " +
                                 (min_margin == kInf ? "n/a (nothing excluded)" : fmt(min_margin));
    return r;
}

namespace {

struct PartitionEval {
    Instance ins;
    CandidateRule rule;
    int h = 1;
    double v_lse = 0.0;
    double v_max = 0.0;
    std::vector<LocalPath> paths;
};

std::vector<PartitionEval> partition_instances(const VerifyScale& s) {
    Rng rng(mix_seed(s.seed, hash_label("partition")));
    std::vector<PartitionEval> evals;
    for (int i = 0; i < s.partition_bases; ++i) {
        Instance base = make_instance(rng);
        const int h = 1 + static_cast<int>(rng.next() % 3);
        for (CandidateRule rule :
             {CandidateRule::Mixed, CandidateRule::StAfter, CandidateRule::StFirst}) {
            PartitionEval pe;
            pe.ins = base;
            pe.ins.cfg.rule = rule;
            pe.h = h;
            CachedOracle oracle(pe.ins.inner);
            GuidanceConfig lse_cfg = pe.ins.cfg;
            lse_cfg.backup = BackupKind::Lse;
            pe.v_lse = backup_value(pe.ins.child, pe.ins.prev, h, lse_cfg, *pe.ins.model, oracle,
                                    0, pe.ins.space);
            GuidanceConfig max_cfg = pe.ins.cfg;
            max_cfg.backup = BackupKind::Max;
            pe.v_max = backup_value(pe.ins.child, pe.ins.prev, h, max_cfg, *pe.ins.model, oracle,
                                    0, pe.ins.space);
            pe.paths = enumerate_paths(pe.ins.child, pe.ins.prev, h, rule, pe.ins.cfg,
                                       *pe.ins.model, oracle, 0, pe.ins.space);
            evals.push_back(std::move(pe));
        }
    }
    return evals;
}

}  // namespace

CheckResult check_path_partition_identity(const VerifyScale& s) {
    Failure fail;
    double max_rel = 0.0;
    const auto evals = partition_instances(s);
    for (const PartitionEval& pe : evals) {
        const double z = partition_value(pe.paths, pe.ins.cfg.tau);
        const double rel = std::abs(pe.v_lse - z) / std::max(1.0, std::abs(z));
        max_rel = std::max(max_rel, rel);
        if (rel > 1e-9) {
            fail.set("lse backup " + fmt(pe.v_lse) + " vs path partition " + fmt(z) +
                     " (rel err " + fmt(rel) + ")");
        }
        const double vmax_paths = max_path_value(pe.paths);
        const double rel_max =
            std::abs(pe.v_max - vmax_paths) / std::max(1.0, std::abs(vmax_paths));
        max_rel = std::max(max_rel, rel_max);
        if (rel_max > 1e-9) {
            fail.set("max backup " + fmt(pe.v_max) + " vs best path " + fmt(vmax_paths));
        }
    }
    CheckResult r;
    r.name = "path-partition-identity";
    r.pass = !fail.failed;
    r.detail = fail.failed
                   ? fail.detail
                   : std::to_string(evals.size()) + " rule-instances; max rel err " + fmt(max_rel);
    return r;
}

CheckResult check_low_temperature_limit(const VerifyScale& s) {
    Failure fail;
    double max_gap_slack = 0.0;
    const auto evals = partition_instances(s);
    const double bound_sign = s.fault_tau ? -1.0 : 1.0;
    for (const PartitionEval& pe : evals) {
        const double n_paths = static_cast<double>(pe.paths.size());
        const double gap = pe.v_lse - pe.v_max;
        if (gap < 0.0) {
            fail.set("lse below max by " + fmt(-gap));
        }
        const double bound = bound_sign * pe.ins.cfg.tau * std::log(n_paths);
        if (gap > bound + 1e-9) {
            fail.set("gap " + fmt(gap) + " exceeds tau*log|paths| " + fmt(bound));
        }
        max_gap_slack = std::max(max_gap_slack, gap - bound);

        // monotone approach to the hard value as tau decreases
        GuidanceConfig cfg = pe.ins.cfg;
        cfg.backup = BackupKind::Lse;
        CachedOracle oracle(pe.ins.inner);
        double prev = kInf;
        for (double tau : {1.0, 0.5, 0.1, 0.01, 1e-4}) {
            cfg.tau = tau;
            const double v = backup_value(pe.ins.child, pe.ins.prev, pe.h, cfg, *pe.ins.model,
                                          oracle, 0, pe.ins.space);
            if (v > prev + 1e-12) {
                fail.set("lse value not nonincreasing in decreasing tau");
            }
            prev = v;
        }
        const double low_bound = bound_sign * 1e-4 * std::log(n_paths);
        if (std::abs(prev - pe.v_max) > low_bound + 1e-12) {
            fail.set("|lse(tau=1e-4) - max| = " + fmt(std::abs(prev - pe.v_max)) +
                     " exceeds " + fmt(low_bound));
        }
    }
    CheckResult r;
    r.name = "low-temperature-limit";
    r.pass = !fail.failed;
    r.detail = fail.failed ? fail.detail
                           : std::to_string(evals.size()) + " rule-instances; max gap-bound slack " +
                                 fmt(max_gap_slack);
    return r;
}

CheckResult check_conservative_pruning_rank(const VerifyScale& s) {
    Rng rng(mix_seed(s.seed, hash_label("rank")));
    Failure fail;
    std::size_t sets = 0;
    for (int i = 0; i < s.rank_candidate_sets && !fail.failed; ++i) {
        const Instance ins = make_instance(rng);
        const auto ranked = ranked_neighborhood(ins.child, ins.prev, ins.cfg.radius, *ins.model,
                                                0, ins.space);
        const auto cands = candidate_set(ins.child, ins.prev, CandidateRule::StAfter,
                                         ins.cfg.k_loc, ins.cfg.radius, *ins.model, 0, ins.space);
        ++sets;
        for (const EditAction& b : cands) {
            const auto it = std::find(ranked.begin(), ranked.end(), b);
            const std::size_t rank = static_cast<std::size_t>(it - ranked.begin()) + 1;
            if (rank > static_cast<std::size_t>(ins.cfg.k_loc)) {
                fail.set("st_after candidate " + to_string(b) + " has mixed rank " +
                         std::to_string(rank) + " > k_loc " + std::to_string(ins.cfg.k_loc));
            }
        }
    }

    // constructed witness: substitutions dominate the base rates, so the
    // typed-first rule must reach below the mixed shortlist
    bool witness = false;
    {
        DriftParams p;
        p.w_sub = 5.0;
        p.target_length = 8;
        const auto model = std::make_shared<DriftProposal>(p);
        const ActionSpace space{LengthBounds{1, 12}};
        const Sequence parent("ACGTAC");
        const EditAction prev = make_ins(3, Nucleotide::A);
        const Sequence child = apply_edit(parent, prev);
        const long radius = 1;
        const int k_loc = 4;
        const auto ranked = ranked_neighborhood(child, prev, radius, *model, 0, space);
        const auto first_cands =
            candidate_set(child, prev, CandidateRule::StFirst, k_loc, radius, *model, 0, space);
        for (const EditAction& b : first_cands) {
            const auto it = std::find(ranked.begin(), ranked.end(), b);
            const std::size_t rank = static_cast<std::size_t>(it - ranked.begin()) + 1;
            if (rank > static_cast<std::size_t>(k_loc)) witness = true;
        }
        if (!witness) fail.set("st_first witness instance retained no deep-rank candidate");
    }

    CheckResult r;
    r.name = "conservative-pruning-rank";
    r.pass = !fail.failed;
    r.detail = fail.failed ? fail.detail
                           : std::to_string(sets) +
                                 " candidate sets with zero st_after rank violations; st_first "
                                 "witness rank exceeds k_loc";
    return r;
}

CheckResult check_pruning_recovery(const VerifyScale& s) {
    Rng rng(mix_seed(s.seed, hash_label("recovery")));
    Failure fail;
    int qualifying = 0;
    for (int i = 0; i < s.recovery_instances && !fail.failed; ++i) {
        Instance ins = make_instance(rng);
        ins.cfg.backup = BackupKind::Max;
        const int h = ins.cfg.horizon - 1;
        CachedOracle oracle(ins.inner);
        const auto mixed_paths = enumerate_paths(ins.child, ins.prev, h, CandidateRule::Mixed,
                                                 ins.cfg, *ins.model, oracle, 0, ins.space);
        if (mixed_paths.empty()) continue;
        const double best = max_path_value(mixed_paths);

        auto typed_feasible = [&](const LocalPath& path) {
            Sequence z = ins.child;
            EditAction prev = ins.prev;
            int step = 0;
            for (const EditAction& b : path.edits) {
                const auto cands = candidate_set(z, prev, CandidateRule::StAfter, ins.cfg.k_loc,
                                                 ins.cfg.radius, *ins.model, step, ins.space);
                if (std::find(cands.begin(), cands.end(), b) == cands.end()) return false;
                z = apply_edit(z, b);
                prev = b;
                if (ins.cfg.advance_local_time) ++step;
            }
            return true;
        };

        bool qualifies = false;
        for (const LocalPath& p : mixed_paths) {
            if (p.score == best && typed_feasible(p)) {
                qualifies = true;
                break;
            }
        }
        if (!qualifies) continue;
        ++qualifying;

        GuidanceConfig mixed_cfg = ins.cfg;
        mixed_cfg.rule = CandidateRule::Mixed;
        GuidanceConfig typed_cfg = ins.cfg;
        typed_cfg.rule = CandidateRule::StAfter;
        const double v_mixed =
            backup_value(ins.child, ins.prev, h, mixed_cfg, *ins.model, oracle, 0, ins.space);
        const double v_typed =
            backup_value(ins.child, ins.prev, h, typed_cfg, *ins.model, oracle, 0, ins.space);
        if (v_mixed != v_typed) {
            fail.set("typed-max " + fmt(v_typed) + " != mixed-max " + fmt(v_mixed) +
                     " on a qualifying instance");
        }
    }
    CheckResult r;
    r.name = "pruning-recovery";
    if (qualifying < 10) {
        r.pass = false;
        r.detail = "only " + std::to_string(qualifying) + " qualifying instances (need >= 10)";
        return r;
    }
    r.pass = !fail.failed;
    r.detail = fail.failed ? fail.detail
                           : std::to_string(qualifying) + " qualifying instances, exact matches";
    return r;
}

CheckResult check_soft_pruning_gap(const VerifyScale& s) {
    Rng rng(mix_seed(s.seed, hash_label("softgap")));
    Failure fail;
    double max_err = 0.0;
    int used = 0;
    for (int i = 0; i < s.gap_instances && !fail.failed; ++i) {
        Instance ins = make_instance(rng);
        const int h = ins.cfg.horizon - 1;
        CachedOracle oracle(ins.inner);
        GuidanceConfig mixed_cfg = ins.cfg;
        mixed_cfg.rule = CandidateRule::Mixed;
        mixed_cfg.backup = BackupKind::Lse;
        GuidanceConfig typed_cfg = mixed_cfg;
        typed_cfg.rule = CandidateRule::StAfter;

        const double v_mixed =
            backup_value(ins.child, ins.prev, h, mixed_cfg, *ins.model, oracle, 0, ins.space);
        const double v_typed =
            backup_value(ins.child, ins.prev, h, typed_cfg, *ins.model, oracle, 0, ins.space);
        const auto mixed_paths = enumerate_paths(ins.child, ins.prev, h, CandidateRule::Mixed,
                                                 ins.cfg, *ins.model, oracle, 0, ins.space);
        const auto typed_paths = enumerate_paths(ins.child, ins.prev, h, CandidateRule::StAfter,
                                                 ins.cfg, *ins.model, oracle, 0, ins.space);
        if (mixed_paths.empty() || typed_paths.empty()) continue;
        ++used;
        const double lhs = v_mixed - v_typed;
        const double rhs = partition_value(mixed_paths, ins.cfg.tau) -
                           partition_value(typed_paths, ins.cfg.tau);
        const double err = std::abs(lhs - rhs);
        max_err = std::max(max_err, err);
        if (err > 1e-9) {
            fail.set("gap identity off by " + fmt(err));
        }
        if (lhs < -1e-12) {
            fail.set("mixed lse below typed-subset lse by " + fmt(-lhs));
        }
    }
    CheckResult r;
    r.name = "soft-pruning-gap";
    r.pass = !fail.failed && used > 0;
    r.detail = fail.failed ? fail.detail
                           : std::to_string(used) + " instances; max identity error " +
                                 fmt(max_err);
    return r;
}

CheckResult check_one_step_reduction(const VerifyScale& s) {
    Rng rng(mix_seed(s.seed, hash_label("onestep")));
    Failure fail;
    int count = 0;
    for (int i = 0; i < s.reduction_instances && !fail.failed; ++i) {
        Instance ins = make_instance(rng);
        CachedOracle oracle(ins.inner);

        // independent band argmax: best q with canonical tie-break
        const auto scored = root_scores(ins.parent, 0, *ins.model, oracle, ins.cfg, ins.space);
        const auto band = root_band(scored, ins.cfg.delta, ins.cfg.k_root);
        const ScoredAction* expect = &band.front();
        for (const ScoredAction& sa : band) {
            if (sa.q > expect->q || (sa.q == expect->q && sa.action < expect->action)) {
                expect = &sa;
            }
        }

        GuidanceConfig h1 = ins.cfg;
        h1.horizon = 1;
        const auto dec_h1 = lpdp_step(ins.parent, 0, *ins.model, oracle, h1, ins.space);
        if (dec_h1.chosen != expect->action) {
            fail.set("H=1 choice " + to_string(dec_h1.chosen) + " != band argmax " +
                     to_string(expect->action));
        }

        GuidanceConfig lam0 = ins.cfg;
        lam0.horizon = 3;
        lam0.lambda = 0.0;
        const auto dec_l0 = lpdp_step(ins.parent, 0, *ins.model, oracle, lam0, ins.space);
        if (dec_l0.chosen != expect->action) {
            fail.set("lambda=0 choice " + to_string(dec_l0.chosen) + " != band argmax " +
                     to_string(expect->action));
        }
        ++count;
    }
    CheckResult r;
    r.name = "one-step-reduction";
    r.pass = !fail.failed;
    r.detail = fail.failed ? fail.detail : std::to_string(count) + " instances agree";
    return r;
}

CheckResult check_full_dp_equivalence(const VerifyScale& s) {
    Rng rng(mix_seed(s.seed, hash_label("fulldp")));
    Failure fail;
    double max_rel = 0.0;
    int count = 0;
    for (int i = 0; i < s.dp_instances && !fail.failed; ++i) {
        Instance ins = make_instance(rng);
        ins.cfg.lambda = 1.0;
        ins.cfg.delta = kInf;
        ins.cfg.k_root = 1 << 30;
        ins.cfg.radius = 1L << 40;
        ins.cfg.k_loc = 1 << 30;
        ins.cfg.horizon = 1 + static_cast<int>(rng.next() % 2);
        ins.cfg.rule = CandidateRule::Mixed;
        ins.cfg.backup = BackupKind::Max;
        ins.cfg.gamma = 1.0;
        ins.cfg.advance_local_time = false;
        CachedOracle oracle(ins.inner);

        const auto dec = lpdp_step(ins.parent, 0, *ins.model, oracle, ins.cfg, ins.space);
        double best_s = -kInf;
        for (const ScoredAction& sa : dec.band) best_s = std::max(best_s, *sa.s_lpdp);
        const DpResult dp = full_graph_dp(ins.parent, 0, ins.cfg.horizon, ins.cfg.beta,
                                          *ins.model, oracle, ins.space);
        const double rel = std::abs(best_s - dp.total) / std::max(1.0, std::abs(dp.total));
        max_rel = std::max(max_rel, rel);
        if (rel > 1e-9) {
            fail.set("unrestricted score " + fmt(best_s) + " != full dp total " + fmt(dp.total));
        }
        if (dec.chosen != dp.first) {
            fail.set("unrestricted first edit " + to_string(dec.chosen) + " != dp first edit " +
                     to_string(dp.first));
        }
        ++count;
    }
    CheckResult r;
    r.name = "full-dp-equivalence";
    r.pass = !fail.failed;
    r.detail = fail.failed ? fail.detail
                           : std::to_string(count) + " instances; max rel err " + fmt(max_rel);
    return r;
}

namespace {

class OffsetOracle final : public RewardOracle {
  public:
    OffsetOracle(std::shared_ptr<const RewardOracle> inner, double offset)
        : inner_(std::move(inner)), offset_(offset) {}
    double reward(const Sequence& x) const override { return inner_->reward(x) + offset_; }

  private:
    std::shared_ptr<const RewardOracle> inner_;
    double offset_;
};

class ScaledModel final : public ProposalModel {
  public:
    ScaledModel(std::shared_ptr<const ProposalModel> inner, double factor)
        : inner_(std::move(inner)), factor_(factor) {}
    double rate(const Sequence& x, const EditAction& a, int step) const override {
        return factor_ * inner_->rate(x, a, step);
    }
    std::string name() const override { return inner_->name() + "-scaled"; }

  private:
    std::shared_ptr<const ProposalModel> inner_;
    double factor_;
};

}  // namespace

CheckResult check_reward_shift_invariance(const VerifyScale& s) {
    Rng rng(mix_seed(s.seed, hash_label("shift")));
    Failure fail;
    int count = 0;
    for (int i = 0; i < s.invariance_instances && !fail.failed; ++i) {
        const Instance ins = make_instance(rng);
        CachedOracle base(ins.inner);
        CachedOracle shifted(std::make_shared<OffsetOracle>(ins.inner, 10.5));

        const auto dec_a = lpdp_step(ins.parent, 0, *ins.model, base, ins.cfg, ins.space);
        const auto dec_b = lpdp_step(ins.parent, 0, *ins.model, shifted, ins.cfg, ins.space);
        if (dec_a.chosen != dec_b.chosen) {
            fail.set("reward shift changed the chosen action");
        }
        for (std::size_t k = 0; k < dec_a.band.size() && k < dec_b.band.size(); ++k) {
            if (std::abs(dec_a.band[k].q - dec_b.band[k].q) > 1e-9 ||
                std::abs(*dec_a.band[k].s_lpdp - *dec_b.band[k].s_lpdp) > 1e-9) {
                fail.set("reward shift moved a band score by more than 1e-9");
            }
        }
        ++count;
    }
    CheckResult r;
    r.name = "reward-shift-invariance";
    r.pass = !fail.failed;
    r.detail = fail.failed ? fail.detail : std::to_string(count) + " instances unchanged";
    return r;
}

CheckResult check_rate_scale_invariance(const VerifyScale& s) {
    Rng rng(mix_seed(s.seed, hash_label("scale")));
    Failure fail;
    int count = 0;
    for (int i = 0; i < s.invariance_instances && !fail.failed; ++i) {
        const Instance ins = make_instance(rng);
        const auto scaled = std::make_shared<ScaledModel>(ins.model, 3.7);
        CachedOracle oracle_a(ins.inner);
        CachedOracle oracle_b(ins.inner);

        const auto dec_a = lpdp_step(ins.parent, 0, *ins.model, oracle_a, ins.cfg, ins.space);
        const auto dec_b = lpdp_step(ins.parent, 0, *scaled, oracle_b, ins.cfg, ins.space);
        if (dec_a.chosen != dec_b.chosen) {
            fail.set("rate scaling changed the chosen action");
        }
        for (std::size_t k = 0; k < dec_a.band.size() && k < dec_b.band.size(); ++k) {
            if (std::abs(dec_a.band[k].log_p0 - dec_b.band[k].log_p0) > 1e-12 ||
                std::abs(dec_a.band[k].q - dec_b.band[k].q) > 1e-12) {
                fail.set("rate scaling moved log p0 or q by more than 1e-12");
            }
        }
        ++count;
    }
    CheckResult r;
    r.name = "rate-scale-invariance";
    r.pass = !fail.failed;
    r.detail = fail.failed ? fail.detail : std::to_string(count) + " instances unchanged";
    return r;
}

std::vector<CheckResult> run_verification(const std::string& preset) {
    const VerifyScale s = scale_for_preset(preset);
    std::vector<CheckResult> out;
    out.push_back(check_band_truncation(s));
    out.push_back(check_path_partition_identity(s));
    out.push_back(check_low_temperature_limit(s));
    out.push_back(check_conservative_pruning_rank(s));
    out.push_back(check_pruning_recovery(s));
    out.push_back(check_soft_pruning_gap(s));
    out.push_back(check_one_step_reduction(s));
    out.push_back(check_full_dp_equivalence(s));
    out.push_back(check_reward_shift_invariance(s));
    out.push_back(check_rate_scale_invariance(s));
    return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.pass; });
}

}  // namespace lpdp
