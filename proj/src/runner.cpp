#include "lpdp/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "lpdp/diagnostics.hpp"
#include "lpdp/version.hpp"

namespace lpdp {

namespace {

using nlohmann::json;

std::uint64_t sample_seed(const RunConfig& run, const std::string& method_name, int index) {
    return mix_seed(mix_seed(run.seed, hash_label(method_name)),
                    static_cast<std::uint64_t>(index));
}

TrajectoryRecord dispatch_rollout(const TaskContext& ctx, const MethodConfig& m,
                                  const RunConfig& run, const CachedOracle& oracle,
                                  const Sequence& x0, std::uint64_t seed) {
    const WindowSpec& window = m.window ? *m.window : run.window;
    const std::vector<bool> mask = window.mask(run.total_steps);
    if (m.type == "raw") {
        return raw_rollout(x0, run.total_steps, *ctx.model, ctx.space, seed);
    }
    if (m.type == "lpdp") {
        return guided_rollout(x0, run.total_steps, mask, *ctx.model, oracle, m.guidance,
                              ctx.space, seed);
    }
    if (m.type == "beam") {
        return beam_rollout(x0, run.total_steps, mask, *ctx.model, oracle, m.beam, m.beta,
                            ctx.space, seed);
    }
    if (m.type == "cem") {
        return cem_rollout(x0, run.total_steps, mask, *ctx.model, oracle, m.cem, ctx.space, seed);
    }
    if (m.type == "smc") {
        return smc_rollout(x0, run.total_steps, mask, *ctx.model, oracle, m.smc, m.beta,
                           ctx.space, seed);
    }
    if (m.type == "tds") {
        return tds_rollout(x0, run.total_steps, mask, *ctx.model, oracle, m.tds, m.beta,
                           ctx.space, seed);
    }
    throw std::runtime_error("unknown method type '" + m.type + "'");
}

template <typename F>
void parallel_samples(int n, int workers, F&& body) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&]() {
        while (!failed.load(std::memory_order_relaxed)) {
            const int i = next.fetch_add(1);
            if (i >= n) break;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };
    std::vector<std::thread> pool;
    const int k = std::min(workers, n);
    pool.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double var = ss / static_cast<double>(v.size() - 1);
    return std::sqrt(var / static_cast<double>(v.size()));
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

KmerDistribution reference_kmers(const TaskContext& ctx, const RunConfig& run, int k) {
    const std::uint64_t base = mix_seed(run.seed, hash_label("jsd-reference"));
    std::vector<Sequence> refs;
    refs.reserve(static_cast<std::size_t>(run.samples));
    for (int i = 0; i < run.samples; ++i) {
        const std::uint64_t seed = mix_seed(base, static_cast<std::uint64_t>(i));
        Rng init_rng(mix_seed(seed, hash_label("init")));
        const Sequence x0 = make_initial_sequence(ctx.init, ctx.space, init_rng);
        refs.push_back(raw_rollout(x0, run.total_steps, *ctx.model, ctx.space, seed).final_seq);
    }
    return KmerDistribution::from_sequences(k, refs);
}

MethodOutput run_method(const TaskContext& ctx, const MethodConfig& method, const RunConfig& run,
                        const KmerDistribution& reference) {
    MethodOutput out;
    out.method = method;
    out.samples.resize(static_cast<std::size_t>(run.samples));

    const bool shared_cache = run.cache_mode == "shared";
    // A shared cache makes per-sample miss attribution depend on execution
    // order, so shared mode runs samples sequentially.
    const int workers = shared_cache ? 1 : run.workers;
    CachedOracle shared(ctx.oracle);

    parallel_samples(run.samples, workers, [&](int i) {
        SampleOutput& so = out.samples[static_cast<std::size_t>(i)];
        so.index = i;
        so.seed = sample_seed(run, method.name, i);
        Rng init_rng(mix_seed(so.seed, hash_label("init")));
        const Sequence x0 = make_initial_sequence(ctx.init, ctx.space, init_rng);

        if (shared_cache) {
            so.record = dispatch_rollout(ctx, method, run, shared, x0, so.seed);
            so.reward = shared.reward(so.record.final_seq);
        } else {
            CachedOracle cache(ctx.oracle);
            so.record = dispatch_rollout(ctx, method, run, cache, x0, so.seed);
            so.reward = cache.reward(so.record.final_seq);
        }
        so.traj_ll = run.total_steps > 0 ? base_traj_ll(so.record) : 0.0;
    });

    std::vector<double> rewards, lls;
    std::vector<Sequence> finals;
    std::vector<TrajectoryRecord> records;
    for (const SampleOutput& so : out.samples) {
        rewards.push_back(so.reward);
        lls.push_back(so.traj_ll);
        finals.push_back(so.record.final_seq);
        records.push_back(so.record);
    }
    out.reward_mean = mean_of(rewards);
    out.reward_median = median_of(rewards);
    out.reward_stderr = stderr_of(rewards);
    out.traj_ll_mean = mean_of(lls);
    out.calls = calls_per_sample(records);
    const KmerDistribution gen = KmerDistribution::from_sequences(reference.k, finals);
    out.jsd3 = (gen.total > 0 && reference.total > 0) ? jsd(gen, reference) : 0.0;
    if (const auto* splice = dynamic_cast<const SpliceToyOracle*>(ctx.oracle.get())) {
        out.splice = splice_metrics(finals, *splice);
    }
    return out;
}

namespace {

json sample_to_json(const SampleOutput& so) {
    json edits = json::array();
    json guided = json::array();
    for (const StepRecord& sr : so.record.steps) {
        edits.push_back(to_string(sr.action));
        if (sr.guided) guided.push_back(sr.step);
    }
    return json{{"sample", so.index},
                {"seed", so.seed},
                {"initial_sequence", so.record.initial.str()},
                {"final_sequence", so.record.final_seq.str()},
                {"reward", so.reward},
                {"traj_ll", so.traj_ll},
                {"calls", so.record.oracle_misses},
                {"hits", so.record.oracle_hits},
                {"edits", edits},
                {"guided_steps", guided}};
}

void write_jsonl(const std::string& path, const MethodOutput& mo) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const SampleOutput& so : mo.samples) {
        out << sample_to_json(so).dump() << "\n";
    }
}

void write_summary_csv(const std::string& path, const std::vector<MethodOutput>& methods) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    const bool splice = std::any_of(methods.begin(), methods.end(),
                                    [](const MethodOutput& m) { return m.splice.has_value(); });
    out << "method,samples,reward_mean,reward_median,reward_stderr,jsd3,traj_ll,calls_per_sample";
    if (splice) out << ",splice_geomean,splice_min,donor_gt_rate";
    out << "\n";
    for (const MethodOutput& m : methods) {
        out << m.method.name << "," << m.samples.size() << "," << format_double(m.reward_mean)
            << "," << format_double(m.reward_median) << "," << format_double(m.reward_stderr)
            << "," << format_double(m.jsd3) << "," << format_double(m.traj_ll_mean) << ","
            << format_double(m.calls);
        if (splice) {
            if (m.splice) {
                out << "," << format_double(m.splice->geomean) << ","
                    << format_double(m.splice->minimum) << "," << format_double(m.splice->gt_rate);
            } else {
                out << ",,,";
            }
        }
        out << "\n";
    }
}

std::string config_hash_hex(const json& j) {
    const std::string dumped = j.dump();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash_label(dumped)));
    return buf;
}

}  // namespace

RunOutput run_experiment(const ExperimentConfig& cfg_in, const RunOverrides& overrides) {
    ExperimentConfig cfg = cfg_in;
    if (overrides.seed) cfg.run.seed = *overrides.seed;
    if (overrides.out_dir) cfg.run.out_dir = *overrides.out_dir;
    if (overrides.workers) cfg.run.workers = *overrides.workers;

    const TaskContext ctx = build_task(cfg.task);
    // catch oracle/window/init mismatches before burning compute
    {
        Rng probe_rng(mix_seed(cfg.run.seed, hash_label("probe")));
        const Sequence probe = make_initial_sequence(ctx.init, ctx.space, probe_rng);
        try {
            ctx.oracle->reward(probe);
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("oracle cannot score the initial sequence: ") +
                                     e.what());
        }
        cfg.run.window.mask(cfg.run.total_steps);
    }

    RunOutput out;
    out.out_dir = cfg.run.out_dir;
    std::filesystem::create_directories(out.out_dir);

    const KmerDistribution reference = reference_kmers(ctx, cfg.run);
    for (const MethodConfig& m : cfg.methods) {
        out.methods.push_back(run_method(ctx, m, cfg.run, reference));
    }

    for (const MethodOutput& mo : out.methods) {
        write_jsonl(out.out_dir + "/" + mo.method.name + ".jsonl", mo);
    }
    write_summary_csv(out.out_dir + "/summary.csv", out.methods);

    const json cfg_json = cfg.to_json();
    const json manifest{{"version", std::string(kToolVersion)},
                        {"config_hash", config_hash_hex(cfg_json)},
                        {"seed", cfg.run.seed},
                        {"cache_mode", cfg.run.cache_mode},
                        {"config", cfg_json}};
    std::ofstream mf(out.out_dir + "/manifest.json", std::ios::binary);
    if (!mf) throw std::runtime_error("cannot write manifest.json");
    mf << manifest.dump(2) << "\n";
    return out;
}

std::string ablate_axis(const ExperimentConfig& cfg_in, const std::string& axis,
                        const RunOverrides& overrides) {
    ExperimentConfig cfg = cfg_in;
    if (overrides.seed) cfg.run.seed = *overrides.seed;
    if (overrides.out_dir) cfg.run.out_dir = *overrides.out_dir;
    if (overrides.workers) cfg.run.workers = *overrides.workers;

    const auto lpdp_it = std::find_if(cfg.methods.begin(), cfg.methods.end(),
                                      [](const MethodConfig& m) { return m.type == "lpdp"; });
    if (lpdp_it == cfg.methods.end()) {
        throw std::runtime_error("ablate: config has no lpdp method block");
    }
    const MethodConfig base_method = *lpdp_it;
    const TaskContext ctx = build_task(cfg.task);

    struct Point {
        std::string value;
        MethodConfig method;
        RunConfig run;
    };
    std::vector<Point> points;
    const RunConfig base_run = cfg.run;

    auto window_kind_name = [&]() {
        switch (base_run.window.kind) {
            case WindowSpec::Kind::First: return std::string("first");
            case WindowSpec::Kind::Mid: return std::string("mid");
            case WindowSpec::Kind::Last: return std::string("last");
            default:
                throw std::runtime_error(
                    "ablate: window axes need a first:/mid:/last: run window");
        }
    };

    if (axis == "horizon") {
        for (int h : {1, 2, 3}) {
            Point p{std::to_string(h), base_method, base_run};
            p.method.guidance.horizon = h;
            points.push_back(std::move(p));
        }
    } else if (axis == "lambda") {
        for (double l : {0.25, 0.5, 1.0}) {
            Point p{format_double(l), base_method, base_run};
            p.method.guidance.lambda = l;
            points.push_back(std::move(p));
        }
    } else if (axis == "window_pos") {
        window_kind_name();  // validates sized window
        for (const char* pos : {"first", "mid", "last"}) {
            Point p{std::string(pos) + ":" + std::to_string(base_run.window.count), base_method,
                    base_run};
            p.run.window = WindowSpec::parse(p.value);
            points.push_back(std::move(p));
        }
    } else if (axis == "window_len") {
        const std::string kind = window_kind_name();
        for (int n : {8, 16, 32}) {
            Point p{kind + ":" + std::to_string(n), base_method, base_run};
            p.run.window = WindowSpec::parse(p.value);
            points.push_back(std::move(p));
        }
    } else {
        throw std::runtime_error("ablate: unknown axis '" + axis +
                                 "' (horizon|lambda|window_pos|window_len)");
    }

    std::filesystem::create_directories(cfg.run.out_dir);
    const std::string path = cfg.run.out_dir + "/ablate_" + axis + ".csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "axis,value,method,reward_mean,reward_stderr,calls_per_sample\n";
    for (Point& p : points) {
        const KmerDistribution reference = reference_kmers(ctx, p.run);
        const MethodOutput mo = run_method(ctx, p.method, p.run, reference);
        out << axis << "," << p.value << "," << mo.method.name << ","
            << format_double(mo.reward_mean) << "," << format_double(mo.reward_stderr) << ","
            << format_double(mo.calls) << "\n";
    }
    return path;
}

namespace {

struct ReplayedSample {
    Sequence initial;
    std::vector<EditAction> edits;
    std::vector<bool> guided;
};

std::vector<ReplayedSample> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<ReplayedSample> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        ReplayedSample rs;
        rs.initial = Sequence(j.at("initial_sequence").get<std::string>());
        const auto& edits = j.at("edits");
        rs.edits.reserve(edits.size());
        for (const auto& e : edits) rs.edits.push_back(parse_action(e.get<std::string>()));
        rs.guided.assign(rs.edits.size(), false);
        for (const auto& g : j.at("guided_steps")) {
            const std::size_t t = g.get<std::size_t>();
            if (t < rs.guided.size()) rs.guided[t] = true;
        }
        out.push_back(std::move(rs));
    }
    return out;
}

}  // namespace

std::string diagnose_run(const std::string& run_dir, std::size_t max_root_instances,
                         std::size_t max_local_instances) {
    std::ifstream mf(run_dir + "/manifest.json");
    if (!mf) throw std::runtime_error("diagnose: cannot read " + run_dir + "/manifest.json");
    json manifest;
    mf >> manifest;
    const ExperimentConfig cfg = ExperimentConfig::from_json(manifest.at("config"));
    const TaskContext ctx = build_task(cfg.task);

    const auto lpdp_it = std::find_if(cfg.methods.begin(), cfg.methods.end(),
                                      [](const MethodConfig& m) { return m.type == "lpdp"; });
    if (lpdp_it == cfg.methods.end()) {
        throw std::runtime_error("diagnose: run has no lpdp method block");
    }
    const GuidanceConfig gcfg = lpdp_it->guidance;

    // replay recorded trajectories, collecting states at guided steps
    std::vector<RootInstance> roots;
    std::vector<LocalInstance> locals;
    for (const MethodConfig& m : cfg.methods) {
        const std::string path = run_dir + "/" + m.name + ".jsonl";
        if (!std::filesystem::exists(path)) continue;
        for (const ReplayedSample& rs : read_jsonl(path)) {
            Sequence x = rs.initial;
            for (std::size_t t = 0; t < rs.edits.size(); ++t) {
                const Sequence child = apply_edit(x, rs.edits[t]);
                if (rs.guided[t]) {
                    if (roots.size() < max_root_instances) {
                        roots.push_back(RootInstance{x, static_cast<int>(t)});
                    }
                    if (locals.size() < max_local_instances) {
                        locals.push_back(
                            LocalInstance{child, rs.edits[t], static_cast<int>(t)});
                    }
                }
                x = child;
            }
        }
    }
    if (roots.empty() || locals.empty()) {
        throw std::runtime_error("diagnose: no replayable guided steps in " + run_dir);
    }

    CachedOracle oracle(ctx.oracle);
    const std::string path = run_dir + "/diagnostics.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "diagnostic,rule,backup,value,instances\n";
    for (CandidateRule rule :
         {CandidateRule::Mixed, CandidateRule::StAfter, CandidateRule::StFirst}) {
        const RuleDiagnostics d =
            aggregate_diagnostics(rule, locals, roots, gcfg, *ctx.model, oracle, ctx.space);
        const std::string rname{to_string(rule)};
        out << "cand_ratio," << rname << ",," << format_double(d.cand_ratio) << ","
            << d.local_instances << "\n";
        out << "path_ratio," << rname << ",," << format_double(d.path_ratio) << ","
            << d.local_instances << "\n";
        out << "mixed_rank_tail," << rname << ",," << format_double(d.mixed_rank_tail) << ","
            << d.local_instances << "\n";
        out << "mass_eff," << rname << ",,"
            << (d.mass_eff ? format_double(*d.mass_eff) : std::string()) << ","
            << d.local_instances << "\n";
        out << "top1_agreement," << rname << ",max," << format_double(d.top1_agreement_max) << ","
            << d.root_instances << "\n";
        out << "top1_agreement," << rname << ",lse," << format_double(d.top1_agreement_lse) << ","
            << d.root_instances << "\n";
    }
    return path;
}

}  // namespace lpdp
