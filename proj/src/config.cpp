#include "lpdp/config.hpp"

#include <fstream>
#include <limits>
#include <stdexcept>

namespace lpdp {

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
    throw std::runtime_error("config error at " + path + ": " + what);
}

// Cursor into a json document carrying its field path for error messages.
class View {
  public:
    View(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

    const std::string& path() const { return path_; }
    const json& raw() const { return *j_; }

    bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

    View child(const std::string& key) const {
        if (!j_->is_object()) config_fail(path_, "expected an object");
        if (!j_->contains(key)) config_fail(path_ + "." + key, "missing required field");
        return View((*j_)[key], path_ + "." + key);
    }

    std::optional<View> maybe(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return View((*j_)[key], path_ + "." + key);
    }

    std::string as_string() const {
        if (!j_->is_string()) config_fail(path_, "expected a string");
        return j_->get<std::string>();
    }

    double as_double() const {
        if (!j_->is_number()) config_fail(path_, "expected a number");
        return j_->get<double>();
    }

    int as_int() const {
        if (!j_->is_number_integer()) config_fail(path_, "expected an integer");
        return j_->get<int>();
    }

    long as_long() const {
        if (!j_->is_number_integer()) config_fail(path_, "expected an integer");
        return j_->get<long>();
    }

    std::size_t as_size() const {
        if (!j_->is_number_unsigned() && !(j_->is_number_integer() && j_->get<long long>() >= 0)) {
            config_fail(path_, "expected a nonnegative integer");
        }
        return j_->get<std::size_t>();
    }

    std::uint64_t as_u64() const {
        if (!j_->is_number_unsigned() && !(j_->is_number_integer() && j_->get<long long>() >= 0)) {
            config_fail(path_, "expected a nonnegative integer");
        }
        return j_->get<std::uint64_t>();
    }

    bool as_bool() const {
        if (!j_->is_boolean()) config_fail(path_, "expected a boolean");
        return j_->get<bool>();
    }

    std::size_t array_size() const {
        if (!j_->is_array()) config_fail(path_, "expected an array");
        return j_->size();
    }

    View at(std::size_t i) const {
        return View((*j_)[i], path_ + "[" + std::to_string(i) + "]");
    }

  private:
    const json* j_;
    std::string path_;
};

template <typename T, typename F>
T get_or(const View& v, const std::string& key, T def, F convert) {
    if (const auto c = v.maybe(key)) return convert(*c);
    return def;
}

double get_double(const View& v, const std::string& key, double def) {
    return get_or(v, key, def, [](const View& c) { return c.as_double(); });
}
int get_int(const View& v, const std::string& key, int def) {
    return get_or(v, key, def, [](const View& c) { return c.as_int(); });
}
std::string get_string(const View& v, const std::string& key, std::string def) {
    return get_or(v, key, std::move(def), [](const View& c) { return c.as_string(); });
}

std::vector<std::array<double, 4>> parse_matrix(const View& v) {
    std::vector<std::array<double, 4>> rows;
    for (std::size_t i = 0; i < v.array_size(); ++i) {
        const View row = v.at(i);
        if (row.array_size() != 4) config_fail(row.path(), "expected four probabilities");
        std::array<double, 4> r{};
        for (std::size_t j = 0; j < 4; ++j) r[j] = row.at(j).as_double();
        rows.push_back(r);
    }
    return rows;
}

WindowSpec parse_window(const View& v) {
    if (v.raw().is_string()) return WindowSpec::parse(v.as_string());
    if (v.raw().is_array()) {
        std::vector<int> idx;
        for (std::size_t i = 0; i < v.array_size(); ++i) idx.push_back(v.at(i).as_int());
        return WindowSpec::from_indices(std::move(idx));
    }
    config_fail(v.path(), "expected a window string or an index array");
}

ModelConfig parse_model(const View& v) {
    ModelConfig m;
    m.name = v.child("name").as_string();
    if (m.name == "uniform") return m;
    if (m.name == "drift") {
        m.drift.w_sub = get_double(v, "w_sub", 0.0);
        m.drift.w_ins = get_double(v, "w_ins", 0.0);
        m.drift.w_del = get_double(v, "w_del", 0.0);
        m.drift.gain = get_double(v, "gain", 0.0);
        m.drift.target_length =
            get_or(v, "target_length", std::size_t{32}, [](const View& c) { return c.as_size(); });
        return m;
    }
    config_fail(v.child("name").path(), "unknown model '" + m.name + "' (uniform|drift)");
}

OracleConfig parse_oracle(const View& v) {
    OracleConfig o;
    o.name = v.child("name").as_string();
    if (o.name == "substring_count") {
        o.pattern = get_string(v, "pattern", "GT");
    } else if (o.name == "pwm") {
        o.mode = get_string(v, "mode", "best-window");
        if (const auto m = v.maybe("matrix")) o.matrix = parse_matrix(*m);
        o.file = get_string(v, "file", "");
        if (o.matrix.empty() && o.file.empty()) {
            config_fail(v.path(), "pwm oracle needs 'matrix' or 'file'");
        }
    } else if (o.name == "splice_toy") {
        if (const auto m = v.maybe("donor_matrix")) o.donor_matrix = parse_matrix(*m);
        if (const auto m = v.maybe("acceptor_matrix")) o.acceptor_matrix = parse_matrix(*m);
        o.donor_file = get_string(v, "donor_file", "");
        o.acceptor_file = get_string(v, "acceptor_file", "");
        if (o.donor_matrix.empty() && o.donor_file.empty()) {
            config_fail(v.path(), "splice_toy oracle needs 'donor_matrix' or 'donor_file'");
        }
        if (o.acceptor_matrix.empty() && o.acceptor_file.empty()) {
            config_fail(v.path(), "splice_toy oracle needs 'acceptor_matrix' or 'acceptor_file'");
        }
        o.donor_index =
            get_or(v, "donor_index", std::size_t{0}, [](const View& c) { return c.as_size(); });
        o.acceptor_index =
            get_or(v, "acceptor_index", std::size_t{0}, [](const View& c) { return c.as_size(); });
    } else {
        config_fail(v.child("name").path(),
                    "unknown oracle '" + o.name + "' (substring_count|pwm|splice_toy)");
    }
    return o;
}

InitConfig parse_init(const View& v) {
    InitConfig init;
    init.kind = v.child("kind").as_string();
    if (init.kind == "literal") {
        init.sequence = v.child("sequence").as_string();
    } else if (init.kind == "random") {
        init.length = v.child("length").as_size();
    } else if (init.kind == "inpaint") {
        init.left = v.child("left").as_string();
        init.right = v.child("right").as_string();
        if (v.has("middle")) {
            init.middle = v.child("middle").as_string();
        } else if (v.has("middle_length")) {
            init.middle_length = v.child("middle_length").as_size();
        } else {
            config_fail(v.path(), "inpaint init needs 'middle' or 'middle_length'");
        }
    } else {
        config_fail(v.child("kind").path(),
                    "unknown init kind '" + init.kind + "' (literal|random|inpaint)");
    }
    return init;
}

GuidanceConfig parse_guidance(const View& v) {
    GuidanceConfig g;
    g.beta = get_double(v, "beta", g.beta);
    g.delta = get_double(v, "delta", g.delta);
    g.k_root = get_int(v, "k_root", g.k_root);
    g.radius = get_or(v, "radius", g.radius, [](const View& c) { return c.as_long(); });
    g.k_loc = get_int(v, "k_loc", g.k_loc);
    g.horizon = get_int(v, "horizon", g.horizon);
    g.lambda = get_double(v, "lambda", g.lambda);
    g.tau = get_double(v, "tau", g.tau);
    g.gamma = get_double(v, "gamma", g.gamma);
    g.rule = candidate_rule_from_string(get_string(v, "rule", "mixed"));
    g.backup = backup_kind_from_string(get_string(v, "backup", "max"));
    g.advance_local_time =
        get_or(v, "advance_local_time", false, [](const View& c) { return c.as_bool(); });
    return g;
}

MethodConfig parse_method(const View& v) {
    MethodConfig m;
    m.type = v.child("type").as_string();
    m.name = get_string(v, "name", m.type);
    m.beta = get_double(v, "beta", 20.0);
    if (m.type == "lpdp") {
        m.guidance = parse_guidance(v);
        try {
            validate_config(m.guidance);
        } catch (const std::exception& e) {
            config_fail(v.path(), e.what());
        }
    } else if (m.type == "raw") {
        // nothing further
    } else if (m.type == "beam") {
        m.beam.width = get_int(v, "width", m.beam.width);
        m.beam.depth = get_int(v, "depth", m.beam.depth);
    } else if (m.type == "cem") {
        m.cem.population = get_int(v, "population", m.cem.population);
        m.cem.elites = get_int(v, "elites", m.cem.elites);
        m.cem.rounds = get_int(v, "rounds", m.cem.rounds);
    } else if (m.type == "smc") {
        m.smc.particles = get_int(v, "particles", m.smc.particles);
        m.smc.depth = get_int(v, "depth", m.smc.depth);
        m.smc.proposal_top_k = get_int(v, "proposal_top_k", m.smc.proposal_top_k);
    } else if (m.type == "tds") {
        m.tds.temperature = get_double(v, "temperature", m.tds.temperature);
        m.tds.support_top_k = get_int(v, "support_top_k", m.tds.support_top_k);
    } else {
        config_fail(v.child("type").path(),
                    "unknown method type '" + m.type + "' (lpdp|raw|beam|cem|smc|tds)");
    }
    if (const auto w = v.maybe("window")) m.window = parse_window(*w);
    return m;
}

RunConfig parse_run(const View& v) {
    RunConfig r;
    r.samples = get_int(v, "samples", r.samples);
    r.total_steps = get_int(v, "total_steps", r.total_steps);
    if (const auto w = v.maybe("window")) r.window = parse_window(*w);
    r.seed = get_or(v, "seed", r.seed, [](const View& c) { return c.as_u64(); });
    r.cache_mode = get_string(v, "cache", r.cache_mode);
    if (r.cache_mode != "per_sample" && r.cache_mode != "shared") {
        config_fail(v.path() + ".cache", "expected per_sample|shared");
    }
    r.out_dir = get_string(v, "out", r.out_dir);
    r.workers = get_int(v, "workers", r.workers);
    if (r.samples < 1) config_fail(v.path() + ".samples", "must be >= 1");
    if (r.total_steps < 0) config_fail(v.path() + ".total_steps", "must be >= 0");
    if (r.workers < 1) config_fail(v.path() + ".workers", "must be >= 1");
    return r;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    const View root(j, "$");
    ExperimentConfig cfg;

    const View task = root.child("task");
    cfg.task.model = parse_model(task.child("model"));
    cfg.task.oracle = parse_oracle(task.child("oracle"));
    if (const auto b = task.maybe("bounds")) {
        cfg.task.bounds.min_len =
            get_or(*b, "min_len", std::size_t{1}, [](const View& c) { return c.as_size(); });
        cfg.task.bounds.max_len =
            get_or(*b, "max_len", std::size_t{512}, [](const View& c) { return c.as_size(); });
    }
    try {
        validate_bounds(cfg.task.bounds);
    } catch (const std::exception& e) {
        config_fail("$.task.bounds", e.what());
    }
    cfg.task.init = parse_init(task.child("init"));

    const View methods = root.child("methods");
    const std::size_t n = methods.array_size();
    if (n == 0) config_fail("$.methods", "at least one method block required");
    for (std::size_t i = 0; i < n; ++i) {
        cfg.methods.push_back(parse_method(methods.at(i)));
    }
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
        for (std::size_t j = i + 1; j < cfg.methods.size(); ++j) {
            if (cfg.methods[i].name == cfg.methods[j].name) {
                config_fail("$.methods[" + std::to_string(j) + "].name",
                            "duplicate method name '" + cfg.methods[j].name + "'");
            }
        }
    }

    if (const auto r = root.maybe("run")) {
        cfg.run = parse_run(*r);
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error("config file " + path + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

namespace {

json matrix_to_json(const std::vector<std::array<double, 4>>& m) {
    json rows = json::array();
    for (const auto& r : m) rows.push_back(json{r[0], r[1], r[2], r[3]});
    return rows;
}

}  // namespace

json ExperimentConfig::to_json() const {
    json j;
    json model{{"name", task.model.name}};
    if (task.model.name == "drift") {
        model["w_sub"] = task.model.drift.w_sub;
        model["w_ins"] = task.model.drift.w_ins;
        model["w_del"] = task.model.drift.w_del;
        model["gain"] = task.model.drift.gain;
        model["target_length"] = task.model.drift.target_length;
    }
    json oracle{{"name", task.oracle.name}};
    if (task.oracle.name == "substring_count") {
        oracle["pattern"] = task.oracle.pattern;
    } else if (task.oracle.name == "pwm") {
        oracle["mode"] = task.oracle.mode;
        if (!task.oracle.matrix.empty()) oracle["matrix"] = matrix_to_json(task.oracle.matrix);
        if (!task.oracle.file.empty()) oracle["file"] = task.oracle.file;
    } else if (task.oracle.name == "splice_toy") {
        if (!task.oracle.donor_matrix.empty()) {
            oracle["donor_matrix"] = matrix_to_json(task.oracle.donor_matrix);
        }
        if (!task.oracle.acceptor_matrix.empty()) {
            oracle["acceptor_matrix"] = matrix_to_json(task.oracle.acceptor_matrix);
        }
        if (!task.oracle.donor_file.empty()) oracle["donor_file"] = task.oracle.donor_file;
        if (!task.oracle.acceptor_file.empty()) {
            oracle["acceptor_file"] = task.oracle.acceptor_file;
        }
        oracle["donor_index"] = task.oracle.donor_index;
        oracle["acceptor_index"] = task.oracle.acceptor_index;
    }
    json init{{"kind", task.init.kind}};
    if (task.init.kind == "literal") init["sequence"] = task.init.sequence;
    if (task.init.kind == "random") init["length"] = task.init.length;
    if (task.init.kind == "inpaint") {
        init["left"] = task.init.left;
        init["right"] = task.init.right;
        if (!task.init.middle.empty() || task.init.middle_length == 0) {
            init["middle"] = task.init.middle;
        } else {
            init["middle_length"] = task.init.middle_length;
        }
    }
    j["task"] = {{"model", model},
                 {"oracle", oracle},
                 {"bounds", {{"min_len", task.bounds.min_len}, {"max_len", task.bounds.max_len}}},
                 {"init", init}};

    json methods = json::array();
    for (const MethodConfig& m : this->methods) {
        json mj{{"name", m.name}, {"type", m.type}};
        if (m.type == "lpdp") {
            mj["beta"] = m.guidance.beta;
            mj["delta"] = m.guidance.delta;
            mj["k_root"] = m.guidance.k_root;
            mj["radius"] = m.guidance.radius;
            mj["k_loc"] = m.guidance.k_loc;
            mj["horizon"] = m.guidance.horizon;
            mj["lambda"] = m.guidance.lambda;
            mj["tau"] = m.guidance.tau;
            mj["gamma"] = m.guidance.gamma;
            mj["rule"] = std::string(to_string(m.guidance.rule));
            mj["backup"] = std::string(to_string(m.guidance.backup));
            mj["advance_local_time"] = m.guidance.advance_local_time;
        } else if (m.type == "beam") {
            mj["beta"] = m.beta;
            mj["width"] = m.beam.width;
            mj["depth"] = m.beam.depth;
        } else if (m.type == "cem") {
            mj["population"] = m.cem.population;
            mj["elites"] = m.cem.elites;
            mj["rounds"] = m.cem.rounds;
        } else if (m.type == "smc") {
            mj["beta"] = m.beta;
            mj["particles"] = m.smc.particles;
            mj["depth"] = m.smc.depth;
            mj["proposal_top_k"] = m.smc.proposal_top_k;
        } else if (m.type == "tds") {
            mj["beta"] = m.beta;
            mj["temperature"] = m.tds.temperature;
            mj["support_top_k"] = m.tds.support_top_k;
        }
        if (m.window) mj["window"] = m.window->str();
        methods.push_back(mj);
    }
    j["methods"] = methods;

    j["run"] = {{"samples", run.samples},   {"total_steps", run.total_steps},
                {"window", run.window.str()}, {"seed", run.seed},
                {"cache", run.cache_mode},  {"out", run.out_dir},
                {"workers", run.workers}};
    return j;
}

std::shared_ptr<const ProposalModel> make_model(const ModelConfig& cfg) {
    if (cfg.name == "uniform") return std::make_shared<UniformProposal>();
    if (cfg.name == "drift") return std::make_shared<DriftProposal>(cfg.drift);
    throw std::runtime_error("unknown model '" + cfg.name + "'");
}

std::shared_ptr<const RewardOracle> make_oracle(const OracleConfig& cfg) {
    if (cfg.name == "substring_count") {
        return std::make_shared<SubstringCountOracle>(cfg.pattern);
    }
    if (cfg.name == "pwm") {
        Pwm pwm = cfg.matrix.empty() ? Pwm::from_file(cfg.file) : Pwm(cfg.matrix);
        PwmOracle::Mode mode;
        if (cfg.mode == "best-window") {
            mode = PwmOracle::Mode::BestWindow;
        } else if (cfg.mode == "sum-windows") {
            mode = PwmOracle::Mode::SumWindows;
        } else {
            throw std::runtime_error("unknown pwm mode '" + cfg.mode +
                                     "' (best-window|sum-windows)");
        }
        return std::make_shared<PwmOracle>(std::move(pwm), mode);
    }
    if (cfg.name == "splice_toy") {
        Pwm donor = cfg.donor_matrix.empty() ? Pwm::from_file(cfg.donor_file)
                                             : Pwm(cfg.donor_matrix);
        Pwm acceptor = cfg.acceptor_matrix.empty() ? Pwm::from_file(cfg.acceptor_file)
                                                   : Pwm(cfg.acceptor_matrix);
        return std::make_shared<SpliceToyOracle>(std::move(donor), std::move(acceptor),
                                                 cfg.donor_index, cfg.acceptor_index);
    }
    throw std::runtime_error("unknown oracle '" + cfg.name + "'");
}

TaskContext build_task(const TaskConfig& cfg) {
    TaskContext ctx;
    ctx.model = make_model(cfg.model);
    ctx.oracle = make_oracle(cfg.oracle);
    ctx.space.bounds = cfg.bounds;
    ctx.init = cfg.init;
    if (cfg.init.kind == "inpaint") {
        ctx.space.frozen_prefix = cfg.init.left.size();
        ctx.space.frozen_suffix = cfg.init.right.size();
    }
    return ctx;
}

namespace {

std::string random_bases(std::size_t n, Rng& rng) {
    static constexpr char kBases[] = {'A', 'C', 'G', 'T'};
    std::string s;
    s.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        s += kBases[rng.next() % 4];
    }
    return s;
}

}  // namespace

Sequence make_initial_sequence(const InitConfig& init, const ActionSpace& space, Rng& rng) {
    std::string s;
    if (init.kind == "literal") {
        s = init.sequence;
    } else if (init.kind == "random") {
        s = random_bases(init.length, rng);
    } else if (init.kind == "inpaint") {
        const std::string middle =
            init.middle.empty() && init.middle_length > 0 ? random_bases(init.middle_length, rng)
                                                          : init.middle;
        s = init.left + middle + init.right;
    } else {
        throw std::runtime_error("unknown init kind '" + init.kind + "'");
    }
    Sequence x(std::move(s));
    validate_sequence(x, space);
    return x;
}

}  // namespace lpdp
