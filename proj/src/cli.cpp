#include "parq/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "parq/parallel.hpp"

namespace parq {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config

void validate(const RunConfig& cfg) {
    for (std::size_t h : cfg.horizons) {
        if (h == 0) throw std::invalid_argument("horizons: every horizon must be positive");
    }
    if (cfg.replications && *cfg.replications == 0) throw std::invalid_argument("replications: must be positive");
    if (cfg.truncation == 0) throw std::invalid_argument("truncation: must be positive");
    if (!(cfg.tolerance >= 0.0)) throw std::invalid_argument("tolerance: must be >= 0");
    if (cfg.stall_window && *cfg.stall_window == 0) throw std::invalid_argument("stall_window: must be positive");
    if (cfg.servers && *cfg.servers < 1) throw std::invalid_argument("servers: must be positive");
    if (cfg.p && *cfg.p < 1) throw std::invalid_argument("p: must be positive");
    if (cfg.output_dir.empty()) throw std::invalid_argument("output_dir: must not be empty");
}

json config_to_json(const RunConfig& cfg) {
    json j = {{"model", model_to_json(cfg.model)},
              {"horizons", cfg.horizons},
              {"seed", cfg.seed},
              {"truncation", cfg.truncation},
              {"tolerance", real_to_json(cfg.tolerance)},
              {"output_dir", cfg.output_dir},
              {"start", cfg.start},
              {"trace", cfg.trace},
              {"threads", cfg.threads}};
    if (cfg.policy) j["policy"] = *cfg.policy;
    if (cfg.replications) j["replications"] = *cfg.replications;
    if (cfg.burn_in) j["burn_in"] = *cfg.burn_in;
    if (cfg.servers) j["servers"] = *cfg.servers;
    if (cfg.p) j["p"] = *cfg.p;
    if (cfg.stall_window) j["stall_window"] = *cfg.stall_window;
    return j;
}

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    RunConfig cfg;
    using Setter = std::function<void(const json&)>;
    const std::map<std::string, Setter> setters{
        {"model", [&](const json& v) { cfg.model = model_from_json(v); }},
        {"policy", [&](const json& v) { cfg.policy = Policy::parse(v.get<std::string>()); }},
        {"horizons",
         [&](const json& v) {
             cfg.horizons = v.is_array() ? v.get<std::vector<std::size_t>>()
                                         : std::vector<std::size_t>{v.get<std::size_t>()};
         }},
        {"replications", [&](const json& v) { cfg.replications = v.get<std::size_t>(); }},
        {"burn_in", [&](const json& v) { cfg.burn_in = v.get<std::size_t>(); }},
        {"seed", [&](const json& v) { cfg.seed = v.get<std::uint64_t>(); }},
        {"truncation", [&](const json& v) { cfg.truncation = v.get<std::size_t>(); }},
        {"tolerance", [&](const json& v) { cfg.tolerance = real_from_json(v); }},
        {"output_dir", [&](const json& v) { cfg.output_dir = v.get<std::string>(); }},
        {"start", [&](const json& v) { cfg.start = v.get<std::int64_t>(); }},
        {"servers", [&](const json& v) { cfg.servers = v.get<int>(); }},
        {"p", [&](const json& v) { cfg.p = v.get<int>(); }},
        {"stall_window", [&](const json& v) { cfg.stall_window = v.get<std::size_t>(); }},
        {"trace", [&](const json& v) { cfg.trace = v.get<bool>(); }},
        {"threads", [&](const json& v) { cfg.threads = v.get<unsigned>(); }},
    };
    for (const auto& [key, value] : j.items()) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw std::invalid_argument("config: unknown field '" + key + "'");
        try {
            // negative numbers would wrap silently in unsigned fields
            if (value.is_number_integer() && !value.is_number_unsigned() && value.get<long long>() < 0 &&
                key != "start") {
                throw std::invalid_argument("must not be negative");
            }
            it->second(value);
        } catch (const std::exception& e) {
            throw std::invalid_argument("config field '" + key + "': " + e.what());
        }
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot read '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct Context {
    const RunConfig& cfg;
    std::ostream& out;
    std::ostream& err;
    std::vector<std::string> artifacts;

    void write(const std::string& name, const std::string& text) {
        const fs::path path = fs::path(cfg.output_dir) / name;
        std::ofstream f(path, std::ios::binary);
        f << text;
        if (!f) throw std::runtime_error("cannot write " + path.string());
        artifacts.push_back(name);
    }
    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
};

std::size_t horizon_or(const RunConfig& cfg, std::size_t fallback) {
    return cfg.horizons.empty() ? fallback : cfg.horizons.back();
}

const CyclicSpace* cyclic(const RunConfig& cfg) { return std::get_if<CyclicSpace>(&cfg.model); }

std::string show(const Profile<double>& u) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < u.size(); ++i) s += (i ? ", " : "") + format_double(u(i));
    return s + ")";
}

std::string show(const Profile<Rational>& u) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < u.size(); ++i) s += (i ? ", " : "") + format_rational(u(i));
    return s + ")";
}

int cmd_simulate(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const Policy policy = cfg.policy.value_or(Policy::jsw(2));
    const std::size_t h = horizon_or(cfg, 1000);
    const MarkedPath<double> path = cyclic(cfg) ? unroll<double>(*cyclic(cfg), cfg.start, h)
                                                : sample_path(std::get<GiGiModel>(cfg.model), h, cfg.seed);
    const auto traj = forward_simulate(policy, zero_profile<double>(policy.dimension()), path);
    std::ostringstream a, b;
    write_trajectory_csv(a, traj.profiles);
    write_path_csv(b, path);
    ctx.write("trajectory.csv", a.str());
    ctx.write("path.csv", b.str());
    ctx.out << "simulate: " << policy.to_string() << " for " << h << " steps, final profile "
            << show(traj.profiles.back()) << "\n";
    return kExitOk;
}

int cmd_loynes(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const Policy policy = cfg.policy.value_or(Policy::jsw(2));
    const std::size_t h = horizon_or(cfg, 1000);
    json j;
    bool converged = false;
    std::string limit = "none";
    if (const auto* space = cyclic(cfg)) {
        const auto r = loynes_iterate(policy, *space, cfg.start, h);
        j = loynes_to_json(r);
        converged = r.converged;
        if (r.limit) limit = show(*r.limit);
    } else {
        const auto path = sample_backward_path(std::get<GiGiModel>(cfg.model), h, cfg.seed);
        const auto r = loynes_iterate<double>(policy, path, h, cfg.tolerance, cfg.stall_window.value_or(10));
        j = loynes_to_json(r);
        converged = r.converged;
        if (r.limit) limit = show(*r.limit);
    }
    ctx.write_json("loynes.json", j);
    ctx.out << "loynes: " << policy.to_string() << (converged ? " converged" : " did not converge") << " after "
            << j.at("horizon_used") << " steps, limit " << limit << "\n";
    return kExitOk;
}

int resolve_p(const RunConfig& cfg) {
    if (cfg.p) return *cfg.p;
    if (cfg.policy && cfg.policy->p > 0) return cfg.policy->p;
    return 1;
}

int cmd_zstats(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const int p = resolve_p(cfg);
    if (static_cast<std::size_t>(p) > cfg.truncation) throw std::invalid_argument("truncation: must be >= p");
    json reps = json::array();
    json summary;
    if (const auto* space = cyclic(cfg)) {
        const auto path = backward_path<Rational>(*space, cfg.start, cfg.truncation);
        const auto z = compute_zvector(path, p, cfg.truncation, 0);
        reps.push_back(zvector_to_json(z));
        summary = {{"z_p_positive", z.values(0) > 0}, {"tail_bound_failures", z.tail_bound_ok ? 0 : 1}};
        ctx.out << "zstats: exact (Z_" << p << "..Z_1) = " << show(z.values) << "\n";
    } else {
        const auto& model = std::get<GiGiModel>(cfg.model);
        const std::size_t n = cfg.replications.value_or(100);
        std::vector<ZVector<double>> zs(n);
        parallel_for(
            n,
            [&](std::size_t r) {
                const auto path = sample_backward_path(model, cfg.truncation, replication_seed(cfg.seed, r));
                zs[r] = compute_zvector(path, p, cfg.truncation, 0);
            },
            cfg.threads);
        std::size_t positive = 0, failures = 0;
        json means = json::array();
        for (Eigen::Index i = 0; i < p; ++i) {
            std::vector<double> xs;
            for (const auto& z : zs) xs.push_back(z.values(i));
            means.push_back(n >= 2 ? mean_estimate(xs) : Estimate{xs.front(), 0.0, 1});
        }
        for (const auto& z : zs) {
            reps.push_back(zvector_to_json(z));
            positive += z.values(0) > 0 ? 1 : 0;
            failures += z.tail_bound_ok ? 0 : 1;
        }
        const Estimate pos = proportion_estimate(positive, n);
        summary = {{"mean", means}, {"z_p_positive", pos}, {"tail_bound_failures", failures}};
        ctx.out << "zstats: P(Z_" << p << " > 0) = " << format_double(pos.value) << " +- "
                << format_double(pos.half_width) << " over " << n << " replications, " << failures
                << " tail-bound failures\n";
    }
    ctx.write_json("zstats.json", {{"p", p},
                                   {"model", model_to_json(cfg.model)},
                                   {"truncation", cfg.truncation},
                                   {"seed", cfg.seed},
                                   {"replications", reps},
                                   {"summary", summary}});
    return kExitOk;
}

std::pair<int, int> resolve_jpsw(const RunConfig& cfg) {
    int s = cfg.servers.value_or(2);
    int p = cfg.p.value_or(1);
    if (cfg.policy) {
        if (cfg.policy->kind != Policy::Kind::jpsw) {
            throw std::invalid_argument("policy: stability needs a jpsw:S:p policy, got " + cfg.policy->to_string());
        }
        if ((cfg.servers && *cfg.servers != cfg.policy->servers) || (cfg.p && *cfg.p != cfg.policy->p)) {
            throw std::invalid_argument("policy: " + cfg.policy->to_string() + " disagrees with servers/p");
        }
        s = cfg.policy->servers;
        p = cfg.policy->p;
    }
    return {s, p};
}

int cmd_stability(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const auto [s, p] = resolve_jpsw(cfg);
    McParams mc;
    mc.replications = cfg.replications.value_or(mc.replications);
    mc.truncation = cfg.truncation;
    mc.horizon = horizon_or(cfg, mc.horizon);
    mc.burn_in = cfg.burn_in;
    mc.seed = cfg.seed;
    mc.threads = cfg.threads;
    const StabilityReport rep = check_jpsw_conditions(cfg.model, s, p, mc);
    ctx.write_json("stability.json", rep);
    ctx.write("stability.txt", format_table(rep));

    const auto grid =
        cfg.horizons.size() > 1 ? cfg.horizons : doubling_grid(std::max<std::size_t>(1, mc.horizon / 64), mc.horizon);
    const auto tight = tightness_probe(Policy::jpsw(s, p), cfg.model, grid, derive_seed(cfg.seed, 2));
    std::ostringstream tsv;
    write_tightness_tsv(tsv, tight);
    ctx.write_json("tightness.json", tight);
    ctx.write("tightness.tsv", tsv.str());
    ctx.out << "stability: " << Policy::jpsw(s, p).to_string() << " jsw=" << (rep.jsw.holds ? "yes" : "no")
            << " jpsw=" << (rep.jpsw_condition ? "yes" : "no") << " tightness=" << tight.verdict << "\n";
    return kExitOk;
}

OrbitOptions orbit_options(const RunConfig& cfg, std::ostringstream& trace) {
    OrbitOptions opts;
    if (cfg.trace) opts.trace = &trace;
    return opts;
}

int cmd_fixed_point(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const auto* space = cyclic(cfg);
    if (!space) throw std::invalid_argument("model: fixed-point needs a cyclic space");
    const Policy policy = cfg.policy.value_or(Policy::jpsw(2, 1));
    std::ostringstream trace;
    const auto rep = find_cycle_fixed_points(policy, *space, orbit_options(cfg, trace));
    ctx.write_json("fixed_point.json", rep);
    if (cfg.trace) ctx.write("fixed_point_trace.txt", trace.str());
    ctx.out << "fixed-point: " << policy.to_string() << " verdict " << to_string(rep.verdict) << " ("
            << rep.pieces << " pieces, " << rep.pieces_examined << " examined)\n";
    return kExitOk;
}

int cmd_counterexample(Context& ctx) {
    std::ostringstream trace;
    const auto c = verify_counterexample(orbit_options(ctx.cfg, trace));
    ctx.write_json("counterexample.json", c);
    if (ctx.cfg.trace) ctx.write("counterexample_trace.txt", trace.str());
    ctx.out << "counterexample: " << c.jpsw.policy.to_string() << " verdict " << to_string(c.jpsw.verdict) << ", "
            << c.jsw.policy.to_string() << " verdict " << to_string(c.jsw.verdict) << ", E sigma = "
            << format_rational(c.mean_sigma) << (c.reproduced ? ", reproduced\n" : ", NOT reproduced\n");
    for (const auto& f : c.failures) ctx.err << "counterexample: " << f << "\n";
    return c.reproduced ? kExitOk : kExitFailed;
}

int cmd_loss(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    int p = cfg.p.value_or(1);
    if (cfg.policy) {
        if (cfg.policy->kind != Policy::Kind::loss) {
            throw std::invalid_argument("policy: loss needs a loss:p policy, got " + cfg.policy->to_string());
        }
        if (cfg.p && *cfg.p != cfg.policy->p) {
            throw std::invalid_argument("policy: " + cfg.policy->to_string() + " disagrees with p");
        }
        p = cfg.policy->p;
    }
    const int s = cfg.servers.value_or(p + 1);
    const std::size_t h = horizon_or(cfg, 100000);
    LossEstimate loss;
    double es = 0.0, et = 0.0;
    if (const auto* space = cyclic(cfg)) {
        loss = estimate_loss_probability(*space, p, h, cfg.burn_in);
        es = scalar_cast<double>(space->mean_sigma());
        et = scalar_cast<double>(space->mean_tau());
    } else {
        const auto& model = std::get<GiGiModel>(cfg.model);
        loss = estimate_loss_probability(model, p, h, cfg.burn_in, cfg.seed, cfg.replications.value_or(8),
                                         cfg.threads);
        es = model.mean_sigma();
        et = model.mean_tau();
    }
    const auto split = splitting_comparison(loss.probability.value, es, et, s, p);
    ctx.write_json("loss.json", {{"model", model_to_json(cfg.model)},
                                 {"S", s},
                                 {"mean_sigma", real_to_json(es)},
                                 {"mean_tau", real_to_json(et)},
                                 {"loss_prob", loss},
                                 {"splitting", split},
                                 {"seed", cfg.seed}});
    ctx.out << "loss: P(loss, " << p << " servers) = " << format_double(loss.probability.value) << " +- "
            << format_double(loss.probability.half_width) << "; loss/E tau = " << format_double(split.lhs)
            << (split.holds ? " < " : " >= ") << "(S-p)/E sigma = " << format_double(split.rhs) << "\n";
    return kExitOk;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    static const std::map<std::string, int (*)(Context&)> commands{
        {"simulate", cmd_simulate},   {"loynes", cmd_loynes},
        {"zstats", cmd_zstats},       {"stability", cmd_stability},
        {"fixed-point", cmd_fixed_point}, {"counterexample", cmd_counterexample},
        {"loss", cmd_loss},
    };
    const auto it = commands.find(command);
    if (it == commands.end()) {
        err << "error: unknown command '" << command << "'\n";
        return kExitInvalid;
    }
    Context ctx{cfg, out, err, {}};
    int code = kExitOk;
    try {
        validate(cfg);
        fs::create_directories(cfg.output_dir);
        code = it->second(ctx);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::length_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << command << " failed: " << e.what() << "\n";
        return kExitFailed;
    }
    // timestamps live here so the reports themselves stay byte-identical across reruns
    try {
        const json meta = {{"command", command},
                           {"timestamp", utc_timestamp()},
                           {"config", config_to_json(cfg)},
                           {"artifacts", ctx.artifacts},
                           {"exit_code", code}};
        std::ofstream f(fs::path(cfg.output_dir) / "run_meta.json", std::ios::binary);
        f << meta.dump(2) << "\n";
    } catch (const std::exception& e) {
        err << "error: cannot write run_meta.json: " << e.what() << "\n";
        return kExitFailed;
    }
    return code;
}

// ---------------------------------------------------------------------------
// Command line

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Workload recursions for parallel queues: simulation, Loynes schemes, stability checks"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string policy;
    std::vector<std::size_t> horizons;
    std::size_t replications = 0, burn_in = 0, truncation = 0, stall_window = 0;
    double tolerance = 0.0;
    std::string output_dir;
    std::int64_t start = 0;
    int servers = 0, p = 0;
    unsigned threads = 0;
    bool trace = false;

    auto* o_config = app.add_option("--config", config_path, "JSON config file");
    auto* o_seed = app.add_option("--seed", seed, "master seed");
    auto* o_policy = app.add_option("--policy", policy, "jsw:S | jpsw:S:p | loss:p | gamma:p | psi:p | phi:S:p");
    auto* o_horizon = app.add_option("--horizon", horizons, "horizon (repeat for a grid)");
    auto* o_reps = app.add_option("--replications", replications, "independent replications");
    auto* o_out = app.add_option("--out", output_dir, "output directory");
    auto* o_burn = app.add_option("--burn-in", burn_in, "steps dropped before loss counting");
    auto* o_trunc = app.add_option("--truncation", truncation, "lag cap K for Z statistics");
    auto* o_tol = app.add_option("--tolerance", tolerance, "Loynes increment tolerance");
    auto* o_stall = app.add_option("--stall-window", stall_window, "Loynes steps within tolerance");
    auto* o_start = app.add_option("--start", start, "sample index omega (0-based) on cyclic spaces");
    auto* o_servers = app.add_option("--servers", servers, "number of servers S");
    auto* o_p = app.add_option("--p", p, "servers used by the restricted policy");
    auto* o_threads = app.add_option("--threads", threads, "worker threads (0 = all cores)");
    auto* o_trace = app.add_flag("--trace", trace, "write per-piece traces");

    for (const auto& name : command_names()) app.add_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    RunConfig cfg;
    try {
        if (o_config->count()) cfg = load_config(config_path);
        if (o_seed->count()) cfg.seed = seed;
        if (o_policy->count()) cfg.policy = Policy::parse(policy);
        if (o_horizon->count()) cfg.horizons = horizons;
        if (o_reps->count()) cfg.replications = replications;
        if (o_out->count()) cfg.output_dir = output_dir;
        if (o_burn->count()) cfg.burn_in = burn_in;
        if (o_trunc->count()) cfg.truncation = truncation;
        if (o_tol->count()) cfg.tolerance = tolerance;
        if (o_stall->count()) cfg.stall_window = stall_window;
        if (o_start->count()) cfg.start = start;
        if (o_servers->count()) cfg.servers = servers;
        if (o_p->count()) cfg.p = p;
        if (o_threads->count()) cfg.threads = threads;
        if (o_trace->count()) cfg.trace = trace;
        validate(cfg);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return run_command(app.get_subcommands().front()->get_name(), cfg, out, err);
}

}  // namespace parq
