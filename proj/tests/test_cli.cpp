#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "parq/cli.hpp"

using namespace parq;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "parq_test_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

json read_json(const fs::path& path) { return json::parse(slurp(path)); }

int cli(std::vector<std::string> args, std::string* err_text = nullptr) {
    args.insert(args.begin(), "parq");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (err_text) *err_text = err.str();
    return code;
}

}  // namespace

TEST_CASE("config round-trips losslessly") {
    RunConfig cfg;
    cfg.model = GiGiModel(Exponential{0.5}, Uniform{0.5, 1.5});
    cfg.policy = Policy::jpsw(3, 2);
    cfg.horizons = {100, 200};
    cfg.replications = 7;
    cfg.burn_in = 3;
    cfg.seed = 18446744073709551615ULL;
    cfg.tolerance = 0.1;
    cfg.start = -2;
    cfg.p = 2;
    cfg.stall_window = 4;
    cfg.trace = true;
    const json j = config_to_json(cfg);
    const RunConfig back = config_from_json(j);
    CHECK(config_to_json(back) == j);
    CHECK(back.seed == cfg.seed);
    CHECK(back.policy == cfg.policy);
    CHECK(back.tolerance == 0.1);

    CHECK(config_to_json(config_from_json(json::object())) == config_to_json(RunConfig{}));
}

TEST_CASE("invalid configs name the field") {
    auto message = [](const json& j) {
        try {
            config_from_json(j);
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message({{"horizon", 5}}).find("'horizon'") != std::string::npos);
    CHECK(message({{"tolerance", -1}}).find("tolerance") != std::string::npos);
    CHECK(message({{"replications", 0}}).find("replications") != std::string::npos);
    CHECK(message({{"seed", "x"}}).find("'seed'") != std::string::npos);
    CHECK(message({{"truncation", -3}}).find("'truncation'") != std::string::npos);
    CHECK(message({{"policy", "jsw:0"}}).find("'policy'") != std::string::npos);
    CHECK(message({{"model", {{"space", {{"cyclic", json::array()}}}}}}).find("'model'") != std::string::npos);

    const fs::path dir = scratch("invalid");
    std::ofstream(dir / "bad.json") << R"({"seedd": 1})";
    std::string err;
    CHECK(cli({"loynes", "--config", (dir / "bad.json").string(), "--out", dir.string()}, &err) == kExitInvalid);
    CHECK(err.find("seedd") != std::string::npos);
    CHECK(cli({"loynes", "--config", (dir / "missing.json").string()}, &err) == kExitInvalid);
    CHECK(cli({"nonsense"}) == kExitInvalid);
    CHECK(cli({"loynes", "--policy", "jpsw:2:5", "--out", dir.string()}) == kExitInvalid);
    CHECK(cli({"stability", "--policy", "jpsw:3:1", "--servers", "2", "--out", dir.string()}) == kExitInvalid);
    // loynes needs a monotone policy
    CHECK(cli({"loynes", "--policy", "loss:2", "--out", dir.string()}) == kExitInvalid);
}

TEST_CASE("counterexample with no config") {
    const fs::path dir = scratch("cx");
    CHECK(cli({"counterexample", "--out", dir.string()}) == kExitOk);
    const json j = read_json(dir / "counterexample.json");
    CHECK(j.at("jpsw").at("verdict") == "none");
    CHECK(j.at("jpsw").at("policy") == "jpsw:2:1");
    CHECK(j.at("mean_sigma") == "23/12");
    CHECK(j.get<CounterexampleCheck>().reproduced);
    CHECK(read_json(dir / "run_meta.json").contains("timestamp"));
}

TEST_CASE("simulate JSW(2) with zero service times") {
    const fs::path dir = scratch("sim");
    RunConfig cfg;
    cfg.model = GiGiModel(PointMass{0.0}, Exponential{1.0});
    cfg.policy = Policy::jsw(2);
    cfg.horizons = {50};
    cfg.output_dir = dir.string();
    std::ostringstream out, err;
    REQUIRE(run_command("simulate", cfg, out, err) == kExitOk);
    std::istringstream csv(slurp(dir / "trajectory.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "n,w1,w2");
    int rows = 0;
    while (std::getline(csv, line)) {
        CHECK(line == std::to_string(rows) + ",0,0");
        ++rows;
    }
    CHECK(rows == 51);
}

TEST_CASE("zstats on the counterexample from omega_1") {
    const fs::path dir = scratch("z");
    CHECK(cli({"zstats", "--p", "1", "--start", "0", "--out", dir.string()}) == kExitOk);
    const json j = read_json(dir / "zstats.json");
    const auto z = rational_zvector_from_json(j.at("replications").at(0));
    CHECK(z.values(0) == 1);
    CHECK(z.tail_bound_ok);
}

TEST_CASE("fixed-point needs a cyclic space") {
    const fs::path dir = scratch("fp");
    std::ofstream(dir / "gigi.json")
        << R"({"model": {"space": {"gigi": {"sigma": {"type": "point", "value": 1}, "tau": {"type": "point", "value": 1}}}}})";
    CHECK(cli({"fixed-point", "--config", (dir / "gigi.json").string(), "--out", dir.string()}) == kExitInvalid);
    CHECK(cli({"fixed-point", "--policy", "jsw:2", "--trace", "--out", dir.string()}) == kExitOk);
    const auto rep = read_json(dir / "fixed_point.json").get<FixedPointReport>();
    CHECK(rep.verdict == OrbitVerdict::unique);
    CHECK(slurp(dir / "fixed_point_trace.txt").find("piece 0") != std::string::npos);
}

TEST_CASE("flags override the config file") {
    const fs::path dir = scratch("override");
    std::ofstream(dir / "cfg.json") << R"({"policy": "jsw:3", "horizons": [10], "seed": 5})";
    CHECK(cli({"simulate", "--config", (dir / "cfg.json").string(), "--policy", "jsw:2", "--out", dir.string()}) ==
          kExitOk);
    const json meta = read_json(dir / "run_meta.json");
    CHECK(meta.at("config").at("policy") == "jsw:2");
    CHECK(meta.at("config").at("seed") == 5);
    CHECK(slurp(dir / "trajectory.csv").rfind("n,w1,w2\n", 0) == 0);
}

TEST_CASE("every report re-parses and reruns are byte-identical") {
    const std::string gigi =
        R"({"model": {"space": {"gigi": {"sigma": {"type": "exponential", "rate": 0.7},
           "tau": {"type": "exponential", "rate": 1}}}}, "replications": 50, "truncation": 100,
           "horizons": [2000], "seed": 11})";
    const fs::path base = scratch("rerun");
    std::ofstream(base / "gigi.json") << gigi;
    const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
        {"simulate", {"simulate", "--policy", "jpsw:3:1"}},
        {"loynes", {"loynes", "--policy", "psi:2", "--tolerance", "1e-12"}},
        {"zstats", {"zstats", "--p", "2"}},
        {"stability", {"stability", "--servers", "3", "--p", "1"}},
        {"loss", {"loss", "--p", "2", "--servers", "3"}},
    };
    for (const auto& [name, args] : runs) {
        CAPTURE(name);
        std::vector<fs::path> dirs;
        for (const char* tag : {"a", "b"}) {
            const fs::path dir = base / (name + tag);
            auto full = args;
            for (const std::string& extra : {std::string("--config"), (base / "gigi.json").string(),
                                             std::string("--out"), dir.string(), std::string("--threads"),
                                             std::string(*tag == 'a' ? "1" : "4")}) {
                full.push_back(extra);
            }
            REQUIRE(cli(full) == kExitOk);
            dirs.push_back(dir);
        }
        const json meta = read_json(dirs[0] / "run_meta.json");
        for (const auto& artifact : meta.at("artifacts")) {
            const std::string file = artifact.get<std::string>();
            CAPTURE(file);
            CHECK(slurp(dirs[0] / file) == slurp(dirs[1] / file));
        }
    }

    CHECK(json(read_json(base / "stabilitya" / "stability.json").get<StabilityReport>()) ==
          read_json(base / "stabilitya" / "stability.json"));
    CHECK(json(read_json(base / "stabilitya" / "tightness.json").get<TightnessDiagnostic>()) ==
          read_json(base / "stabilitya" / "tightness.json"));
    const json lj = read_json(base / "loynesa" / "loynes.json");
    CHECK(loynes_to_json(real_loynes_from_json(lj)) == lj);
    const json loss = read_json(base / "lossa" / "loss.json");
    CHECK(json(loss.at("loss_prob").get<LossEstimate>()) == loss.at("loss_prob"));
    const json zs = read_json(base / "zstatsa" / "zstats.json");
    for (const auto& z : zs.at("replications")) {
        CHECK(zvector_to_json(real_zvector_from_json(z)) == z);
    }
}
