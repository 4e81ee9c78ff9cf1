#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bellvqc/cli/commands.hpp"
#include "bellvqc/cli/verify.hpp"

using namespace bellvqc;
using namespace bellvqc::cli;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

const fs::path configs = fs::path(BELLVQC_SOURCE_DIR) / "configs";

fs::path scratch(const std::string &name) {
    const auto p = fs::temp_directory_path() / "bellvqc-test-cli" / name;
    fs::remove_all(p);
    return p;
}

ExperimentConfig named(const std::string &name, const fs::path &out) {
    Overrides o;
    o.output_dir = out.string();
    return apply_overrides(load_config((configs / (name + ".json")).string()), o);
}

json minimal() {
    return json::parse(R"({"schema_version": 1, "seed": 3, "model": {"type": "chsh"}})");
}

std::string slurp(const fs::path &p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int run_cli(const std::string &args) {
    const int rc = std::system((std::string(BELLVQC_CLI) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST_CASE("config parsing", "[cli][config]") {
    const auto c = parse_config(minimal());
    CHECK(c.seed == 3);
    CHECK(c.model.type == ModelType::chsh);
    CHECK_FALSE(c.ansatz);

    auto with = [](const char *ptr, json v) {
        auto j = minimal();
        j[json::json_pointer(ptr)] = std::move(v);
        return j;
    };
    CHECK_THROWS_AS(parse_config(with("/extra", 1)), ConfigError);
    CHECK_THROWS_AS(parse_config(with("/model/eps", 0.5)), ConfigError);
    CHECK_THROWS_AS(parse_config(with("/schema_version", 2)), ConfigError);
    CHECK_THROWS_AS(parse_config(with("/seed", -1)), ConfigError);
    CHECK_THROWS_AS(parse_config(with("/seed", "7")), ConfigError);
    CHECK_THROWS_AS(parse_config(with("/model/type", "kagome")), ConfigError);
    CHECK_THROWS_AS(parse_config(with("/training", json{{"mode", "noisy"}})), ConfigError);
    CHECK_THROWS_AS(parse_config(with("/training", json{{"learning_rate", 0.1}, {"lr", 0.1}})), ConfigError);
    CHECK_THROWS_AS(parse_config(with("/measurement", json{{"readout", {{"symmetric", 0.01}, {"e0", 0.1}}}})),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(with("/ansatz", json{{"family", "brickwork"}})), ConfigError);

    auto no_seed = minimal();
    no_seed.erase("seed");
    CHECK_THROWS_AS(parse_config(no_seed), ConfigError);

    auto hc = minimal();
    hc["model"] = {{"type", "honeycomb"}, {"lattice", "no/such/file.json"}, {"eps", 0.9}};
    CHECK_THROWS_AS(parse_config(hc, configs), ConfigError);
    hc["model"]["lattice"] = "lattices/honeycomb_73.json";
    CHECK(parse_config(hc, configs).model.lattice == "lattices/honeycomb_73.json");

    const auto m = parse_config(with("/measurement", json{{"method", "mqc"}, {"mode", "shots"}, {"readout", {{"symmetric", 0.02}}}}));
    REQUIRE(m.measurement);
    CHECK(m.measurement->method == measure::Method::mqc);
    CHECK_FALSE(m.measurement->exact);
    CHECK(m.measurement->readout->e0 == std::vector<double>{0.02});
    const auto mc = measure_config(*m.measurement, 4, 0);
    CHECK(mc.readout.num_qubits() == 4);

    CHECK_THROWS_AS(load_config("/no/such/config.json"), ConfigError);
}

TEST_CASE("every shipped config parses", "[cli][config]") {
    std::size_t count = 0;
    for (const auto &e : fs::directory_iterator(configs)) {
        if (e.path().extension() != ".json") continue;
        INFO(e.path());
        CHECK_NOTHROW(load_config(e.path().string()));
        ++count;
    }
    CHECK(count >= 10);
}

TEST_CASE("overrides and config hash", "[cli][config]") {
    const auto base = parse_config(minimal());
    const auto h = config_hash(base);
    CHECK(h.size() == 16);
    CHECK(config_hash(parse_config(minimal())) == h);

    Overrides o;
    o.seed = 99;
    const auto s = apply_overrides(base, o);
    CHECK(s.seed == 99);
    CHECK(config_hash(s) != h);

    auto j = minimal();
    j["training"] = {{"mode", "exact"}};
    j["measurement"] = {{"mode", "exact"}};
    Overrides m;
    m.mode = "shots";
    const auto sh = apply_overrides(parse_config(j), m);
    CHECK_FALSE(sh.training->exact);
    CHECK_FALSE(sh.measurement->exact);
    m.mode = "fast";
    CHECK_THROWS_AS(apply_overrides(parse_config(j), m), ConfigError);
}

TEST_CASE("models from the shipped configs", "[cli][bounds]") {
    CHECK(build_model(named("chsh", scratch("m"))).classical_bound == -2.0);
    CHECK(build_model(named("gisin", scratch("m"))).classical_bound == Approx(-6.0).margin(1e-12));
    CHECK(build_model(named("chain_21", scratch("m"))).classical_bound == Approx(-160.0).margin(1e-9));
    const auto hc = build_model(named("honeycomb_73", scratch("m")));
    CHECK(hc.num_qubits == 73);
    CHECK(hc.classical_bound == Approx(-131.3).margin(1e-9));

    const auto ghz = qsim::prepare(ghz_circuit(5), {});
    CHECK(std::abs(qsim::antidiagonal_coherence(ghz) - qsim::cplx(-0.5, 0.0)) < 1e-12);
}

TEST_CASE("bounds command", "[cli][bounds]") {
    const auto out = scratch("bounds");
    const auto r = run_command(named("svetlichny_24", out), "bounds", nullptr, cmd_bounds);
    CHECK(r["k_bounds"].size() == 23);
    CHECK(r["k_bounds"].back()["bound"].get<double>() == -2048.0);
    CHECK(r["bruteforce"].is_null());
    CHECK(check_manifest(out).empty());

    const auto g = run_command(named("gisin", scratch("gisin")), "bounds", nullptr, cmd_bounds);
    CHECK(g["bruteforce"]["agrees"].get<bool>());
    CHECK(g["bruteforce"]["value"].get<double>() == Approx(-6.0).margin(1e-9));
}

TEST_CASE("train command", "[cli][train]") {
    const auto out = scratch("chsh");
    const auto s = run_command(named("chsh", out), "train", nullptr, cmd_train);
    CHECK(s["violation"].get<bool>());
    CHECK(s["final_energy"].get<double>() <= -2.7);
    CHECK(s["sigma_margin"].is_null());
    CHECK(check_manifest(out).empty());
    const auto t = vqc::read_trajectory((out / "trajectory.jsonl").string());
    CHECK(t.header["meta"]["model"] == "chsh");
    CHECK(t.records.size() == s["iterations"].get<std::size_t>() + 1);
    const auto p = json::parse(slurp(out / "params.json"));
    CHECK(p["params"].get<std::vector<double>>() == t.records.back().params_snapshot);

    // a measured phase estimate carries a std, so the margin is finite
    const auto g = run_command(named("ghz_4_trained", scratch("g4")), "train", nullptr, cmd_train);
    CHECK(g["certified_depth"].get<std::size_t>() == 4);
    CHECK(g["sigma_margin"].get<double>() > 3.0);
}

TEST_CASE("train command errors", "[cli][train]") {
    auto j = json::parse(slurp(configs / "honeycomb_73.json"));
    j["ansatz"] = {{"family", "honeycomb3block"}};
    j["output_dir"] = scratch("big").string();
    const auto big = parse_config(j, configs);
    CHECK_THROWS_AS(run_command(big, "train", nullptr, cmd_train), CapacityError);

    auto c = minimal();
    c["output_dir"] = scratch("noansatz").string();
    CHECK_THROWS_AS(run_command(parse_config(c), "train", nullptr, cmd_train), ConfigError);
    c["ansatz"] = {{"family", "hierarchical"}};
    CHECK_THROWS_AS(run_command(parse_config(c), "train", nullptr, cmd_train), ConfigError);
}

TEST_CASE("measure and depth commands", "[cli][measure]") {
    auto j = minimal();
    j["model"] = {{"type", "svetlichny"}, {"n", 6}};
    j["measurement"] = {{"state", "ideal"}, {"method", "mqc"}};
    j["output_dir"] = scratch("m6").string();
    const auto m = run_command(parse_config(j), "measure", nullptr, cmd_measure);
    CHECK(m["certificate"]["energy"].get<double>() == Approx(-std::pow(2.0, 2.5)).epsilon(1e-12));
    CHECK(m["certificate"]["certified_depth"].get<std::size_t>() == 6);
    CHECK(m["mqc"]["value"][0].get<double>() == Approx(0.5).epsilon(1e-12));
    CHECK(check_manifest(j["output_dir"].get<std::string>()).empty());
    std::ifstream csv(fs::path(j["output_dir"].get<std::string>()) / "signals.csv");
    std::size_t rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == 1 + 7 + 14);

    j["output_dir"] = scratch("d6").string();
    const auto d = run_command(parse_config(j), "depth", nullptr, cmd_depth);
    CHECK(d["certified_depth"].get<std::size_t>() == 6);

    auto bad = minimal();
    bad["measurement"] = {{"state", "ideal"}};
    bad["output_dir"] = scratch("bad").string();
    CHECK_THROWS_AS(run_command(parse_config(bad), "measure", nullptr, cmd_measure), ConfigError);
    CHECK_THROWS_AS(run_command(parse_config(bad), "depth", nullptr, cmd_depth), ConfigError);

    auto ro = j;
    ro["measurement"]["readout"] = {{"e0", 0.6}, {"e1", 0.5}};
    ro["output_dir"] = scratch("ro").string();
    CHECK_THROWS_AS(run_command(parse_config(ro), "measure", nullptr, cmd_measure), ModelInvalid);
}

TEST_CASE("same config and seed give byte-identical outputs", "[cli][determinism]") {
    for (const char *name : {"chsh", "ghz_8_shots"}) {
        const auto a = scratch(std::string(name) + "_a"), b = scratch(std::string(name) + "_b");
        for (const auto &out : {a, b}) {
            if (std::string(name) == "chsh") (void)run_command(named(name, out), "train", nullptr, cmd_train);
            else (void)run_command(named(name, out), "measure", nullptr, cmd_measure);
        }
        for (const char *file : {"trajectory.jsonl", "signals.csv"}) {
            if (!fs::exists(a / file)) continue;
            INFO(name << "/" << file);
            CHECK(slurp(a / file) == slurp(b / file));
        }
    }
    // a different seed changes the shot record
    const auto other = scratch("ghz_8_other");
    Overrides o;
    o.seed = 1234;
    o.output_dir = other.string();
    (void)run_command(apply_overrides(load_config((configs / "ghz_8_shots.json").string()), o), "measure", nullptr,
                      cmd_measure);
    CHECK(slurp(other / "signals.csv") != slurp(other.parent_path() / "ghz_8_shots_a" / "signals.csv"));
}

TEST_CASE("manifest completeness", "[cli][manifest]") {
    const auto out = scratch("manifest");
    (void)run_command(named("chsh", out), "train", nullptr, cmd_train);
    CHECK(check_manifest(out).empty());
    const auto m = json::parse(slurp(out / manifest_file));
    CHECK(m["config_hash"].get<std::string>().size() == 16);
    CHECK(m["outputs"].size() == 3);

    std::ofstream(out / "params.json") << "{ not json";
    CHECK(check_manifest(out).size() == 1);
    fs::remove(out / "summary.json");
    CHECK(check_manifest(out).size() == 2);
    CHECK_FALSE(check_manifest(scratch("empty")).empty());

    RunManifest bad;
    bad.add("missing.json", FileKind::json);
    CHECK_THROWS_AS(write_manifest(out, bad), InvalidArgument);
}

TEST_CASE("verify suite", "[cli][verify]") {
    for (const auto &c : run_verify(nullptr)) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.passed);
    }

    // one flipped Svetlichny coefficient breaks the operator identity
    const auto good = bell::build_svetlichny(4);
    bell::BellExpression mutated("svetlichny", good.expression.settings_per_party());
    for (std::size_t t = 0; t < good.expression.num_terms(); ++t) {
        mutated.add(good.expression.setting(t), t == 5 ? -good.expression.weight(t) : good.expression.weight(t));
    }
    const auto expected = bell::ghz_bell_operator_dense(4);
    CHECK(check_operator_equality("good", good, expected).passed);
    CHECK_FALSE(check_operator_equality("mutated", {mutated, good.settings}, expected).passed);

    CHECK(readout_precondition_check().passed);
}

TEST_CASE("binary exit codes", "[cli][binary]") {
    const auto dir = scratch("bin");
    fs::create_directories(dir);
    const auto cfg = (configs / "chsh.json").string();
    CHECK(run_cli("bounds --config " + cfg + " --out " + dir.string() + "/b --quiet") == 0);
    CHECK(fs::exists(dir / "b" / "bounds.json"));
    CHECK(run_cli("train --config " + cfg + " --out " + dir.string() + "/t --seed 4 --mode exact") == 0);
    CHECK(json::parse(slurp(dir / "t" / "trajectory.jsonl").substr(0, slurp(dir / "t" / "trajectory.jsonl").find('\n')))
              ["meta"]["seed"] == 4);

    std::ofstream(dir / "bad.json") << R"({"schema_version": 1, "seed": 1, "model": {"type": "chsh", "n": 2}})";
    CHECK(run_cli("bounds --config " + (dir / "bad.json").string()) == 2);
    CHECK(run_cli("bounds --config " + (dir / "missing.json").string()) == 2);
    CHECK(run_cli("train --config " + cfg + " --mode fast") == 2);
    CHECK(run_cli("") == 2);

    auto big = json::parse(slurp(configs / "honeycomb_73.json"));
    big["ansatz"] = {{"family", "honeycomb3block"}};
    big["model"]["lattice"] = (configs / "lattices" / "honeycomb_73.json").string();
    std::ofstream(dir / "big.json") << big.dump();
    CHECK(run_cli("train --config " + (dir / "big.json").string() + " --out " + dir.string() + "/big") == 3);

    CHECK(run_cli("verify --quiet --out " + dir.string() + "/v") == 0);
    CHECK(check_manifest(dir / "v").empty());
}
