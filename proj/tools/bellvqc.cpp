#include <iostream>

#include <CLI11.hpp>

#include "bellvqc/cli/commands.hpp"
#include "bellvqc/cli/verify.hpp"

namespace {

using namespace bellvqc;

constexpr int exit_config = 2;
constexpr int exit_capacity = 3;
constexpr int exit_verify = 4;

struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    bool quiet = false;
};

void add_flags(CLI::App *cmd, Flags &f, bool config_required) {
    auto *c = cmd->add_option("--config", f.config, "experiment config (JSON)");
    if (config_required) c->required();
    cmd->add_option("--out", f.out, "output directory (overrides the config)");
    cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
    cmd->add_option("--mode", f.mode, "exact or shots (overrides training and measurement)")
        ->check(CLI::IsMember({"exact", "shots"}));
    cmd->add_flag("--quiet", f.quiet, "print nothing on success");
}

cli::ExperimentConfig load(const Flags &f) {
    cli::Overrides o;
    o.seed = f.seed;
    o.mode = f.mode;
    if (!f.out.empty()) o.output_dir = f.out;
    return cli::apply_overrides(cli::load_config(f.config), o);
}

int verify(const Flags &f) {
    std::uint64_t seed = f.seed.value_or(0);
    if (!f.config.empty()) seed = f.seed.value_or(load(f).seed);
    const auto checks = cli::run_verify(f.quiet ? nullptr : &std::cout, seed);
    std::size_t failed = 0;
    nlohmann::json report = nlohmann::json::array();
    for (const auto &c : checks) {
        failed += !c.passed;
        report.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    if (!f.out.empty()) {
        std::filesystem::create_directories(f.out);
        cli::RunManifest m;
        m.command = "verify";
        m.started_at = cli::utc_timestamp();
        std::ofstream(std::filesystem::path(f.out) / "verify.json") << report.dump(2) << '\n';
        m.add("verify.json", cli::FileKind::json);
        cli::write_manifest(f.out, m);
    }
    if (!f.quiet) std::cout << checks.size() - failed << "/" << checks.size() << " checks passed\n";
    return failed == 0 ? 0 : exit_verify;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Bell-correlation experiments on a statevector simulator"};
    app.require_subcommand(1);
    Flags flags;

    auto *bounds = app.add_subcommand("bounds", "classical and k-nonlocal bounds of the model");
    auto *train = app.add_subcommand("train", "variational training; writes the trajectory");
    auto *meas = app.add_subcommand("measure", "parity / MQC coherence measurement");
    auto *depth = app.add_subcommand("depth", "Bell correlation depth certificate");
    auto *ver = app.add_subcommand("verify", "built-in invariant suite");
    for (auto *c : {bounds, train, meas, depth}) add_flags(c, flags, true);
    add_flags(ver, flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : exit_config;
    }

    std::ostream *log = flags.quiet ? nullptr : &std::cout;
    try {
        if (ver->parsed()) return verify(flags);
        const auto cfg = load(flags);
        if (bounds->parsed()) (void)cli::run_command(cfg, "bounds", log, cli::cmd_bounds);
        if (train->parsed()) (void)cli::run_command(cfg, "train", log, cli::cmd_train);
        if (meas->parsed()) (void)cli::run_command(cfg, "measure", log, cli::cmd_measure);
        if (depth->parsed()) (void)cli::run_command(cfg, "depth", log, cli::cmd_depth);
        return 0;
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const InvalidArgument &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const ModelInvalid &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const CapacityError &e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return exit_capacity;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
