#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>

#include "bellvqc/bell/bounds.hpp"
#include "bellvqc/bell/models.hpp"
#include "bellvqc/cli/config.hpp"
#include "bellvqc/cli/manifest.hpp"
#include "bellvqc/measure/estimator.hpp"
#include "bellvqc/vqc/trajectory.hpp"

namespace bellvqc::cli {

struct Model {
    ModelType type = ModelType::chsh;
    std::size_t num_qubits = 0;
    vqc::Observable hamiltonian;
    double classical_bound = 0.0;
    std::optional<bell::HoneycombLattice> lattice;

    [[nodiscard]] bool ghz_family() const {
        return type == ModelType::svetlichny || type == ModelType::mermin;
    }
};

[[nodiscard]] inline bell::HoneycombLattice model_lattice(const ExperimentConfig &c) {
    if (!c.model.lattice.empty()) return bell::load_lattice((c.base_dir / c.model.lattice).string());
    return bell::brick_wall(c.model.rows, c.model.cols);
}

/// Bell expression of the model. The GHZ families are only built up to
/// 12 parties (2^n terms).
[[nodiscard]] inline bell::BellModel model_expression(const ExperimentConfig &c) {
    const auto &m = c.model;
    switch (m.type) {
    case ModelType::honeycomb: {
        const auto lat = model_lattice(c);
        return {bell::build_honeycomb_expression(lat, m.eps), bell::honeycomb_settings(lat)};
    }
    case ModelType::chain:
        return {bell::build_chain_expression(m.n, m.delta, m.eps), bell::chain_settings(m.n)};
    case ModelType::svetlichny:
    case ModelType::mermin:
        if (m.n > 12) throw CapacityError("GHZ-family expressions are built only up to n = 12");
        return m.type == ModelType::mermin ? bell::build_mermin(m.n) : bell::build_svetlichny(m.n);
    case ModelType::chsh: return bell::build_chsh();
    case ModelType::gisin: return bell::build_gisin();
    }
    throw ConfigError("unknown model");
}

[[nodiscard]] inline Model build_model(const ExperimentConfig &c) {
    const auto &m = c.model;
    Model out;
    out.type = m.type;
    switch (m.type) {
    case ModelType::honeycomb: {
        out.lattice = model_lattice(c);
        out.num_qubits = out.lattice->num_sites();
        out.hamiltonian = bell::build_honeycomb_hamiltonian(*out.lattice, m.eps);
        out.classical_bound = bell::build_honeycomb_expression(*out.lattice, m.eps).classical_bound();
        break;
    }
    case ModelType::chain:
        out.num_qubits = m.n;
        out.hamiltonian = bell::build_chain_hamiltonian(m.n, m.delta, m.eps);
        out.classical_bound = bell::build_chain_expression(m.n, m.delta, m.eps).classical_bound();
        break;
    case ModelType::svetlichny:
    case ModelType::mermin:
        if (m.n < 2 || m.n > 24) throw ConfigError("GHZ-family n must be in 2..24");
        out.num_qubits = m.n;
        out.hamiltonian = vqc::GhzOperator{m.n};
        out.classical_bound = m.type == ModelType::mermin ? bell::mermin_classical_bound(m.n)
                                                           : bell::svetlichny_classical_bound(m.n);
        break;
    case ModelType::chsh:
    case ModelType::gisin: {
        const auto bm = m.type == ModelType::chsh ? bell::build_chsh() : bell::build_gisin();
        out.num_qubits = 2;
        out.hamiltonian = bell::bell_operator_pauli(bm.expression, bm.settings);
        out.classical_bound = bm.expression.classical_bound();
        break;
    }
    }
    return out;
}

/// (|0...0> - |1...1>)/sqrt2: U3(pi/2, pi, 0) on qubit 0, then a CNOT ladder.
[[nodiscard]] inline qsim::Circuit ghz_circuit(std::size_t n) {
    qsim::Circuit c(n);
    c.add(qsim::gates::u3(0, std::numbers::pi / 2, std::numbers::pi, 0.0));
    for (std::size_t q = 1; q < n; ++q) c.add(qsim::gates::cnot(q - 1, q));
    return c;
}

/// Where a command writes and what it tells the user.
struct RunContext {
    std::filesystem::path out;
    std::ostream *log = nullptr;
    RunManifest manifest;

    template <class... A> void say(const A &...a) const {
        if (log) ((*log << a), ...) << '\n';
    }
};

[[nodiscard]] inline RunContext make_context(const ExperimentConfig &c, std::string command,
                                             std::ostream *log) {
    RunContext ctx;
    ctx.out = c.output_dir.empty() ? std::filesystem::path("runs") / c.name : std::filesystem::path(c.output_dir);
    std::filesystem::create_directories(ctx.out);
    ctx.log = log;
    ctx.manifest.command = std::move(command);
    ctx.manifest.config_hash = config_hash(c);
    ctx.manifest.started_at = utc_timestamp();
    return ctx;
}

inline void write_json(RunContext &ctx, const std::string &name, const json &j) {
    std::ofstream os(ctx.out / name);
    if (!os) throw InvalidArgument("cannot write " + (ctx.out / name).string());
    os << j.dump(2) << '\n';
    ctx.manifest.add(name, FileKind::json);
}

/// JSON has no infinities; an unbounded margin is written as null.
[[nodiscard]] inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

[[nodiscard]] inline json to_json(const bell::DepthCertificate &c) {
    json margins = json::array();
    for (const auto &m : c.margins) {
        margins.push_back({{"k", m.k}, {"bound", m.bound}, {"sigma_margin", finite_or_null(m.sigma_margin)}});
    }
    return {{"num_parties", c.num_parties}, {"energy", c.energy},  {"energy_std", c.energy_std},
            {"certified_depth", c.certified_depth}, {"margins", margins}};
}

// ---------------------------------------------------------------- bounds

[[nodiscard]] inline json cmd_bounds(const ExperimentConfig &c, RunContext &ctx) {
    const auto model = build_model(c);
    json r{{"model", model_name(c.model.type)},
           {"num_parties", model.num_qubits},
           {"classical_bound", model.classical_bound}};
    ctx.say("model ", model_name(c.model.type), ", ", model.num_qubits, " parties");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", model.classical_bound);
    ctx.say("classical bound: ", buf);

    std::size_t settings = 0;
    if (model.ghz_family()) settings = 2 * model.num_qubits;
    else if (c.model.type == ModelType::chain) settings = 4 * ((model.num_qubits + 1) / 2) + 3 * (model.num_qubits / 2);
    else if (c.model.type == ModelType::honeycomb) settings = 2 * model.num_qubits;
    else if (c.model.type == ModelType::chsh) settings = 4;
    else settings = 7;
    r["total_settings"] = settings;
    if (settings <= bell::max_lhv_settings) {
        const double bf = bell::lhv_bound_bruteforce(model_expression(c).expression);
        const bool agrees = std::abs(bf - model.classical_bound) <= 1e-9 * std::max(1.0, std::abs(bf));
        r["bruteforce"] = {{"value", bf}, {"agrees", agrees}};
        std::snprintf(buf, sizeof buf, "%.12g", bf);
        ctx.say("brute-force LHV minimum: ", buf, agrees ? " (agrees)" : " (DISAGREES)");
    } else {
        r["bruteforce"] = nullptr;
        ctx.say("brute force skipped: ", settings, " settings exceed ", bell::max_lhv_settings);
    }

    if (model.ghz_family()) {
        json ks = json::array();
        for (std::size_t k = 1; k < model.num_qubits; ++k) {
            ks.push_back({{"k", k}, {"bound", bell::k_nonlocal_bound(model.num_qubits, k)}});
        }
        r["k_bounds"] = ks;
        std::snprintf(buf, sizeof buf, "%.6g", ks.back()["bound"].get<double>());
        ctx.say("k-nonlocal bound at k = ", model.num_qubits - 1, ": ", buf);
    }
    write_json(ctx, "bounds.json", r);
    return r;
}

// ---------------------------------------------------------------- train

struct TrainOutcome {
    qsim::Circuit circuit;
    std::vector<double> params;
    std::vector<vqc::TrainRecord> records;
    vqc::EnergyEstimate final_energy;
    std::vector<vqc::PhaseResult> phases;
    std::size_t total_shots = 0;
};

[[nodiscard]] inline measure::MeasureConfig measure_config(const MeasurementConfig &m, std::size_t n,
                                                           std::uint64_t seed) {
    measure::MeasureConfig mc;
    mc.method = m.method;
    mc.exact = m.exact;
    mc.shots = m.shots;
    if (m.readout) {
        auto widen = [n](const std::vector<double> &v) {
            if (v.size() == 1) return std::vector<double>(n, v[0]);
            if (v.size() != n) throw ConfigError("readout rates must have 1 or n entries");
            return v;
        };
        mc.readout = measure::ReadoutModel(widen(m.readout->e0), widen(m.readout->e1));
        mc.readout.validate();
    }
    mc.mitigate = m.mitigate;
    mc.repetitions = m.repetitions;
    mc.error_bars = m.repetition_error_bars ? measure::ErrorBars::repetitions : measure::ErrorBars::binomial;
    mc.parity_samples = m.parity_samples;
    mc.seed = seed;
    return mc;
}

[[nodiscard]] inline TrainOutcome run_training(const ExperimentConfig &c, const Model &model) {
    if (!c.ansatz) throw ConfigError("training needs an ansatz section");
    const auto t = c.training.value_or(TrainingConfig{});
    const std::size_t n = model.num_qubits;
    if (n > qsim::max_qubits) {
        throw CapacityError("cannot simulate " + std::to_string(n) + " qubits (limit " +
                            std::to_string(qsim::max_qubits) + ")");
    }

    vqc::TrainConfig tc;
    tc.max_iters = t.max_iters;
    tc.adam.learning_rate = t.learning_rate;
    tc.revert_tolerance = t.revert_tolerance ? t.revert_tolerance
                                             : (t.exact ? std::optional<double>(0.0) : std::nullopt);
    tc.lr_decay = t.lr_decay;
    const std::uint64_t train_seed = derive_seed({c.seed, "train"});
    const measure::ShotOptions shots{t.shots, train_seed, {}, false};

    TrainOutcome out;
    if (c.ansatz->family == vqc::AnsatzFamily::hierarchical) {
        if (!model.ghz_family() || n % 2 != 0) {
            throw ConfigError("the hierarchical ansatz needs a GHZ-family model with even n");
        }
        if (t.early_stop) throw ConfigError("early_stop is not supported for hierarchical training");
        vqc::HierarchicalConfig hc;
        hc.max_phase = n / 2;
        hc.per_phase = tc;
        hc.retrain_iters = t.retrain_iters;
        hc.init = t.init;
        hc.seed = c.seed;
        vqc::EvaluatorFactory family = vqc::exact_ghz_family();
        if (!t.exact) {
            family = [shots](std::size_t k) {
                auto o = shots;
                o.seed = derive_seed({shots.seed, "phase", k});
                return measure::ghz_shot_evaluator(k, o);
            };
        }
        vqc::PhaseEstimator estimate;
        if (c.measurement) {
            const auto m = *c.measurement;
            const auto seed = c.seed;
            estimate = [m, seed](const qsim::Circuit &circ, std::span<const double> p, std::size_t phase) {
                const auto mc = measure_config(m, circ.num_qubits(), derive_seed({seed, "phase-estimate", phase}));
                const auto rep = measure::measure_coherence(circ, p, mc);
                const auto &e = rep.primary();
                return vqc::EnergyEstimate{*e.energy, e.energy_std, rep.total_shots};
            };
        }
        auto r = vqc::hierarchical_train(hc, family, estimate);
        out.circuit = vqc::build_hierarchical_ansatz(hc.max_phase);
        out.params = std::move(r.params);
        out.records = std::move(r.records);
        out.phases = std::move(r.phases);
        out.final_energy = out.phases.back().energy;
        out.total_shots = r.total_shots;
        return out;
    }

    switch (c.ansatz->family) {
    case vqc::AnsatzFamily::honeycomb3block:
        if (!model.lattice) throw ConfigError("the honeycomb ansatz needs a honeycomb model");
        out.circuit = vqc::build_honeycomb_ansatz(*model.lattice);
        break;
    case vqc::AnsatzFamily::chain:
        out.circuit = vqc::build_chain_ansatz(n, c.ansatz->layers);
        break;
    default: break;
    }
    if (t.early_stop) tc.early_stop_bound = model.classical_bound;
    const auto energy = measure::make_evaluator(model.hamiltonian, t.exact, shots);
    auto r = vqc::train(out.circuit, energy,
                        vqc::initial_params(out.circuit.num_params(), t.init, c.seed), tc);
    out.params = std::move(r.params);
    out.records = std::move(r.records);
    out.final_energy = r.final_energy;
    out.total_shots = r.total_shots;
    return out;
}

[[nodiscard]] inline json trajectory_meta(const ExperimentConfig &c, const Model &model) {
    const auto t = c.training.value_or(TrainingConfig{});
    return {{"model", model_name(c.model.type)},
            {"num_qubits", model.num_qubits},
            {"ansatz", c.ansatz ? vqc::family_name(c.ansatz->family) : "none"},
            {"mode", t.exact ? "exact" : "shots"},
            {"seed", c.seed}};
}

inline void persist_training(const ExperimentConfig &c, const Model &model, const TrainOutcome &o,
                             RunContext &ctx, json &summary) {
    vqc::write_trajectory((ctx.out / "trajectory.jsonl").string(), o.records, trajectory_meta(c, model));
    ctx.manifest.add("trajectory.jsonl", FileKind::jsonl);
    write_json(ctx, "params.json", {{"num_params", o.params.size()}, {"params", o.params}});

    const double e = o.final_energy.value, s = o.final_energy.std;
    summary["model"] = model_name(c.model.type);
    summary["num_qubits"] = model.num_qubits;
    summary["iterations"] = o.records.empty() ? 0 : o.records.back().iteration;
    summary["final_energy"] = e;
    summary["energy_std"] = s;
    summary["classical_bound"] = model.classical_bound;
    summary["violation"] = e < model.classical_bound;
    summary["sigma_margin"] = s > 0.0 ? json((model.classical_bound - e) / s) : json(nullptr);
    summary["total_shots"] = o.total_shots;
    char buf[96];
    std::snprintf(buf, sizeof buf, "final energy %.10g (std %.3g), classical bound %.10g", e, s, model.classical_bound);
    ctx.say(buf);
    ctx.say(e < model.classical_bound ? "violation: yes" : "violation: no");
    if (s > 0.0) {
        std::snprintf(buf, sizeof buf, "sigma margin: %.2f", (model.classical_bound - e) / s);
        ctx.say(buf);
    }
    if (!o.phases.empty()) {
        json phases = json::array();
        for (const auto &p : o.phases) {
            phases.push_back({{"phase", p.phase},
                              {"num_qubits", p.num_qubits},
                              {"energy", p.energy.value},
                              {"energy_std", p.energy.std},
                              {"certificate", to_json(p.certificate)}});
            ctx.say("phase ", p.phase, ": ", p.num_qubits, " qubits, certified depth ",
                    p.certificate.certified_depth);
        }
        summary["phases"] = phases;
        summary["certified_depth"] = o.phases.back().certificate.certified_depth;
    }
}

[[nodiscard]] inline json cmd_train(const ExperimentConfig &c, RunContext &ctx) {
    const auto model = build_model(c);
    const auto o = run_training(c, model);
    json summary;
    persist_training(c, model, o, ctx, summary);
    write_json(ctx, "summary.json", summary);
    return summary;
}

// ---------------------------------------------------------------- measure

[[nodiscard]] inline json to_json(const measure::CoherenceEstimate &e) {
    return {{"method", measure::method_name(e.method)},
            {"n", e.num_qubits},
            {"value", {e.value.real(), e.value.imag()}},
            {"std", e.std},
            {"std_imag", e.std_imag},
            {"energy", e.energy ? json(*e.energy) : json(nullptr)},
            {"energy_std", e.energy_std},
            {"warnings", e.warnings}};
}

/// Prepares the state named by the measurement section: the ideal GHZ state,
/// or the outcome of training.
struct PreparedState {
    qsim::Circuit circuit;
    std::vector<double> params;
    std::optional<TrainOutcome> training;
};

[[nodiscard]] inline PreparedState prepare_for_measurement(const ExperimentConfig &c, const Model &model) {
    if (!model.ghz_family()) {
        throw ConfigError("coherence measurements need a GHZ-family model (svetlichny or mermin)");
    }
    if (!c.measurement) throw ConfigError("a measurement section is required");
    if (model.num_qubits > qsim::max_qubits) throw CapacityError("state too large to simulate");
    PreparedState p;
    if (c.measurement->ideal_state) {
        p.circuit = ghz_circuit(model.num_qubits);
        return p;
    }
    auto o = run_training(c, model);
    p.circuit = o.circuit;
    p.params = o.params;
    p.training = std::move(o);
    return p;
}

[[nodiscard]] inline json cmd_measure(const ExperimentConfig &c, RunContext &ctx) {
    const auto model = build_model(c);
    const auto prep = prepare_for_measurement(c, model);
    json out;
    if (prep.training) {
        json summary;
        persist_training(c, model, *prep.training, ctx, summary);
        out["training"] = summary;
    }
    const std::size_t n = model.num_qubits;
    const auto mc = measure_config(*c.measurement, n, derive_seed({c.seed, "measure"}));
    const auto rep = measure::measure_coherence(prep.circuit, prep.params, mc);
    measure::write_signals_csv((ctx.out / "signals.csv").string(), rep.tables);
    ctx.manifest.add("signals.csv", FileKind::csv);

    const auto direct = qsim::antidiagonal_coherence(qsim::prepare(prep.circuit, prep.params));
    const auto &primary = rep.primary();
    const auto cert = bell::certify_depth(n, *primary.energy, primary.energy_std);
    out["parity"] = to_json(rep.parity);
    out["mqc"] = rep.mqc ? to_json(*rep.mqc) : json(nullptr);
    out["direct_coherence"] = {direct.real(), direct.imag()};
    out["total_shots"] = rep.total_shots;
    out["certificate"] = to_json(cert);
    write_json(ctx, "coherence.json", out);

    char buf[160];
    std::snprintf(buf, sizeof buf, "parity <C> = %.10g %+.10gi (std %.3g)", rep.parity.value.real(),
                  rep.parity.value.imag(), rep.parity.std);
    ctx.say(buf);
    if (rep.mqc) {
        std::snprintf(buf, sizeof buf, "mqc |<C>| = %.10g (std %.3g)", rep.mqc->value.real(), rep.mqc->std);
        ctx.say(buf);
    }
    std::snprintf(buf, sizeof buf, "energy %.10g (std %.3g), certified depth %zu", *primary.energy,
                  primary.energy_std, cert.certified_depth);
    ctx.say(buf);
    for (const auto &w : primary.warnings) ctx.say("warning: ", w);
    return out;
}

// ---------------------------------------------------------------- depth

/// Depth certificate from hierarchical training (one per phase) or, with an
/// ideal-state measurement section, from the ideal GHZ state.
[[nodiscard]] inline json cmd_depth(const ExperimentConfig &c, RunContext &ctx) {
    const auto model = build_model(c);
    if (!model.ghz_family()) throw ConfigError("depth certification needs a GHZ-family model");
    json out;
    if (c.measurement && c.measurement->ideal_state) {
        const auto m = cmd_measure(c, ctx);
        out["phases"] = json::array();
        out["certificate"] = m["certificate"];
        out["certified_depth"] = m["certificate"]["certified_depth"];
    } else {
        if (!c.ansatz || c.ansatz->family != vqc::AnsatzFamily::hierarchical) {
            throw ConfigError("depth certification by training needs the hierarchical ansatz");
        }
        const auto o = run_training(c, model);
        json summary;
        persist_training(c, model, o, ctx, summary);
        out["phases"] = summary["phases"];
        out["certificate"] = summary["phases"].back()["certificate"];
        out["certified_depth"] = summary["certified_depth"];
    }
    ctx.say("certified depth: ", out["certified_depth"].get<std::size_t>(), " of ", model.num_qubits);
    write_json(ctx, "depth.json", out);
    return out;
}

/// Runs a command and writes the manifest.
template <class F> json run_command(const ExperimentConfig &c, const std::string &name, std::ostream *log, F &&f) {
    auto ctx = make_context(c, name, log);
    auto r = f(c, ctx);
    write_manifest(ctx.out, ctx.manifest);
    return r;
}

} // namespace bellvqc::cli
