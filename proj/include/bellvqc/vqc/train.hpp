#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bellvqc/bell/bounds.hpp"
#include "bellvqc/rng.hpp"
#include "bellvqc/vqc/adam.hpp"
#include "bellvqc/vqc/ansatz.hpp"
#include "bellvqc/vqc/gradient.hpp"

namespace bellvqc::vqc {

struct TrainRecord {
    std::size_t iteration = 0;
    double energy = 0.0;
    double energy_std = 0.0;
    std::size_t shots_used = 0; // shots spent on this iteration (gradient + energy)
    std::size_t phase = 0;      // 0 outside hierarchical training
    std::vector<double> params_snapshot;
    double grad_norm = 0.0;
    bool accepted = true;
    double learning_rate = 0.0;
};

struct TrainConfig {
    std::size_t max_iters = 200;
    AdamConfig adam{};
    /// Revert a step whose energy rises by more than this, reset the Adam
    /// moments and scale the
    /// learning rate by lr_decay. Disabled when empty.
    std::optional<double> revert_tolerance = 0.0;
    double lr_decay = 0.5;
    /// Stop after `early_stop_window` consecutive iterations with
    /// energy < bound - 3 std.
    std::optional<double> early_stop_bound;
    std::size_t early_stop_window = 5;
    std::vector<bool> trainable; // empty: all slots
    std::size_t phase = 0;
};

struct TrainResult {
    std::vector<TrainRecord> records;
    std::vector<double> params;
    EnergyEstimate final_energy;
    std::size_t total_shots = 0;
};

enum class InitMode { ones, uniform };

/// All ones, or uniform in [-pi, pi) from the given stream.
[[nodiscard]] inline std::vector<double> initial_params(std::size_t k, InitMode mode,
                                                        std::uint64_t seed = 0,
                                                        std::uint64_t salt = 0) {
    std::vector<double> p(k, 1.0);
    if (mode == InitMode::uniform) {
        auto eng = make_engine({seed, "init-params", salt});
        for (auto &x : p) x = (2.0 * uniform01(eng) - 1.0) * std::numbers::pi;
    }
    return p;
}

[[nodiscard]] inline double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// Gradient descent with Adam. Record 0 holds the initial energy; record i
/// the energy after step i (or the retained energy if the step was reverted).
[[nodiscard]] inline TrainResult train(const qsim::Circuit &circuit, const Evaluator &energy,
                                       std::vector<double> params, const TrainConfig &cfg) {
    circuit.check_params(params);
    circuit.validate();
    TrainResult res;
    OptimizerState opt(params.size(), cfg.adam);

    auto check = [](const EnergyEstimate &e) {
        if (!std::isfinite(e.value)) throw NumericalError("training aborted: energy is not finite");
        return e;
    };

    auto current = check(energy(circuit, params));
    res.total_shots += current.shots;
    res.records.push_back({0, current.value, current.std, current.shots, cfg.phase, params, 0.0,
                           true, opt.config.learning_rate});

    std::size_t streak = 0;
    auto below = [&](const EnergyEstimate &e) {
        return cfg.early_stop_bound && e.value < *cfg.early_stop_bound - 3.0 * e.std;
    };
    if (below(current)) ++streak;

    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
        if (cfg.early_stop_bound && streak >= cfg.early_stop_window) break;
        const auto g = parameter_shift_gradient(circuit, energy, params, cfg.trainable);
        const auto saved_params = params;
        const auto saved_opt = opt.config;
        adam_step(opt, g.grad, params);
        const auto next = check(energy(circuit, params));
        std::size_t shots = g.shots + next.shots;
        res.total_shots += shots;

        TrainRecord rec{it, next.value, next.std, shots, cfg.phase, {}, l2_norm(g.grad), true,
                        opt.config.learning_rate};
        if (cfg.revert_tolerance && next.value > current.value + *cfg.revert_tolerance) {
            // Restoring the old moments would replay the same uphill step.
            params = saved_params;
            opt = OptimizerState(params.size(), saved_opt);
            opt.config.learning_rate *= cfg.lr_decay;
            rec.energy = current.value;
            rec.energy_std = current.std;
            rec.accepted = false;
            rec.learning_rate = opt.config.learning_rate;
        } else {
            current = next;
        }
        rec.params_snapshot = params;
        res.records.push_back(std::move(rec));
        streak = below(current) ? streak + 1 : 0;
    }
    res.params = std::move(params);
    res.final_energy = current;
    return res;
}

struct PhaseResult {
    std::size_t phase = 0;
    std::size_t num_qubits = 0;
    EnergyEstimate energy;
    bell::DepthCertificate certificate;
};

struct HierarchicalConfig {
    std::size_t max_phase = 8;
    TrainConfig per_phase{};
    /// Iterations of the final joint retraining; 0 skips it.
    std::size_t retrain_iters = 0;
    InitMode init = InitMode::ones;
    std::uint64_t seed = 0;
};

struct HierarchicalResult {
    std::vector<TrainRecord> records;
    std::vector<PhaseResult> phases;
    std::vector<double> params;
    std::size_t total_shots = 0;
};

/// Builds the energy functional for H_B(n).
using EvaluatorFactory = std::function<Evaluator(std::size_t num_qubits)>;
/// Energy estimate used for the end-of-phase depth certificate.
using PhaseEstimator =
    std::function<EnergyEstimate(const qsim::Circuit &, std::span<const double>, std::size_t phase)>;

[[nodiscard]] inline EvaluatorFactory exact_ghz_family() {
    return [](std::size_t n) { return exact_evaluator(GhzOperator{n}); };
}

/// Phase j trains only sub-circuit j against H_B(2j) with earlier slots
/// frozen; the optional final phase retrains every slot jointly.
[[nodiscard]] inline HierarchicalResult hierarchical_train(const HierarchicalConfig &cfg,
                                                           const EvaluatorFactory &family,
                                                           const PhaseEstimator &estimate = {}) {
    if (cfg.max_phase < 1 || cfg.max_phase > hierarchical_max_phase) {
        throw InvalidArgument("max phase must be in 1.." + std::to_string(hierarchical_max_phase));
    }
    HierarchicalResult out;
    std::vector<double> params;
    std::size_t iter_offset = 0;

    auto run_phase = [&](std::size_t phase, const qsim::Circuit &c, const Evaluator &e,
                         std::vector<bool> mask, std::size_t iters) {
        TrainConfig tc = cfg.per_phase;
        tc.trainable = std::move(mask);
        tc.phase = phase;
        tc.max_iters = iters;
        auto r = train(c, e, params, tc);
        for (auto &rec : r.records) {
            rec.iteration += iter_offset;
            out.records.push_back(std::move(rec));
        }
        iter_offset = out.records.back().iteration + 1;
        out.total_shots += r.total_shots;
        params = std::move(r.params);

        PhaseResult pr;
        pr.phase = phase;
        pr.num_qubits = c.num_qubits();
        pr.energy = estimate ? estimate(c, params, phase) : r.final_energy;
        out.total_shots += estimate ? pr.energy.shots : 0;
        pr.certificate = bell::certify_depth(c.num_qubits(), pr.energy.value, pr.energy.std);
        out.phases.push_back(pr);
    };

    for (std::size_t j = 1; j <= cfg.max_phase; ++j) {
        const auto c = build_hierarchical_ansatz(j);
        auto fresh = initial_params(hierarchical_slots_per_phase, cfg.init, cfg.seed, j);
        params.insert(params.end(), fresh.begin(), fresh.end());
        run_phase(j, c, family(c.num_qubits()), hierarchical_phase_mask(j), cfg.per_phase.max_iters);
    }
    if (cfg.retrain_iters > 0) {
        const auto c = build_hierarchical_ansatz(cfg.max_phase);
        run_phase(cfg.max_phase + 1, c, family(c.num_qubits()), {}, cfg.retrain_iters);
    }
    out.params = params;
    return out;
}

} // namespace bellvqc::vqc
