#pragma once

#include <memory>
#include <optional>

#include "bellvqc/measure/extract.hpp"
#include "bellvqc/vqc/observable.hpp"

namespace bellvqc::measure {

enum class ErrorBars { binomial, repetitions };

struct MeasureConfig {
    Method method = Method::parity; // mqc also runs parity for the phase
    bool exact = false;
    std::optional<std::size_t> shots; // default: shots_schedule(n)
    ReadoutModel readout;             // empty: ideal
    bool mitigate = false;
    std::size_t repetitions = 1;
    ErrorBars error_bars = ErrorBars::binomial;
    std::size_t parity_samples = 0; // 0: n+1
    std::uint64_t seed = 0;
};

struct MeasurementReport {
    CoherenceEstimate parity;
    std::optional<CoherenceEstimate> mqc;
    std::vector<CoherenceEstimate> parity_runs, mqc_runs;
    std::vector<SignalTable> tables;
    std::size_t total_shots = 0;

    /// The estimate the report's energy is taken from.
    [[nodiscard]] const CoherenceEstimate &primary() const { return mqc ? *mqc : parity; }
};

/// Mean over repetitions. Error bars are either the propagated per-run stds
/// divided by sqrt(R) or the sample std across runs.
[[nodiscard]] inline CoherenceEstimate combine_runs(const std::vector<CoherenceEstimate> &runs,
                                                    ErrorBars bars) {
    if (runs.empty()) throw InvalidArgument("no repetitions to combine");
    if (runs.size() == 1) return runs.front();
    const double r = static_cast<double>(runs.size());
    CoherenceEstimate out = runs.front();
    cplx mean{};
    double emean = 0.0;
    for (const auto &e : runs) {
        mean += e.value;
        emean += e.energy.value_or(0.0);
    }
    mean /= r;
    emean /= r;
    out.value = mean;
    if (out.energy) out.energy = emean;
    if (bars == ErrorBars::repetitions) {
        double vr = 0.0, vi = 0.0, ve = 0.0;
        for (const auto &e : runs) {
            vr += std::norm(e.value.real() - mean.real());
            vi += std::norm(e.value.imag() - mean.imag());
            ve += std::norm(e.energy.value_or(0.0) - emean);
        }
        out.std = std::sqrt(vr / (r - 1.0));
        out.std_imag = std::sqrt(vi / (r - 1.0));
        out.energy_std = std::sqrt(ve / (r - 1.0));
    } else {
        double vr = 0.0, vi = 0.0, ve = 0.0;
        for (const auto &e : runs) {
            vr += e.std * e.std;
            vi += e.std_imag * e.std_imag;
            ve += e.energy_std * e.energy_std;
        }
        out.std = std::sqrt(vr) / r;
        out.std_imag = std::sqrt(vi) / r;
        out.energy_std = std::sqrt(ve) / r;
    }
    return out;
}

/// Parity (and optionally MQC) estimate of <C> for the state prepared by
/// `prep` with `params`, repeated `repetitions` times on independent streams.
[[nodiscard]] inline MeasurementReport measure_coherence(const qsim::Circuit &prep,
                                                         std::span<const double> params,
                                                         const MeasureConfig &cfg) {
    if (cfg.method == Method::sinusoid_fit) {
        throw InvalidArgument("sinusoid fit is an analysis of parity signals, not a pipeline");
    }
    if (cfg.repetitions < 1) throw InvalidArgument("repetitions must be >= 1");
    if (cfg.error_bars == ErrorBars::repetitions && cfg.repetitions < 2) {
        throw ConfigError("repetition error bars need at least 2 repetitions");
    }
    const std::size_t n = prep.num_qubits();
    if (cfg.readout.num_qubits() != 0) cfg.readout.check_size(n);
    PointOptions opt{cfg.exact ? 0 : cfg.shots.value_or(0), cfg.readout, cfg.mitigate};
    if (!cfg.exact && opt.shots == 0) opt.shots = shots_schedule(n);

    const auto bound = prep.bind(params);
    const auto prepared = qsim::prepare(bound, {});
    const auto gammas = parity_settings(n, cfg.parity_samples);
    std::optional<qsim::Circuit> inverse;
    if (cfg.method == Method::mqc) inverse = bound.inverse();

    MeasurementReport rep;
    const std::size_t reps = cfg.exact ? 1 : cfg.repetitions;
    for (std::size_t r = 0; r < reps; ++r) {
        auto pt = parity_signals(prepared, gammas, opt, cfg.seed, r);
        const auto pe = extract_coherence_parity(pt, n);
        rep.parity_runs.push_back(pe);
        for (auto s : pt.shots) rep.total_shots += s;
        rep.tables.push_back(std::move(pt));
        if (inverse) {
            auto mt = mqc_signals(prepared, *inverse, mqc_settings(n), opt, cfg.seed, r);
            rep.mqc_runs.push_back(with_parity_phase(extract_coherence_mqc(mt, n), pe));
            for (auto s : mt.shots) rep.total_shots += s;
            rep.tables.push_back(std::move(mt));
        }
    }
    const auto bars = reps > 1 ? cfg.error_bars : ErrorBars::binomial;
    rep.parity = combine_runs(rep.parity_runs, bars);
    if (inverse) rep.mqc = combine_runs(rep.mqc_runs, bars);
    return rep;
}

struct ShotOptions {
    std::size_t shots = 1000;
    std::uint64_t seed = 0;
    ReadoutModel readout;
    bool mitigate = false;
};

/// Greedy partition of a Pauli sum into qubit-wise commuting groups.
/// Returns, per group, the measurement basis and the term indices.
struct PauliGroup {
    std::string basis; // I (unmeasured), X, Y or Z per qubit
    std::vector<std::size_t> terms;
};

[[nodiscard]] inline std::vector<PauliGroup> group_qubitwise(const qsim::PauliSum &h) {
    std::vector<PauliGroup> groups;
    const auto &terms = h.terms();
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const auto &ops = terms[t].ops;
        bool placed = false;
        for (auto &g : groups) {
            bool ok = true;
            for (std::size_t q = 0; q < ops.size() && ok; ++q) {
                ok = ops[q] == 'I' || g.basis[q] == 'I' || g.basis[q] == ops[q];
            }
            if (!ok) continue;
            for (std::size_t q = 0; q < ops.size(); ++q) {
                if (ops[q] != 'I') g.basis[q] = ops[q];
            }
            g.terms.push_back(t);
            placed = true;
            break;
        }
        if (!placed) groups.push_back({ops, {t}});
    }
    return groups;
}

/// Shot-noise energy of a Pauli sum: one Z-basis sample set per qubit-wise
/// commuting group. Stateful: call c uses streams (seed, "energy", c, group).
[[nodiscard]] inline vqc::Evaluator pauli_shot_evaluator(const qsim::PauliSum &h, ShotOptions opt) {
    if (opt.shots == 0) throw InvalidArgument("shots must be >= 1");
    const std::size_t n = h.num_qubits();
    const bool noisy = opt.readout.num_qubits() != 0 && !opt.readout.is_ideal();
    if (noisy) opt.readout.check_size(n);
    const auto merged = std::make_shared<qsim::PauliSum>(h.simplified());
    auto groups = std::make_shared<std::vector<PauliGroup>>(group_qubitwise(*merged));
    auto calls = std::make_shared<std::uint64_t>(0);

    return [merged, groups, calls, opt, n, noisy](const qsim::Circuit &c, std::span<const double> p) {
        const auto call = (*calls)++;
        const auto base = qsim::prepare(c, p);
        const double r = 1.0 / std::sqrt(2.0);
        const qsim::Mat2 to_x{cplx{r, 0}, cplx{r, 0}, cplx{r, 0}, cplx{-r, 0}};
        const qsim::Mat2 to_y{cplx{r, 0}, cplx{0, -r}, cplx{r, 0}, cplx{0, r}};
        vqc::EnergyEstimate out;
        double var = 0.0;
        for (std::size_t gi = 0; gi < groups->size(); ++gi) {
            const auto &g = (*groups)[gi];
            std::vector<ProductWeights> w;
            std::vector<double> coeff;
            bool constant_only = true;
            for (auto t : g.terms) {
                const auto &term = merged->terms()[t];
                ProductWeights o(n, {1.0, 1.0});
                for (std::size_t q = 0; q < n; ++q) {
                    if (term.ops[q] != 'I') {
                        o[q] = {1.0, -1.0};
                        constant_only = false;
                    }
                }
                w.push_back(noisy && opt.mitigate ? mitigation_weights(opt.readout, o) : o);
                coeff.push_back(term.coeff);
            }
            if (constant_only) {
                for (double cf : coeff) out.value += cf;
                continue;
            }
            auto s = base;
            for (std::size_t q = 0; q < n; ++q) {
                if (g.basis[q] == 'X') s.apply_1q(q, to_x);
                if (g.basis[q] == 'Y') s.apply_1q(q, to_y);
            }
            auto eng = make_engine({opt.seed, "energy", call, gi});
            auto samples = qsim::sample_bitstrings(s, opt.shots, eng);
            if (noisy) samples = apply_readout_error(std::move(samples), opt.readout, eng);
            double sum = 0.0, sum2 = 0.0;
            for (auto b : samples) {
                double x = 0.0;
                for (std::size_t k = 0; k < w.size(); ++k) {
                    double v = coeff[k];
                    for (std::size_t q = 0; q < n; ++q) v *= w[k][q][(b >> q) & 1U];
                    x += v;
                }
                sum += x;
                sum2 += x * x;
            }
            const double m = static_cast<double>(samples.size());
            const double mean = sum / m;
            out.value += mean;
            if (samples.size() > 1) var += std::max(0.0, (sum2 - m * mean * mean) / (m - 1.0)) / m;
            out.shots += samples.size();
        }
        out.std = std::sqrt(var);
        return out;
    };
}

/// Shot-noise energy of H_B(n) from the parity pipeline. Stateful like
/// pauli_shot_evaluator.
[[nodiscard]] inline vqc::Evaluator ghz_shot_evaluator(std::size_t n, ShotOptions opt) {
    if (opt.shots == 0) throw InvalidArgument("shots must be >= 1");
    auto calls = std::make_shared<std::uint64_t>(0);
    return [n, opt, calls](const qsim::Circuit &c, std::span<const double> p) {
        if (c.num_qubits() != n) throw InvalidArgument("circuit size differs from the GHZ operator size");
        const auto call = (*calls)++;
        const PointOptions po{opt.shots, opt.readout, opt.mitigate};
        const auto t = parity_signals(qsim::prepare(c, p), parity_settings(n), po,
                                      derive_seed({opt.seed, "ghz-energy", call}));
        const auto e = extract_coherence_parity(t, n);
        return vqc::EnergyEstimate{*e.energy, e.energy_std, opt.shots * t.size()};
    };
}

/// Exact or shot-mode evaluator for any observable.
[[nodiscard]] inline vqc::Evaluator make_evaluator(const vqc::Observable &h, bool exact, const ShotOptions &opt) {
    if (exact) return vqc::exact_evaluator(h);
    if (const auto *g = std::get_if<vqc::GhzOperator>(&h)) return ghz_shot_evaluator(g->num_qubits, opt);
    return pauli_shot_evaluator(std::get<qsim::PauliSum>(h), opt);
}

} // namespace bellvqc::measure
